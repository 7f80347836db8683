#include "alglift/cli.hpp"

int main(int argc, char** argv) { return alglift::run_cli(argc, argv); }
