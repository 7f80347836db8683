#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "alglift/verify.hpp"

namespace alglift {

enum class Command { gen, decompose, radius, lift, approx, verify };

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCertificateFailed = 1,
  kExitMalformedInput = 2,
  kExitNumerical = 3,
};

struct RunConfig {
  Command command = Command::verify;
  std::uint64_t seed = 20240601;
  std::string input_path;
  std::string output_path;  // empty: standard output
  Tolerances tolerances = default_tolerances();
  // verify
  std::vector<std::string> suites;
  int cases = 0;
  // gen
  std::string kind = "instance";  // instance | lift | radius
  int dim = 4;
  int degree = 3;
  double conditioning = 1.0;
};

/// Runs one command and writes its JSON report. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

/// Parses argv (flags, ALGLIFT_* environment variables, --tol.<name>=<v>)
/// and calls run().
int run_cli(int argc, char** argv);

std::string command_name(Command c);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace alglift
