#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "alglift/cli.hpp"
#include "alglift/generate.hpp"
#include "alglift/serialize.hpp"
#include "test_util.hpp"

using namespace alglift;
using alglift::test::mat;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("alglift_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

Json read_json(const std::string& path) {
  std::ifstream f(path);
  return Json::parse(f);
}

Json without_timing(Json j) {
  j.erase("timing");
  if (j.contains("result") && j["result"].is_object())
    for (auto& [k, v] : j["result"].items())
      if (v.is_object()) v.erase("seconds");
  return j;
}

}  // namespace

TEST_CASE("json round trips") {
  Rng rng(51);
  const CMatrix m = random_gaussian(rng, 3, 2);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  const RootedPolynomial p({{Complex(1, -2), 2}, {0.0, 1}});
  CHECK(polynomial_from_json(to_json(p)) == p);
  const auto pr = generate_lift_problem(rng, random_lift_spec(rng));
  const auto back = lift_problem_from_json(to_json(pr));
  CHECK(back.target == pr.target);
  CHECK(back.bound == pr.bound);
  CHECK(back.chain.size() == pr.chain.size());
  CHECK(to_json(back) == to_json(pr));
  // Row-major [re, im] layout.
  CHECK(matrix_to_json(mat({{1, Complex(0, 2)}})) == Json::parse("[[[1.0,0.0],[0.0,2.0]]]"));
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[[1,0]],[[1,0],[2,0]]]")), FormatError);
  CHECK_THROWS_AS(ideal_from_json(Json::parse("{\"support\":[0]}")), FormatError);
}

TEST_CASE("cli commands") {
  TempDir dir;
  std::ostringstream err;

  SUBCASE("non-algebraic input") {
    RunConfig cfg;
    cfg.command = Command::decompose;
    cfg.input_path = dir.write("t.json",
        R"({"T": [[[1,0],[0,0]],[[0,0],[3,0]]], "polynomial": {"factors":[{"root":[1,0],"mult":1}]}})");
    cfg.output_path = (dir.path / "out.json").string();
    CHECK(run(cfg, err) == kExitNumerical);
    CHECK(err.str().find("relation violated") != std::string::npos);
    CHECK(read_json(cfg.output_path)["exit_code"] == 3);
  }
  SUBCASE("radius with an empty ideal") {
    RunConfig cfg;
    cfg.command = Command::radius;
    cfg.input_path = dir.write("r.json",
        R"({"element":{"dims":[2],"blocks":[[[[0,0],[2,0]],[[0,0],[0,0]]]]},"ideal":[]})");
    cfg.output_path = (dir.path / "out.json").string();
    CHECK(run(cfg, err) == kExitOk);
    const Json rep = read_json(cfg.output_path);
    CHECK(rep["result"]["value"].get<double>() == doctest::Approx(2.0));
    CHECK(rep["input"]["fnv1a"].get<std::string>().size() == 16);
    CHECK(rep["tolerances"]["solver"].get<double>() == 1e-4);
  }
  SUBCASE("malformed json") {
    RunConfig cfg;
    cfg.command = Command::lift;
    cfg.input_path = dir.write("bad.json", "{\"algebra\": ");
    cfg.output_path = (dir.path / "out.json").string();
    CHECK(run(cfg, err) == kExitMalformedInput);
  }
  SUBCASE("gen feeds the other commands") {
    RunConfig gen;
    gen.command = Command::gen;
    gen.seed = 4;
    gen.dim = 6;
    gen.conditioning = 10.0;
    gen.output_path = (dir.path / "inst.json").string();
    REQUIRE(run(gen, err) == kExitOk);
    for (Command c : {Command::decompose, Command::approx}) {
      RunConfig cfg;
      cfg.command = c;
      cfg.input_path = gen.output_path;
      cfg.output_path = (dir.path / "out.json").string();
      CHECK(run(cfg, err) == kExitOk);
    }
    gen.kind = "lift";
    REQUIRE(run(gen, err) == kExitOk);
    RunConfig lift;
    lift.command = Command::lift;
    lift.input_path = gen.output_path;
    lift.output_path = (dir.path / "out.json").string();
    CHECK(run(lift, err) == kExitOk);
    CHECK(read_json(lift.output_path)["certificates"]["quotient_match"] == true);
  }
  SUBCASE("deterministic reports") {
    RunConfig cfg;
    cfg.command = Command::verify;
    cfg.seed = 9;
    cfg.cases = 3;
    cfg.output_path = (dir.path / "a.json").string();
    CHECK(run(cfg, err) == kExitOk);
    cfg.output_path = (dir.path / "b.json").string();
    CHECK(run(cfg, err) == kExitOk);
    CHECK(without_timing(read_json(dir.path / "a.json")) ==
          without_timing(read_json(dir.path / "b.json")));
  }
  SUBCASE("tolerance overrides") {
    Tolerances t = default_tolerances();
    apply_override(t, "relation", 1e-6);
    CHECK(t.at("relation") == 1e-6);
    CHECK_THROWS_AS(apply_override(t, "relation", 0.0), PreconditionError);
    CHECK_THROWS_AS(apply_override(t, "nonsense", 1.0), PreconditionError);
  }
}
