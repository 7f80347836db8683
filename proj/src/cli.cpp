#include "alglift/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "alglift/decomp.hpp"
#include "alglift/generate.hpp"
#include "alglift/linalg.hpp"
#include "alglift/lifting.hpp"
#include "alglift/radius.hpp"
#include "alglift/serialize.hpp"

namespace alglift {

std::string command_name(Command c) {
  switch (c) {
    case Command::gen: return "gen";
    case Command::decompose: return "decompose";
    case Command::radius: return "radius";
    case Command::lift: return "lift";
    case Command::approx: return "approx";
    case Command::verify: return "verify";
  }
  return "unknown";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

using linalg::op_norm;

struct Outcome {
  Json result;
  Json certificates = Json::object();  // name -> bool
};

bool all_pass(const Json& certs) {
  return std::all_of(certs.begin(), certs.end(), [](const Json& v) { return v.get<bool>(); });
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("input lacks field \"") + key + "\"");
  return j.at(key);
}

Outcome do_gen(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  Outcome out;
  if (cfg.kind == "instance") {
    InstanceSpec spec;
    spec.dim = cfg.dim;
    spec.polynomial = random_polynomial(rng, cfg.degree, 3);
    spec.conditioning_bound = cfg.conditioning;
    spec.full_chains = spec.polynomial.degree() <= spec.dim;
    const auto inst = generate_instance(rng, spec);
    Json labels = Json::array();
    for (const auto& z : inst.labels) labels.push_back(complex_to_json(z));
    out.result = {{"T", matrix_to_json(inst.T)},
                  {"polynomial", to_json(inst.polynomial)},
                  {"flag_dims", inst.flag_dims},
                  {"labels", labels},
                  {"conditioning_bound", spec.conditioning_bound}};
    out.certificates["relation"] =
        relation_residual(inst.polynomial, inst.T) <= cfg.tolerances.at("relation");
  } else if (cfg.kind == "lift") {
    const LiftProblem pr = generate_lift_problem(rng, random_lift_spec(rng));
    out.result = to_json(pr);
    validate(pr);
    out.certificates["valid"] = true;
  } else if (cfg.kind == "radius") {
    std::vector<int> dims;
    std::vector<CMatrix> blocks;
    std::vector<std::size_t> support;
    const int k = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < k; ++j) {
      dims.push_back(1 + static_cast<int>(rng() % static_cast<unsigned>(std::max(1, cfg.dim))));
      blocks.push_back(random_gaussian(rng, dims.back(), dims.back()));
      if (rng() % 2) support.push_back(static_cast<std::size_t>(j));
    }
    out.result = {{"element", to_json(BlockElement(BlockAlgebra(dims), std::move(blocks)))},
                  {"ideal", to_json(IdealSpec(support))}};
  } else {
    throw PreconditionError("unknown instance kind '" + cfg.kind + "'");
  }
  return out;
}

Outcome do_decompose(const RunConfig& cfg, const Json& in) {
  const CMatrix t = matrix_from_json(field(in, "T"));
  const RootedPolynomial p = canonical_order(polynomial_from_json(field(in, "polynomial")));
  const double tn = op_norm(t);
  const double margin = in.contains("strictness_margin") ? in.at("strictness_margin").get<double>()
                                                         : default_strictness_margin(tn);
  const auto& tol = cfg.tolerances;

  const TriangularForm form = upper_triangularize(t, p);
  const TriangularCertificate tc = certify(form, t);
  const StructureDecomposition d = structure_decomposition(t, p, margin);
  const DecompositionCertificate dc = certify(d, t);

  Outcome out;
  out.result = {{"triangular_form", to_json(form)},
                {"structure_decomposition", to_json(d)},
                {"triangular_certificate",
                 {{"unitarity_error", tc.unitarity_error},
                  {"below_block_max", tc.below_block_max},
                  {"diagonal_block_error", tc.diagonal_block_error},
                  {"reconstruction_error", tc.reconstruction_error}}},
                {"decomposition_certificate",
                 {{"projection_error", dc.projection_error},
                  {"sum_error", dc.sum_error},
                  {"orthogonality_error", dc.orthogonality_error},
                  {"residual_relation", dc.residual_relation},
                  {"strictness_gap", std::isfinite(dc.strictness_gap) ? Json(dc.strictness_gap)
                                                                       : Json(nullptr)},
                  {"reconstruction_error", dc.reconstruction_error}}}};
  auto& c = out.certificates;
  c["triangular_unitary"] = tc.unitarity_error <= 1e-10;
  c["triangular_shape"] = tc.dims_consistent && tc.below_block_max == 0.0 &&
                          tc.diagonal_block_error <= 1e-8;
  c["triangular_reconstruction"] = tc.reconstruction_error <= tol.at("reconstruction") * (1 + tn);
  c["projections"] = dc.projection_error <= tol.at("projection") &&
                     dc.sum_error <= tol.at("projection") &&
                     dc.orthogonality_error <= tol.at("projection");
  c["residual_relation"] = dc.residual_relation <= tol.at("relation");
  c["strictness"] = dc.strictness_gap > margin;
  c["decomposition_reconstruction"] = dc.reconstruction_error <= tol.at("reconstruction") * (1 + tn);
  return out;
}

Outcome do_radius(const RunConfig& cfg, const Json& in) {
  const BlockElement x = element_from_json(field(in, "element"));
  const IdealSpec s = ideal_from_json(field(in, "ideal"));
  RadiusOptions opts;
  opts.solver_tol = cfg.tolerances.at("solver");
  opts.max_condition = cfg.tolerances.at("max_condition");
  const RadiusResult r = min_similarity_norm(x, s, opts);

  Outcome out;
  out.result = to_json(r);
  const double nx = norm(x);
  const double allowed = std::max(cfg.tolerances.at("radius"), cfg.tolerances.at("radius") * nx);
  out.certificates["lower_bound"] = r.value >= r.oracle - 1e-10;
  out.certificates["oracle_gap"] = std::abs(r.value - r.oracle) <= allowed;
  out.certificates["witness_condition"] = conjugator_condition(r.witness) <= opts.max_condition;
  return out;
}

Outcome do_lift(const RunConfig& cfg, const Json& in) {
  const LiftProblem pr = lift_problem_from_json(in);
  RadiusOptions opts;
  opts.solver_tol = cfg.tolerances.at("solver");
  opts.max_condition = cfg.tolerances.at("max_condition");
  const LiftReport r = lift_polynomial_contraction(pr, opts);
  Outcome out;
  out.result = to_json(r);
  const auto& cert = r.certificate;
  out.certificates["quotient_match"] = cert.quotient_match;
  out.certificates["relation"] = cert.relation_residual <= cfg.tolerances.at("relation");
  out.certificates["norm"] = cert.norm_of_lift <= pr.bound + cfg.tolerances.at("lift_norm");
  return out;
}

Outcome do_approx(const RunConfig& cfg, const Json& in) {
  const CMatrix t = matrix_from_json(field(in, "T"));
  const RootedPolynomial p = polynomial_from_json(field(in, "polynomial"));
  std::vector<int> dims;
  if (in.contains("dims")) {
    dims = in.at("dims").get<std::vector<int>>();
  } else {
    for (int d = 1; d <= t.rows(); ++d) dims.push_back(d);
  }
  const ApproximantSet set = finite_dim_approximants(t, p, dims);
  const double tn = op_norm(t);

  Outcome out;
  Json items = Json::array();
  bool relations = true, norms = true;
  for (const auto& a : set.items) {
    const double res = a.used > 0 ? relation_residual(a.relation, a.matrix) : 0.0;
    const double an = a.used > 0 ? op_norm(a.matrix) : 0.0;
    relations = relations && res <= cfg.tolerances.at("relation");
    norms = norms && an <= tn + cfg.tolerances.at("norm_slack");
    const auto err = column_errors(set.form, a);
    items.push_back({{"requested", a.requested},
                     {"used", a.used},
                     {"adjusted", a.used != a.requested},
                     {"matrix", matrix_to_json(a.matrix)},
                     {"relation", to_json(a.relation)},
                     {"relation_residual", res},
                     {"norm", an},
                     {"max_column_error", err.empty() ? 0.0 : *std::max_element(err.begin(), err.end())}});
  }
  out.result = {{"form", to_json(set.form)}, {"approximants", items}};
  out.certificates["relations"] = relations;
  out.certificates["norms"] = norms;
  return out;
}

Outcome do_verify(const RunConfig& cfg) {
  VerifyOptions opts;
  opts.seed = cfg.seed;
  opts.suites = cfg.suites;
  opts.cases = cfg.cases;
  opts.tol = cfg.tolerances;
  Outcome out;
  out.result = Json::object();
  for (const auto& r : run_verify(opts)) {
    out.result[r.name] = to_json(r);
    out.certificates[r.name] = r.ok();
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit(const RunConfig& cfg, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + cfg.output_path);
  f << text;
}

bool needs_input(Command c) {
  return c == Command::decompose || c == Command::radius || c == Command::lift ||
         c == Command::approx;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Json report = {{"command", command_name(cfg.command)},
                 {"seed", cfg.seed},
                 {"tolerances", cfg.tolerances},
                 {"input", nullptr}};
  int code = kExitOk;
  try {
    Json in;
    if (needs_input(cfg.command)) {
      if (cfg.input_path.empty()) throw FormatError("--input is required");
      const std::string bytes = read_file(cfg.input_path);
      report["input"] = {{"path", cfg.input_path}, {"fnv1a", fnv1a_hex(bytes)}};
      try {
        in = Json::parse(bytes);
        // A report from `gen` can be fed back directly.
        if (in.is_object() && in.value("command", "") == "gen" && in.contains("result"))
          in = Json(in.at("result"));
      } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
      }
    }
    Outcome out;
    try {
      switch (cfg.command) {
        case Command::gen: out = do_gen(cfg); break;
        case Command::decompose: out = do_decompose(cfg, in); break;
        case Command::radius: out = do_radius(cfg, in); break;
        case Command::lift: out = do_lift(cfg, in); break;
        case Command::approx: out = do_approx(cfg, in); break;
        case Command::verify: out = do_verify(cfg); break;
      }
    } catch (const Json::exception& e) {
      throw FormatError(std::string("bad input field: ") + e.what());
    }
    report["result"] = out.result;
    report["certificates"] = out.certificates;
    report["ok"] = all_pass(out.certificates);
    if (!report["ok"].get<bool>()) {
      code = kExitCertificateFailed;
      for (const auto& [name, pass] : out.certificates.items())
        if (!pass.get<bool>()) err << "certificate failed: " << name << "\n";
    }
  } catch (const FormatError& e) {
    code = kExitMalformedInput;
    report["error"] = {{"kind", "malformed input"}, {"message", e.what()}};
  } catch (const PreconditionError& e) {
    code = kExitMalformedInput;
    report["error"] = {{"kind", "invalid input"}, {"message", e.what()}};
  } catch (const RelationViolated& e) {
    code = kExitNumerical;
    report["error"] = {{"kind", "relation violated"}, {"message", e.what()}};
  } catch (const Error& e) {
    code = kExitNumerical;
    report["error"] = {{"kind", "numerical"}, {"message", e.what()}};
  }
  if (report.contains("error")) {
    report["ok"] = false;
    err << "error: " << report["error"]["message"].get<std::string>() << "\n";
  }
  report["exit_code"] = code;
  report["timing"] = {
      {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  try {
    emit(cfg, report);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    if (code == kExitOk) code = kExitCertificateFailed;
  }
  return code;
}

namespace {

std::string env_tolerance_name(const std::string& name) {
  std::string out = "ALGLIFT_TOL_";
  for (char ch : name) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  return out;
}

double parse_positive(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("cannot parse " + what + " value '" + text + "'");
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  RunConfig cfg;

  // --tol.<name>=<value> is not expressible as a fixed CLI11 option; pull
  // those out first. Environment values apply before flags.
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> tol_flags;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--tol.", 0) == 0) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) {
        std::cerr << "expected --tol.<name>=<value>, got " << a << "\n";
        return kExitMalformedInput;
      }
      tol_flags.emplace_back(a.substr(6, eq - 6), a.substr(eq + 1));
    } else {
      args.push_back(a);
    }
  }
  try {
    for (const auto& [name, value] : default_tolerances())
      if (const char* env = std::getenv(env_tolerance_name(name).c_str()))
        apply_override(cfg.tolerances, name, parse_positive(env, name));
    for (const auto& [name, value] : tol_flags)
      apply_override(cfg.tolerances, name, parse_positive(value, name));
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitMalformedInput;
  }

  CLI::App app{"Algebraic-relation lifting and canonical forms for matrices"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Seed for generators and verification")->envname("ALGLIFT_SEED");
  app.add_option("--input", cfg.input_path, "Input JSON file")->envname("ALGLIFT_INPUT");
  app.add_option("--output", cfg.output_path, "Report path (default: stdout)")->envname("ALGLIFT_OUTPUT");

  auto* gen = app.add_subcommand("gen", "Generate a seeded random instance");
  gen->add_option("--kind", cfg.kind, "instance | lift | radius")
      ->check(CLI::IsMember({"instance", "lift", "radius"}));
  gen->add_option("--dim", cfg.dim, "Matrix dimension")->check(CLI::PositiveNumber);
  gen->add_option("--degree", cfg.degree, "Maximal polynomial degree")->check(CLI::PositiveNumber);
  gen->add_option("--cond", cfg.conditioning, "Condition number of the similarity")
      ->check(CLI::Range(1.0, 1e8));
  app.add_subcommand("decompose", "Triangular form and structure decomposition of T");
  app.add_subcommand("radius", "Minimize the similarity norm over an ideal");
  app.add_subcommand("lift", "Lift a polynomial contraction across an ideal chain");
  app.add_subcommand("approx", "Flag-prefix finite-dimensional approximants");
  auto* verify = app.add_subcommand("verify", "Run the verification suites");
  verify->add_option("--suite", cfg.suites, "Suite name (repeatable; default: all)")
      ->envname("ALGLIFT_SUITE")
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--cases", cfg.cases, "Cases per suite (default: the suite's own count)")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitMalformedInput;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  for (Command c : {Command::gen, Command::decompose, Command::radius, Command::lift,
                    Command::approx, Command::verify})
    if (command_name(c) == name) cfg.command = c;
  return run(cfg, std::cerr);
}

}  // namespace alglift
