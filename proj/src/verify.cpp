#include "alglift/verify.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>

#include "alglift/decomp.hpp"
#include "alglift/generate.hpp"
#include "alglift/linalg.hpp"
#include "alglift/lifting.hpp"
#include "alglift/radius.hpp"

namespace alglift {

using linalg::op_norm;

Tolerances default_tolerances() {
  return {
      {"relation", 1e-8},        // scaled relation residuals
      {"reconstruction", 1e-8},  // relative to 1 + ||T||
      {"projection", 1e-10},     // idempotence, self-adjointness, sums
      {"subspace_angle", 1e-6},
      {"svd_oracle", 1e-7},
      {"radius", 1e-3},          // max(tol, tol ||x||) against the oracle
      {"attainment", 1e-4},
      {"solver", 1e-4},          // RadiusOptions::solver_tol
      {"max_condition", 1e12},   // RadiusOptions::max_condition
      {"schedule", 1e-2},        // whole-algebra schedule at eps = 1e-6
      {"lift_norm", 1e-6},
      {"nilpotent", 1e-10},
      {"norm_slack", 1e-10},
  };
}

void apply_override(Tolerances& tol, const std::string& name, double value) {
  auto it = tol.find(name);
  if (it == tol.end()) throw PreconditionError("unknown tolerance '" + name + "'");
  if (!(value > 0.0) || !std::isfinite(value))
    throw PreconditionError("tolerance '" + name + "' must be positive");
  it->second = value;
}

namespace {

constexpr std::size_t kMaxFailures = 8;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Collects the checks of one case.
class Case {
 public:
  Case(SuiteReport& report) : report_(report) {}

  void check(bool ok, const std::string& what) {
    if (!ok && reason_.empty()) reason_ = what;
  }
  void note(const std::string& metric, double value) {
    auto [it, fresh] = report_.worst.emplace(metric, value);
    if (!fresh) it->second = std::max(it->second, value);
  }
  // Records the metric and fails the case when it exceeds the limit.
  void bounded(const std::string& metric, double value, double limit) {
    note(metric, value);
    if (!(value <= limit)) {
      std::ostringstream os;
      os << metric << " = " << value << " > " << limit;
      check(false, os.str());
    }
  }
  const std::string& reason() const { return reason_; }

 private:
  SuiteReport& report_;
  std::string reason_;
};

using CaseFn = std::function<void(Rng&, const Tolerances&, Case&)>;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

std::vector<std::pair<double, double>> sorted_pairs(const std::vector<Complex>& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& z : v) out.emplace_back(z.real(), z.imag());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Complex> expand_labels(const std::vector<int>& dims, const std::vector<Complex>& labels) {
  std::vector<Complex> out;
  for (std::size_t j = 0; j < dims.size(); ++j)
    for (int i = 0; i < dims[j]; ++i) out.push_back(labels[j]);
  return out;
}

CMatrix random_nilpotent(Rng& rng, Eigen::Index d, double size) {
  if (d <= 1) return CMatrix::Zero(d, d);
  const CMatrix u = random_unitary(rng, d);
  CMatrix r = random_gaussian(rng, d, d).triangularView<Eigen::StrictlyUpper>();
  r *= size / op_norm(r);
  return u * r * u.adjoint();
}

// Leading k left singular vectors (k largest) or trailing k right singular
// vectors (k smallest) of a.
CMatrix leading_left(const CMatrix& a, Eigen::Index k) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(k);
}

CMatrix trailing_right(const CMatrix& a, Eigen::Index k) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k);
}

RadiusOptions radius_options(const Tolerances& tol) {
  RadiusOptions o;
  o.solver_tol = tol.at("solver");
  o.max_condition = tol.at("max_condition");
  return o;
}

// Random algebraic instance: dim <= max_dim, degree <= max_degree.
GeneratedInstance algebraic_instance(Rng& rng, int max_dim, int max_degree, double cond) {
  InstanceSpec spec;
  spec.dim = uniform_int(rng, 1, max_dim);
  spec.polynomial = random_polynomial(rng, max_degree, 3);
  spec.conditioning_bound = cond;
  spec.full_chains = spec.polynomial.degree() <= spec.dim && rng() % 2 == 0;
  spec.fill_scale = uniform(rng, 0.2, 1.0);
  return generate_instance(rng, spec);
}

// Generalized spectral radius formula.
void case_radius(Rng& rng, const Tolerances& tol, Case& c) {
  const int k = uniform_int(rng, 1, 4);
  std::vector<int> dims;
  std::vector<CMatrix> blocks;
  std::vector<std::size_t> support;
  for (int j = 0; j < k; ++j) {
    dims.push_back(uniform_int(rng, 1, 6));
    blocks.push_back(random_gaussian(rng, dims.back(), dims.back()));
    if (rng() % 2) support.push_back(static_cast<std::size_t>(j));
  }
  const BlockElement x(BlockAlgebra(dims), std::move(blocks));
  const IdealSpec s(support);
  const RadiusOptions opts = radius_options(tol);
  const RadiusResult r = min_similarity_norm(x, s, opts);

  const double nx = norm(x);
  const double lower = std::max(spectral_radius(x), norm(quotient(x, s)));
  const double allowed = std::max(tol.at("radius"), tol.at("radius") * nx);
  c.bounded("oracle_gap_relative", std::abs(r.value - lower) / allowed, 1.0);
  c.check(r.value >= lower - 1e-10, "value below the lower bound");
  c.bounded("witness_condition", conjugator_condition(r.witness), opts.max_condition);
  for (std::size_t j = 0; j < x.num_blocks(); ++j)
    if (!s.contains(j)) c.check(r.witness.block(j).norm() == 0.0, "witness leaves the ideal");

  const double q = norm(quotient(x, s));
  const double achieved = norm(conjugate(x, r.witness, s, opts.max_condition));
  c.bounded("witness_value_gap", std::abs(achieved - r.value), tol.at("attainment"));
  if (q > spectral_radius(x) + tol.at("radius")) {
    c.bounded("attainment_gap", std::abs(achieved - q), tol.at("attainment"));
    if (q > spectral_radius(x) + opts.solver_tol * std::max(1.0, nx))
      c.check(r.attained, "attainable case not reported as attained");
  }
}

// The ideal is the whole algebra: the schedule alone reaches rho.
void case_whole_algebra(Rng& rng, const Tolerances& tol, Case& c) {
  const CMatrix x = random_gaussian(rng, 6, 6);
  const double v = schur_schedule_value(x, 1e-6);
  const double rho = linalg::spectral_radius(x);
  const double allowed = std::max(tol.at("schedule"), tol.at("schedule") * op_norm(x));
  c.bounded("schedule_gap_relative", std::abs(v - rho) / allowed, 1.0);
}

// Triangular form and structure decomposition.
void case_structure(Rng& rng, const Tolerances& tol, Case& c) {
  const bool unitary = rng() % 2 == 0;
  const double cond = unitary ? 1.0 : log_uniform(rng, 1.0, 1e3);
  const auto inst = algebraic_instance(rng, 12, 5, cond);
  const double tn = op_norm(inst.T);

  const TriangularForm form = upper_triangularize(inst.T, inst.polynomial);
  const TriangularCertificate tc = certify(form, inst.T);
  c.bounded("unitarity", tc.unitarity_error, 1e-10);
  c.check(tc.below_block_max == 0.0, "nonzero entry below the block diagonal");
  c.bounded("diagonal_block", tc.diagonal_block_error, 1e-8);
  c.bounded("triangular_reconstruction", tc.reconstruction_error / (1 + tn), tol.at("reconstruction"));
  c.check(tc.dims_consistent, "flag dims do not sum to the dimension");

  const StructureDecomposition d = structure_decomposition(inst.T, inst.polynomial);
  const DecompositionCertificate dc = certify(d, inst.T);
  c.bounded("projection", dc.projection_error, tol.at("projection"));
  c.bounded("projection_sum", dc.sum_error, tol.at("projection"));
  c.bounded("orthogonality", dc.orthogonality_error, tol.at("projection"));
  c.bounded("residual_relation", dc.residual_relation, tol.at("relation"));
  c.check(dc.strictness_gap > default_strictness_margin(tn), "corner norm not strictly above");
  c.bounded("decomposition_reconstruction", dc.reconstruction_error / (1 + tn),
            tol.at("reconstruction"));

  if (unitary)
    c.check(sorted_pairs(expand_labels(form.flag_dims, form.diagonal_labels)) ==
                sorted_pairs(expand_labels(inst.flag_dims, inst.labels)),
            "diagonal labels differ from the ground truth");
}

// Range projections of idempotents.
void case_idempotent(Rng& rng, const Tolerances& tol, Case& c) {
  const int n = uniform_int(rng, 1, 10);
  const int r = uniform_int(rng, 0, std::min(5, n));
  const CMatrix b = random_idempotent(rng, n, r, log_uniform(rng, 1.0, 1e3));
  const CMatrix p = range_projection(b);
  const double bn = op_norm(b);
  c.bounded("idempotence", op_norm(p * p - p), tol.at("projection"));
  c.bounded("self_adjointness", op_norm(p - p.adjoint()), tol.at("projection"));
  c.bounded("range_containment", op_norm(p * b - b) / (1 + bn), tol.at("reconstruction"));
  c.check(std::lround(p.trace().real()) == r, "rank of P differs from rank of b");
  const CMatrix u = leading_left(b, r);
  c.bounded("svd_oracle", op_norm(p - u * u.adjoint()), tol.at("svd_oracle"));
}

// Riesz idempotents against generalized eigenspaces.
void case_spectral_idempotent(Rng& rng, const Tolerances& tol, Case& c) {
  InstanceSpec spec;
  spec.polynomial = random_polynomial(rng, 5, 4);
  spec.dim = uniform_int(rng, 1, 8);
  spec.conditioning_bound = log_uniform(rng, 1.0, 10.0);
  spec.full_chains = false;
  spec.fill_scale = uniform(rng, 0.2, 1.0);
  // Every third case leaves the last root out of the spectrum.
  RootedPolynomial full = spec.polynomial;
  if (rng() % 3 == 0 && full.size() >= 2) {
    std::vector<Factor> fs = full.factors();
    fs.pop_back();
    spec.polynomial = RootedPolynomial(fs);
  }
  const auto inst = generate_instance(rng, spec);
  const Eigen::Index n = inst.T.rows();
  const double scale = 1 + op_norm(inst.T);

  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& f : full.factors()) {
    int gt = 0;
    for (std::size_t j = 0; j < inst.labels.size(); ++j)
      if (inst.labels[j] == f.root) gt += inst.flag_dims[j];
    const CMatrix q = spectral_idempotent(inst.T, f.root, full);
    sum += q;
    if (gt == 0) {
      c.check(q.norm() == 0.0, "absent root with a nonzero idempotent");
      c.note("empty_eigenspaces", 1.0);
      continue;
    }
    c.bounded("idempotence", op_norm(q * q - q) / scale, tol.at("relation"));
    c.bounded("commutation", op_norm(q * inst.T - inst.T * q) / scale, tol.at("relation"));
    CMatrix power = CMatrix::Identity(n, n);
    for (int k = 0; k < f.mult; ++k) power = (inst.T - f.root * CMatrix::Identity(n, n)) * power;
    const double angle =
        linalg::max_principal_angle(leading_left(q, gt), trailing_right(power, gt));
    c.bounded("subspace_angle", angle, tol.at("subspace_angle"));
  }
  c.bounded("idempotent_sum", op_norm(sum - CMatrix::Identity(n, n)), tol.at("relation"));
}

// Projective lifting of nilpotents with adversarial free blocks.
void case_nilpotent(Rng& rng, const Tolerances& tol, Case& c) {
  const int k = uniform_int(rng, 2, 4);
  std::vector<int> dims;
  for (int j = 0; j < k; ++j) dims.push_back(uniform_int(rng, 1, 4));
  const int n = *std::max_element(dims.begin(), dims.end());
  std::vector<std::size_t> support;
  for (int j = 1; j < k; ++j)
    if (j == 1 || rng() % 2) support.push_back(static_cast<std::size_t>(j));
  const BlockAlgebra alg(dims);
  const IdealSpec s(support);
  const auto outside = s.complement(alg.num_blocks());

  std::vector<int> qdims;
  std::vector<CMatrix> qblocks;
  for (std::size_t j : outside) {
    qdims.push_back(dims[j]);
    qblocks.push_back(random_nilpotent(rng, dims[j], uniform(rng, 0.5, 2.0)));
  }
  const BlockElement x(BlockAlgebra(qdims), std::move(qblocks));
  const double xn = norm(x);
  const double bound = xn * (1 + uniform(rng, 0.0, 0.5));

  BlockElement seed = BlockElement::zero(alg);
  bool first = true;
  for (std::size_t j : support) {
    const double size = first ? 10.0 * xn : uniform(rng, 0.0, 10.0) * xn;
    seed.block(j) = random_nilpotent(rng, dims[j], size);
    first = false;
  }
  c.note("initial_norm_ratio", xn > 0 ? norm(seed) / xn : 0.0);

  const BlockElement lift = lift_nilpotent(alg, x, s, n, bound, seed);
  for (const auto& b : lift.blocks()) {
    CMatrix p = CMatrix::Identity(b.rows(), b.cols());
    for (int i = 0; i < n; ++i) p = b * p;
    c.bounded("nilpotency", op_norm(p) / std::pow(1 + op_norm(b), n), tol.at("nilpotent"));
  }
  std::vector<std::size_t> positions(outside.begin(), outside.end());
  c.check(restrict_blocks(lift, positions) == x, "lift does not restrict to x");
  c.bounded("norm_gap", std::abs(norm(lift) - xn), tol.at("lift_norm"));
}

// Polynomial lifting over ideal chains, with stage minimality.
void case_lifting(Rng& rng, const Tolerances& tol, Case& c) {
  const LiftProblem pr = generate_lift_problem(rng, random_lift_spec(rng));
  const LiftReport r = lift_polynomial_contraction(pr, radius_options(tol));
  const auto& cert = r.certificate;
  c.check(cert.quotient_match, "lift does not restrict to the target");
  c.bounded("relation_residual", cert.relation_residual, tol.at("relation"));
  c.bounded("norm_excess", std::max(0.0, cert.norm_of_lift - pr.bound), tol.at("lift_norm"));
  c.note("assembly_error", cert.assembly_error);
  c.note("stage_index", static_cast<double>(r.stage_index));
  std::size_t minimal = 0;
  for (std::size_t n = 1; n <= pr.chain.size() && minimal == 0; ++n)
    if (stage_feasible_brute_force(pr, n)) minimal = n;
  c.check(r.stage_index == minimal, "stage index is not the minimal feasible stage");
}

// Flag-prefix approximants.
void case_approximants(Rng& rng, const Tolerances& tol, Case& c) {
  const auto inst = algebraic_instance(rng, 10, 5, log_uniform(rng, 1.0, 1e2));
  const int n = static_cast<int>(inst.T.rows());
  std::vector<int> dims(static_cast<std::size_t>(n));
  for (int d = 1; d <= n; ++d) dims[static_cast<std::size_t>(d - 1)] = d;
  const ApproximantSet set = finite_dim_approximants(inst.T, inst.polynomial, dims);
  const double tn = op_norm(inst.T);

  std::vector<double> prev;
  bool separated = false;
  for (const auto& a : set.items) {
    c.check(a.used <= a.requested, "approximant larger than requested");
    if (a.used > 0) {
      c.bounded("relation_residual", relation_residual(a.relation, a.matrix), tol.at("relation"));
      c.bounded("norm_excess", std::max(0.0, op_norm(a.matrix) - tn), tol.at("norm_slack"));
      separated = separated || a.matrix.norm() > 0.0;
    }
    const auto err = column_errors(set.form, a);
    for (std::size_t j = 0; j < err.size() && !prev.empty(); ++j)
      c.check(err[j] <= prev[j] + 1e-12, "column error increased with n");
    prev = err;
  }
  const Approximant& last = set.items.back();
  c.bounded("final_reconstruction",
            op_norm(set.form.U * last.matrix * set.form.U.adjoint() - inst.T) / (1 + tn),
            tol.at("reconstruction"));
  c.check(tn == 0.0 || separated, "no nonzero approximant for T != 0");
}

struct SuiteDef {
  const char* name;
  int cases;
  CaseFn fn;
};

const std::vector<SuiteDef>& suites() {
  static const std::vector<SuiteDef> defs = {
      {"approximants", 50, case_approximants},
      {"idempotent", 100, case_idempotent},
      {"lifting", 100, case_lifting},
      {"nilpotent", 100, case_nilpotent},
      {"radius", 200, case_radius},
      {"spectral_idempotent", 100, case_spectral_idempotent},
      {"structure", 200, case_structure},
      {"whole_algebra", 100, case_whole_algebra},
  };
  return defs;
}

const SuiteDef& find_suite(const std::string& name) {
  for (const auto& s : suites())
    if (name == s.name) return s;
  throw PreconditionError("unknown suite '" + name + "'");
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& s : suites()) out.emplace_back(s.name);
  return out;
}

int default_case_count(const std::string& suite) { return find_suite(suite).cases; }

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  const SuiteDef& def = find_suite(name);
  SuiteReport report;
  report.name = name;
  report.seed = opts.seed ^ fnv1a(name);
  report.cases = opts.cases > 0 ? opts.cases : def.cases;
  Rng rng(report.seed);

  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < report.cases; ++i) {
    // Each case draws from its own stream so a failure cannot shift later cases.
    Rng case_rng(rng());
    Case c(report);
    try {
      def.fn(case_rng, opts.tol, c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    if (c.reason().empty()) {
      ++report.passed;
    } else if (report.failures.size() < kMaxFailures) {
      report.failures.push_back("case " + std::to_string(i) + ": " + c.reason());
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<SuiteReport> run_verify(const VerifyOptions& opts) {
  std::vector<std::string> names = opts.suites.empty() ? suite_names() : opts.suites;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  for (const auto& n : names) find_suite(n);

  std::vector<std::future<SuiteReport>> jobs;
  for (const auto& n : names)
    jobs.push_back(std::async(std::launch::async, [&opts, n] { return run_suite(n, opts); }));
  std::vector<SuiteReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

Json to_json(const SuiteReport& r, bool with_timing) {
  Json j = {{"name", r.name},         {"seed", r.seed},     {"cases", r.cases},
            {"passed", r.passed},     {"ok", r.ok()},       {"failures", r.failures},
            {"worst", r.worst}};
  if (with_timing) j["seconds"] = r.seconds;
  return j;
}

}  // namespace alglift
