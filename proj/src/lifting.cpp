#include "alglift/lifting.hpp"

#include <algorithm>
#include <cmath>

#include "alglift/linalg.hpp"

namespace alglift {

using linalg::op_norm;

namespace {

// Blocks of A/I_n that are free at stage n, as positions inside A/I_n.
std::vector<std::size_t> freed_positions(const std::vector<std::size_t>& stage_blocks,
                                         const IdealSpec& limit) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < stage_blocks.size(); ++j)
    if (limit.contains(stage_blocks[j])) out.push_back(j);
  return out;
}

double max_block_residual(const RootedPolynomial& p, const BlockElement& a) {
  double r = 0.0;
  for (const auto& b : a.blocks()) r = std::max(r, relation_residual(p, b));
  return r;
}

}  // namespace

void validate(const LiftProblem& problem) {
  problem.chain.check_against(problem.algebra);
  if (!(problem.bound >= 0.0)) throw PreconditionError("lift bound C must be >= 0");
  if (problem.relation.is_empty_product())
    throw PreconditionError("lift relation must have at least one factor");
  const auto surviving = problem.chain.limit().complement(problem.algebra.num_blocks());
  std::vector<int> dims;
  for (std::size_t k : surviving) dims.push_back(problem.algebra.dim(k));
  if (!(problem.target.algebra() == BlockAlgebra(dims)))
    throw PreconditionError("target must live on the blocks outside the chain's limit");
  for (const auto& b : problem.target.blocks()) require_relation(problem.relation, b);
  if (norm(problem.target) > problem.bound + 1e-10)
    throw PreconditionError("target norm exceeds the bound C");
}

bool LiftCertificate::passes(double bound) const {
  return quotient_match && relation_residual <= 1e-8 && norm_of_lift <= bound + 1e-6 &&
         assembly_error <= 1e-8 * (1.0 + norm_of_lift);
}

BlockElement conjugate_to_norm(const BlockElement& x, const IdealSpec& ideal, double target,
                               const RadiusOptions& opts) {
  ideal.check_against(x.algebra());
  const double qn = norm(quotient(x, ideal));
  if (std::abs(qn - target) > 1e-10 * (1.0 + target))
    throw PreconditionError("conjugate_to_norm: target differs from the quotient norm");
  const double margin = 1e-9 * (1.0 + target);
  const double rho = spectral_radius(x);
  if (target <= rho + margin)
    throw PreconditionError("conjugate_to_norm: requires spectral radius < target (rho = " +
                            std::to_string(rho) + ")");

  BlockElement witness = BlockElement::zero(x.algebra());
  for (std::size_t k : ideal.support()) {
    const CMatrix& xk = x.block(k);
    if (op_norm(xk) <= target) continue;
    const BlockScaling sc = scale_block_to(xk, target, opts);
    if (!sc.reached)
      throw NumericalError("conjugate_to_norm: could not reach the target norm in block " +
                           std::to_string(k + 1));
    witness.block(k) = sc.G - CMatrix::Identity(xk.rows(), xk.cols());
  }
  BlockElement out = conjugate(x, witness, ideal, opts.max_condition);
  const double achieved = norm(out);
  if (std::abs(achieved - target) > 1e-6)
    throw NumericalError("conjugate_to_norm: norm after conjugation is " +
                         std::to_string(achieved) + ", target " + std::to_string(target));
  return out;
}

BlockElement lift_nilpotent(const BlockAlgebra& algebra, const BlockElement& x,
                            const IdealSpec& ideal, int n, double bound,
                            const std::optional<BlockElement>& seed) {
  ideal.check_against(algebra);
  if (n < 1) throw PreconditionError("lift_nilpotent: nilpotency index must be >= 1");
  if (!(bound >= 0.0)) throw PreconditionError("lift_nilpotent: bound must be >= 0");
  const auto outside = ideal.complement(algebra.num_blocks());
  std::vector<int> qdims;
  for (std::size_t k : outside) qdims.push_back(algebra.dim(k));
  if (!(x.algebra() == BlockAlgebra(qdims)))
    throw PreconditionError("lift_nilpotent: x must live on the blocks outside the ideal");

  const RootedPolynomial monomial({{Complex(0.0), n}});
  for (const auto& b : x.blocks()) require_relation(monomial, b);
  const double xn = norm(x);
  if (xn > bound + 1e-10) throw PreconditionError("lift_nilpotent: ||x|| exceeds the bound");

  BlockElement lift = BlockElement::zero(algebra);
  if (bound == 0.0 || xn == 0.0) return lift;

  for (std::size_t j = 0; j < outside.size(); ++j) lift.block(outside[j]) = x.block(j);
  if (seed) {
    if (!(seed->algebra() == algebra)) throw PreconditionError("lift_nilpotent: seed algebra");
    for (std::size_t k : ideal.support()) {
      require_relation(monomial, seed->block(k));
      lift.block(k) = seed->block(k);
    }
  }
  if (norm(lift) > xn) lift = conjugate_to_norm(lift, ideal, xn);
  return lift;
}

ProjectionLift lift_projection_family(const BlockAlgebra& algebra,
                                      const std::vector<BlockElement>& family,
                                      const IdealChain& chain, std::size_t min_stage) {
  chain.check_against(algebra);
  if (family.empty()) throw PreconditionError("projection family is empty");
  if (min_stage < 1 || min_stage > chain.size())
    throw PreconditionError("lift_projection_family: stage out of range");
  const auto surviving = chain.limit().complement(algebra.num_blocks());
  for (const auto& p : family)
    if (p.num_blocks() != surviving.size())
      throw PreconditionError("projection family must live on the blocks outside the limit");

  for (std::size_t j = 0; j < surviving.size(); ++j) {
    const Eigen::Index d = algebra.dim(surviving[j]);
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < family.size(); ++i) {
      const CMatrix& p = family[i].block(j);
      if (p.rows() != d) throw PreconditionError("projection block has the wrong size");
      if (op_norm(p * p - p) > 1e-10 || op_norm(p - p.adjoint()) > 1e-10)
        throw PreconditionError("family member " + std::to_string(i + 1) +
                                " is not an orthogonal projection");
      for (std::size_t l = i + 1; l < family.size(); ++l)
        if (op_norm(p * family[l].block(j)) > 1e-10)
          throw PreconditionError("family members are not mutually orthogonal");
      sum += p;
    }
    if (op_norm(sum - CMatrix::Identity(d, d)) > 1e-10)
      throw PreconditionError("projection family does not sum to the identity");
  }

  // Every stage admits a lift in the block model; the first requested one is used.
  ProjectionLift out;
  out.stage_index = min_stage;
  const IdealSpec& stage = chain.stage(min_stage - 1);
  out.blocks = stage.complement(algebra.num_blocks());
  std::vector<int> dims;
  for (std::size_t k : out.blocks) dims.push_back(algebra.dim(k));
  const BlockAlgebra stage_algebra(dims);
  for (std::size_t i = 0; i < family.size(); ++i) {
    BlockElement lifted = BlockElement::zero(stage_algebra);
    std::size_t next_surviving = 0;
    for (std::size_t j = 0; j < out.blocks.size(); ++j) {
      if (chain.limit().contains(out.blocks[j])) {
        if (i + 1 == family.size()) lifted.block(j).setIdentity();
      } else {
        lifted.block(j) = family[i].block(next_surviving++);
      }
    }
    out.projections.push_back(std::move(lifted));
  }
  return out;
}

bool stage_feasible_brute_force(const LiftProblem& problem, std::size_t stage_index) {
  const auto blocks = problem.chain.stage(stage_index - 1).complement(problem.algebra.num_blocks());
  const auto freed = freed_positions(blocks, problem.chain.limit());
  if (freed.empty()) return true;
  for (const auto& f : problem.relation.factors()) {
    bool ok = true;
    for (std::size_t j : freed) {
      const int d = problem.algebra.dim(blocks[j]);
      const CMatrix candidate = f.root * CMatrix::Identity(d, d);
      ok = ok && relation_residual(problem.relation, candidate) <= 1e-8 &&
           op_norm(candidate) <= problem.bound + 1e-6;
    }
    if (ok) return true;
  }
  return false;
}

LiftReport lift_polynomial_contraction(const LiftProblem& problem, const RadiusOptions& opts) {
  validate(problem);
  const RootedPolynomial p = canonical_order(problem.relation);
  const std::size_t num_roots = p.size();
  const BlockElement& b = problem.target;

  const auto decs = structure_decomposition_blocks(b.blocks(), p);
  const std::size_t m = b.num_blocks() == 0 ? num_roots : static_cast<std::size_t>(decs.front().m);
  const RootedPolynomial residual = residual_after_peel(p, m);
  const bool has_corner = !residual.is_empty_product();
  double s_norm = 0.0;
  for (const auto& d : decs) s_norm = std::max(s_norm, op_norm(d.S));
  if (has_corner) {
    const double margin = default_strictness_margin(norm(b));
    if (!(s_norm > residual.max_root_modulus() + margin))
      throw ToleranceAmbiguity("corner norm does not exceed the remaining roots");
  }

  // Free blocks receive t_{m+1} 1 (corner) or t_N 1 (fully peeled).
  const Complex free_scalar = has_corner ? p.factors()[m].root : p.factors().back().root;
  std::size_t stage = 0;
  for (std::size_t n = 1; n <= problem.chain.size(); ++n) {
    const auto blocks = problem.chain.stage(n - 1).complement(problem.algebra.num_blocks());
    if (freed_positions(blocks, problem.chain.limit()).empty() || has_corner ||
        std::abs(free_scalar) <= problem.bound + 1e-6) {
      stage = n;
      break;
    }
  }
  if (stage == 0) throw PreconditionError("chain exhausted without an admissible stage");

  // Projection family on A/I_inf: P_1..P_m and, if present, the corner P_{m+1}.
  std::vector<BlockElement> family;
  const std::size_t members = has_corner ? m + 1 : m;
  for (std::size_t i = 0; i < members; ++i) {
    std::vector<CMatrix> blocks;
    for (const auto& d : decs)
      blocks.push_back(i < m ? d.peeled[i].projection : d.corner_projection);
    family.emplace_back(b.algebra(), std::move(blocks));
  }
  const ProjectionLift plift = lift_projection_family(problem.algebra, family, problem.chain, stage);
  const auto freed = freed_positions(plift.blocks, problem.chain.limit());
  const BlockAlgebra stage_algebra = plift.projections.front().algebra();

  // Corner lift: s on the surviving blocks, t_{m+1} 1 on the freed ones,
  // then conjugation by 1 + i with i supported on the freed blocks.
  BlockElement corner_lift = BlockElement::zero(stage_algebra);
  if (has_corner) {
    std::size_t next = 0;
    for (std::size_t j = 0; j < plift.blocks.size(); ++j) {
      if (problem.chain.limit().contains(plift.blocks[j]))
        corner_lift.block(j) = free_scalar * CMatrix::Identity(stage_algebra.dim(j), stage_algebra.dim(j));
      else
        corner_lift.block(j) = decs[next++].embedded_corner();
    }
    corner_lift = conjugate_to_norm(corner_lift, IdealSpec(freed), s_norm, opts);
  }

  LiftReport report;
  report.stage_index = stage;
  report.lift_blocks = plift.blocks;
  report.m = static_cast<int>(m);
  report.relation = p;
  std::vector<CMatrix> a_blocks;
  double assembly = 0.0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < plift.blocks.size(); ++j) {
    const Eigen::Index d = stage_algebra.dim(j);
    CMatrix assembled = corner_lift.block(j);
    std::vector<CMatrix> used;
    for (std::size_t i = 0; i < members; ++i) {
      const CMatrix& proj = plift.projections[i].block(j);
      used.push_back(proj);
      if (i < m) assembled += p.factors()[i].root * proj;
    }
    if (!has_corner && problem.chain.limit().contains(plift.blocks[j]))
      assembled = free_scalar * CMatrix::Identity(d, d);
    report.projections_used.push_back(std::move(used));
    if (problem.chain.limit().contains(plift.blocks[j])) {
      a_blocks.push_back(std::move(assembled));
    } else {
      // On surviving blocks the lift is b itself; the assembly is only audited.
      assembly = std::max(assembly, op_norm(b.block(next) - assembled));
      a_blocks.push_back(b.block(next++));
    }
  }
  report.lift = BlockElement(stage_algebra, std::move(a_blocks));

  auto& cert = report.certificate;
  cert.relation_residual = max_block_residual(p, report.lift);
  cert.norm_of_lift = norm(report.lift);
  cert.assembly_error = assembly;
  std::vector<std::size_t> surviving_positions;
  for (std::size_t j = 0; j < plift.blocks.size(); ++j)
    if (!problem.chain.limit().contains(plift.blocks[j])) surviving_positions.push_back(j);
  cert.quotient_match = restrict_blocks(report.lift, surviving_positions) == b;
  return report;
}

ApproximantSet finite_dim_approximants(const CMatrix& t, const RootedPolynomial& p,
                                       const std::vector<int>& dims) {
  const int n = static_cast<int>(t.rows());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 0 || dims[i] > n)
      throw PreconditionError("approximant dimension " + std::to_string(dims[i]) +
                              " outside [0, " + std::to_string(n) + "]");
    if (i > 0 && dims[i] <= dims[i - 1])
      throw PreconditionError("approximant dimensions must be increasing");
  }
  ApproximantSet out;
  out.form = upper_triangularize(t, p);
  const auto bounds = out.form.boundaries();
  for (int requested : dims) {
    Approximant a;
    a.requested = requested;
    a.used = 0;
    for (int bnd : bounds)
      if (bnd <= requested) a.used = std::max(a.used, bnd);
    a.matrix = out.form.R.topLeftCorner(a.used, a.used);
    std::vector<Factor> factors;
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      if (out.form.flag_dims[j] == 0 || bounds[j] > a.used) continue;
      const Complex label = out.form.diagonal_labels[j];
      auto it = std::find_if(factors.begin(), factors.end(),
                             [&](const Factor& f) { return f.root == label; });
      if (it == factors.end())
        factors.push_back({label, 1});
      else
        ++it->mult;
    }
    if (!factors.empty()) a.relation = RootedPolynomial(std::move(factors));
    out.items.push_back(std::move(a));
  }
  return out;
}

std::vector<double> column_errors(const TriangularForm& form, const Approximant& approx) {
  const Eigen::Index n = form.R.rows();
  std::vector<double> errs(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    CVector padded = CVector::Zero(n);
    if (j < approx.used) padded.head(approx.used) = approx.matrix.col(j);
    errs[static_cast<std::size_t>(j)] = (padded - form.R.col(j)).norm();
  }
  return errs;
}

}  // namespace alglift
