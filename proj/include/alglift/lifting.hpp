#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "alglift/blockalg.hpp"
#include "alglift/decomp.hpp"
#include "alglift/polynomial.hpp"
#include "alglift/radius.hpp"

namespace alglift {

/// Lift b in A/I_inf (blocks outside the chain's limit) to some A/I_n with
/// p(a) = 0 and ||a|| <= bound.
struct LiftProblem {
  BlockAlgebra algebra;
  IdealChain chain;
  BlockElement target;
  RootedPolynomial relation;
  double bound = 0.0;
};

/// Throws PreconditionError / RelationViolated when the problem's
/// invariants fail.
void validate(const LiftProblem& problem);

struct LiftCertificate {
  double relation_residual = 0.0;  // max_k ||p(a_k)|| / (1 + ||a_k||)^deg
  double norm_of_lift = 0.0;
  bool quotient_match = false;     // bit-exact on the surviving blocks
  double assembly_error = 0.0;     // ||b - (sum t_i P_i + S)|| on surviving blocks

  bool passes(double bound) const;
};

struct LiftReport {
  std::size_t stage_index = 0;            // 1-based stage n of the chain
  std::vector<std::size_t> lift_blocks;   // original indices of the blocks of `lift`
  BlockElement lift;                      // element of A/I_n
  int m = 0;                              // number of peeled roots
  RootedPolynomial relation;              // canonical order used for the lift
  std::vector<std::vector<CMatrix>> projections_used;  // per lift block: P_1..P_last
  LiftCertificate certificate;
};

/// Conjugates X by 1 + i, i in I, so that ||X~|| equals `target`, the norm
/// of X mod I. Requires spectral_radius(X) < target.
BlockElement conjugate_to_norm(const BlockElement& x, const IdealSpec& ideal, double target,
                               const RadiusOptions& opts = {});

/// Lift of a nilpotent x (x^n = 0, ||x|| <= C) from A/I to A, with
/// nilpotency and norm preserved. `seed`, when given, is an element of A
/// whose ideal blocks (each with seed_k^n = 0) replace the zero extension
/// before norm correction.
BlockElement lift_nilpotent(const BlockAlgebra& algebra, const BlockElement& x,
                            const IdealSpec& ideal, int n, double bound,
                            const std::optional<BlockElement>& seed = std::nullopt);

struct ProjectionLift {
  std::size_t stage_index = 0;           // 1-based
  std::vector<std::size_t> blocks;       // original indices of the A/I_n blocks
  std::vector<BlockElement> projections; // one per family member
};

/// Lifts orthogonal projections p_1, ..., p_r with sum 1 in A/I_inf to the
/// first admissible stage (>= min_stage, 1-based) of the chain. On blocks
/// freed by the stage, the whole rank goes to the last family member.
ProjectionLift lift_projection_family(const BlockAlgebra& algebra,
                                      const std::vector<BlockElement>& family,
                                      const IdealChain& chain, std::size_t min_stage = 1);

/// True iff a lift with p(a) = 0 and ||a|| <= bound exists at the given
/// 1-based stage, decided by trying each root's scalar on the freed blocks.
bool stage_feasible_brute_force(const LiftProblem& problem, std::size_t stage_index);

/// Semiprojective lifting: decompose b, lift the projections, lift the
/// corner by norm-correcting conjugation, assemble a = sum t_i P_i + S.
LiftReport lift_polynomial_contraction(const LiftProblem& problem, const RadiusOptions& opts = {});

struct Approximant {
  int requested = 0;
  int used = 0;  // requested dimension snapped down to a flag boundary
  CMatrix matrix;
  RootedPolynomial relation;  // induced by the labels of the included slots
};

struct ApproximantSet {
  TriangularForm form;
  std::vector<Approximant> items;
};

/// Leading principal compressions of the flag-basis form of T.
ApproximantSet finite_dim_approximants(const CMatrix& t, const RootedPolynomial& p,
                                       const std::vector<int>& dims);

/// ||(T_n + 0) e_j - R e_j|| for every flag-basis vector e_j.
std::vector<double> column_errors(const TriangularForm& form, const Approximant& approx);

}  // namespace alglift
