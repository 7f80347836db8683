#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "alglift/blockalg.hpp"

namespace alglift {

struct EpsSchedule {
  double initial = 0.5;
  double ratio = 0.5;
  double floor = 1e-8;
};

struct RadiusOptions {
  int max_iter = 2000;
  /// Absolute accuracy goal, scaled by max(1, ||x||).
  double solver_tol = 1e-4;
  EpsSchedule eps_schedule;
  double max_condition = kMaxConjugationCondition;
  int line_search_steps = 48;
};

struct RadiusResult {
  double value = 0.0;
  double oracle = 0.0;
  BlockElement witness;  // i in I_S; the conjugator is 1 + i
  bool attained = false;
  bool converged = false;
  int iterations = 0;
  std::vector<std::pair<int, double>> history;  // best value so far
};

/// max(rho(x), ||x mod I||). Also computes max(||x mod I||, max_{k in S}
/// rho(x_k)) and throws NumericalError if the two differ by more than 1e-10.
double theoretical_min(const BlockElement& x, const IdealSpec& ideal);

/// G = D U^* with X = U R U^* a Schur form and D = diag(1, 1/eps,
/// 1/eps^2, ...), so that G X G^{-1} = D R D^{-1} has its (i, j) entry
/// scaled by eps^{j-i}. Requires 0 < eps < 1.
CMatrix schur_diagonal_schedule(const CMatrix& x, double eps);

/// ||G X G^{-1}|| for the schedule above, evaluated as ||D R D^{-1}||.
double schur_schedule_value(const CMatrix& x, double eps);

/// Invertible G with ||G X G^{-1}|| <= target, found by the eps schedule on
/// the Schur form, then (if the condition budget runs out first) on Schur
/// forms whose well-separated eigenvalue clusters have been decoupled by
/// Sylvester solves. G is normalized to smallest singular value 1.
struct BlockScaling {
  CMatrix G;
  double value = 0.0;  // ||G X G^{-1}|| as predicted from the scaled form
  double condition = 1.0;
  bool reached = false;
  int iterations = 0;
};

BlockScaling scale_block_to(const CMatrix& x, double target, const RadiusOptions& opts,
                            const std::function<void(double)>& on_eval = {});

/// Approximates inf ||(1+i) x (1+i)^{-1}|| over i in I_S.
RadiusResult min_similarity_norm(const BlockElement& x, const IdealSpec& ideal,
                                 const RadiusOptions& opts = {});

}  // namespace alglift
