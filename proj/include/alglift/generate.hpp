#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "alglift/lifting.hpp"
#include "alglift/polynomial.hpp"

namespace alglift {

using Rng = std::mt19937_64;

/// Recipe for a matrix annihilated by a given polynomial.
struct InstanceSpec {
  int dim = 0;
  RootedPolynomial polynomial;
  double conditioning_bound = 1.0;
  /// Every root gets a Jordan chain of full length k_i (needs sum k_i <= dim).
  bool full_chains = true;
  /// The first `isolated_roots` roots (stored order) become orthogonal
  /// direct summands t_i 1 with no fill.
  int isolated_roots = 0;
  double fill_scale = 1.0;
};

/// T = G R G^{-1} with R block upper triangular, diagonal blocks
/// label_j * I of size flag_dims[j] in flag order, and cond(G) equal to the
/// conditioning bound.
struct GeneratedInstance {
  CMatrix T;
  CMatrix model;
  CMatrix G;
  RootedPolynomial polynomial;
  std::vector<int> flag_dims;
  std::vector<Complex> labels;
};

GeneratedInstance generate_instance(std::uint64_t seed, const InstanceSpec& spec);
GeneratedInstance generate_instance(Rng& rng, const InstanceSpec& spec);

CMatrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
CMatrix random_unitary(Rng& rng, Eigen::Index n);
/// U_1 diag(s) U_2 with s_1 = 1, s_n = cond and log-uniform values between.
CMatrix random_conditioned(Rng& rng, Eigen::Index n, double cond);

/// Canonically ordered polynomial with 1..max_distinct roots of modulus
/// <= max_modulus, pairwise at least min_separation apart, total degree
/// <= max_degree.
RootedPolynomial random_polynomial(Rng& rng, int max_degree, int max_distinct,
                                   double max_modulus = 3.0, double min_separation = 0.5);

/// G diag(I_r, 0) G^{-1} with cond(G) = cond.
CMatrix random_idempotent(Rng& rng, Eigen::Index n, Eigen::Index rank, double cond);

struct LiftSpec {
  std::vector<int> block_dims;
  std::vector<std::vector<std::size_t>> chain;  // 0-based supports
  RootedPolynomial polynomial;
  /// C = ||b|| * (1 + bound_slack); when the target is zero-dimensional the
  /// bound is drawn below the smallest root modulus to force late stages.
  double bound_slack = 0.0;
  double fill_scale = 1.0;
};

LiftProblem generate_lift_problem(Rng& rng, const LiftSpec& spec);

/// Random LiftSpec: K <= 4 blocks of size <= 4, chain length <= 5.
LiftSpec random_lift_spec(Rng& rng);

}  // namespace alglift
