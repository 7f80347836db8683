#pragma once

#include <optional>
#include <vector>

#include "alglift/types.hpp"

namespace alglift {

/// One factor (x - root)^mult of a rooted polynomial.
struct Factor {
  Complex root;
  int mult = 1;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Monic polynomial p(x) = (x - t_N)^{k_N} ... (x - t_1)^{k_1}, stored as
/// the factor list t_1, ..., t_N. The stored order is the order in which
/// factors are applied by evaluate(); canonical_order() sorts by
/// non-increasing modulus.
///
/// A polynomial with no factors is the empty-product sentinel produced by
/// peeling every factor. It stands for "only the zero space satisfies the
/// relation", not for the constant 1.
class RootedPolynomial {
 public:
  RootedPolynomial() = default;

  /// Validates multiplicities (>= 1) and pairwise distinct roots.
  explicit RootedPolynomial(std::vector<Factor> factors);

  static RootedPolynomial empty_product() { return RootedPolynomial(); }

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool is_empty_product() const { return factors_.empty(); }
  int degree() const;
  double max_root_modulus() const;
  bool is_canonical() const;

  /// Coefficients of the monic expansion, highest degree first.
  std::vector<Complex> expand() const;

  friend bool operator==(const RootedPolynomial&, const RootedPolynomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Default clustering threshold 1e-8 * (1 + max |root|).
double default_cluster_tol(double max_root_modulus);

/// Roots of the polynomial with the given coefficients (highest degree
/// first) via companion-matrix eigenvalues, clustered by single linkage.
/// A non-positive cluster_tol selects the default threshold.
RootedPolynomial factor_from_coefficients(const std::vector<Complex>& coeffs,
                                          double cluster_tol = 0.0);

/// Stable sort by non-increasing modulus; ties by increasing principal
/// argument in (-pi, pi], then lexicographic on (re, im).
RootedPolynomial canonical_order(const RootedPolynomial& p);

/// (T - t_N)^{k_N} ... (T - t_1)^{k_1}, with (T - t_1)^{k_1} applied first.
/// The empty product evaluates to the identity.
CMatrix evaluate(const RootedPolynomial& p, const CMatrix& t);

/// Drops the first m factors: returns the factors t_{m+1}, ..., t_N.
RootedPolynomial residual_after_peel(const RootedPolynomial& p, std::size_t m);

/// Scale used by every "relation holds" check: (1 + norm)^degree.
double relation_scale(double norm, int degree);

}  // namespace alglift
