#pragma once

#include <vector>

#include "alglift/types.hpp"

// Dense helpers shared by the decomposition, radius and lifting modules.
namespace alglift::linalg {

/// Largest singular value (operator 2-norm). Zero for empty matrices.
double op_norm(const CMatrix& a);

/// Smallest singular value; zero for empty matrices.
double min_singular_value(const CMatrix& a);

/// 2-norm condition number; +inf when singular.
double condition_number(const CMatrix& a);

/// Eigenvalues of a square matrix. Throws NumericalError on solver failure.
CVector eigenvalues(const CMatrix& a);

/// Maximum eigenvalue modulus.
double spectral_radius(const CMatrix& a);

/// Orthonormal basis of range(basis)^perp inside C^n, n = basis.rows().
CMatrix orthogonal_complement(const CMatrix& basis);

/// Orthogonal projector onto the column span of an orthonormal basis.
CMatrix projector(const CMatrix& orthonormal_basis);

struct KernelResult {
  CMatrix basis;  // orthonormal columns spanning the numerical kernel
  double smallest_kept = 0.0;     // smallest singular value treated as nonzero
  double largest_dropped = 0.0;   // largest singular value treated as zero
};

/// Numerical kernel: right singular vectors whose singular values are
/// <= rank_tol. Throws ToleranceAmbiguity if any singular value lies in
/// the open band (rank_tol / 10, rank_tol * 10).
KernelResult kernel(const CMatrix& a, double rank_tol);

/// Complex Schur form T = U R U^*.
struct Schur {
  CMatrix U;
  CMatrix R;
};

Schur schur(const CMatrix& a);

/// Reorders an upper-triangular Schur form in place with Givens swaps so
/// that diagonal positions flagged by `leading` come first (relative order
/// within each group kept). Returns the number of leading positions.
int reorder_schur(Schur& s, std::vector<bool> leading);

/// Stable reordering of the Schur diagonal by non-decreasing key; `keys`
/// is permuted along with the diagonal.
void reorder_schur_by_key(Schur& s, std::vector<int>& keys);

/// Solves A Z - Z C = B for upper triangular A and C with disjoint spectra.
CMatrix solve_triangular_sylvester(const CMatrix& a, const CMatrix& c,
                                   const CMatrix& b);

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases. Returns pi/2 when the dimensions differ.
double max_principal_angle(const CMatrix& q1, const CMatrix& q2);

/// Orthonormal basis of the column space of `a` by SVD with relative
/// cutoff `rel_tol * sigma_max`.
CMatrix column_space(const CMatrix& a, double rel_tol);

}  // namespace alglift::linalg
