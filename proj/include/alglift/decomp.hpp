#pragma once

#include <optional>
#include <vector>

#include "alglift/polynomial.hpp"
#include "alglift/types.hpp"

namespace alglift {

/// Relative residual ||p(T)|| / (1 + ||T||)^deg.
double relation_residual(const RootedPolynomial& p, const CMatrix& t);

/// Throws RelationViolated unless relation_residual(p, T) <= tol.
void require_relation(const RootedPolynomial& p, const CMatrix& t, double tol = 1e-8);

/// 1e-8 * max(1, ||T||) * dim(T).
double default_rank_tol(const CMatrix& t);

/// Orthonormal bases of the successive flag increments H_1, H_2, ... built
/// from kernels of the growing factor products (T - t_1), (T - t_1)^2, ...,
/// (T - t_2)(T - t_1)^{k_1}, ... in the stored factor order. Slots may be
/// zero-dimensional.
struct KernelFlag {
  std::vector<CMatrix> bases;
  std::vector<int> flag_dims;
  std::vector<Complex> labels;  // label of each slot: t_i repeated k_i times
};

/// A non-positive rank_tol selects default_rank_tol(T).
KernelFlag nested_kernel_flag(const CMatrix& t, const RootedPolynomial& p, double rank_tol = 0.0);

/// T = U R U^* with R upper triangular, scalar diagonal blocks label_j * I
/// of size flag_dims[j], and zero below the block diagonal.
struct TriangularForm {
  CMatrix U;
  CMatrix R;
  std::vector<int> flag_dims;
  std::vector<Complex> diagonal_labels;

  /// Offsets of the flag blocks: boundaries()[j] = d_1 + ... + d_j.
  std::vector<int> boundaries() const;
};

TriangularForm upper_triangularize(const CMatrix& t, const RootedPolynomial& p,
                                   double rank_tol = 0.0);

/// Measured invariant errors of a triangular form against its source.
struct TriangularCertificate {
  double unitarity_error = 0.0;       // ||U^*U - I||
  double below_block_max = 0.0;       // largest |R_ij| below the block diagonal
  double diagonal_block_error = 0.0;  // max_j ||R_jj - label_j I|| / (1 + |label_j|)
  double reconstruction_error = 0.0;  // ||U R U^* - T||
  bool dims_consistent = false;       // sum d_j == dim(T)

  /// Thresholds from the form's contract; reconstruction is scaled by 1 + ||T||.
  bool passes(double t_norm) const;
};

TriangularCertificate certify(const TriangularForm& form, const CMatrix& t);

/// Orthogonal projection onto range(b) for an idempotent b, computed as the
/// spectral function of b b^* that is 1 on [1/2, inf) and 0 below.
CMatrix range_projection(const CMatrix& b);

/// Riesz idempotent of T at one root of p: Schur reordering followed by a
/// triangular Sylvester solve. Zero when the root is not in the spectrum.
CMatrix spectral_idempotent(const CMatrix& t, const Complex& root, const RootedPolynomial& p);

/// True iff row 1 and column 1 of A vanish off the diagonal up to
/// sqrt(2 tol ||A||). Requires |A_11| >= ||A|| - tol.
bool corner_zero_check(const CMatrix& a, double tol);

struct PeeledRoot {
  Complex root;
  CMatrix projection;
};

/// T = t_1 P_1 + ... + t_m P_m + S, with S living on the range of the
/// corner projection P_{m+1}.
struct StructureDecomposition {
  int m = 0;
  std::vector<PeeledRoot> peeled;
  CMatrix corner_projection;
  CMatrix corner_basis;  // orthonormal basis W of range(P_{m+1})
  CMatrix S;             // W^* T W; empty when m == N
  RootedPolynomial residual;

  bool has_corner() const { return !residual.is_empty_product(); }
  /// W S W^*, as an operator on the full space.
  CMatrix embedded_corner() const;
  /// sum_i t_i P_i + W S W^*.
  CMatrix reconstruct() const;
};

/// 1e-6 * (1 + ||T||).
double default_strictness_margin(double t_norm);

/// A negative strictness_margin selects the default.
StructureDecomposition structure_decomposition(const CMatrix& t, const RootedPolynomial& p,
                                               double strictness_margin = -1.0);

/// Peeling of a direct sum T_1 + ... + T_K as one operator: the norm test
/// uses the max over blocks, and each block is split independently. The
/// returned decompositions share m and the residual polynomial.
std::vector<StructureDecomposition> structure_decomposition_blocks(
    const std::vector<CMatrix>& blocks, const RootedPolynomial& p,
    double strictness_margin = -1.0);

struct DecompositionCertificate {
  double projection_error = 0.0;   // max ||P^2 - P||, ||P - P^*||
  double sum_error = 0.0;          // ||sum P_i - I||
  double orthogonality_error = 0.0;
  double residual_relation = 0.0;  // relation_residual(residual, S)
  double strictness_gap = 0.0;     // min over unpeeled roots of ||S|| - |t_i| (inf if none)
  double reconstruction_error = 0.0;

  bool passes(double t_norm, double strictness_margin) const;
};

DecompositionCertificate certify(const StructureDecomposition& d, const CMatrix& t);

}  // namespace alglift
