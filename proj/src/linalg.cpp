#include "alglift/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace alglift::linalg {

namespace {

Eigen::VectorXd singular_values(const CMatrix& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

}  // namespace

double op_norm(const CMatrix& a) {
  const auto s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

double min_singular_value(const CMatrix& a) {
  const auto s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

double condition_number(const CMatrix& a) {
  const auto s = singular_values(a);
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

CVector eigenvalues(const CMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionError("eigenvalues: matrix not square");
  if (a.size() == 0) return CVector();
  Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("eigen-solver failed to converge");
  return es.eigenvalues();
}

double spectral_radius(const CMatrix& a) {
  const CVector ev = eigenvalues(a);
  double r = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev(i)));
  return r;
}

CMatrix orthogonal_complement(const CMatrix& basis) {
  const Eigen::Index n = basis.rows();
  if (basis.cols() == 0) return CMatrix::Identity(n, n);
  if (basis.cols() >= n) return CMatrix(n, 0);
  Eigen::HouseholderQR<CMatrix> qr(basis);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  return q.rightCols(n - basis.cols());
}

CMatrix projector(const CMatrix& orthonormal_basis) {
  CMatrix p = orthonormal_basis * orthonormal_basis.adjoint();
  return 0.5 * (p + p.adjoint());
}

KernelResult kernel(const CMatrix& a, double rank_tol) {
  const Eigen::Index n = a.cols();
  KernelResult out;
  if (n == 0) {
    out.basis = CMatrix(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.basis = CMatrix::Identity(n, n);
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  out.smallest_kept = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sv = s(i);
    if (sv > rank_tol / 10.0 && sv < rank_tol * 10.0)
      throw ToleranceAmbiguity("ambiguous numerical rank: singular value " +
                               std::to_string(sv) + " near rank tolerance " +
                               std::to_string(rank_tol));
    if (sv > rank_tol) {
      ++rank;
      out.smallest_kept = std::min(out.smallest_kept, sv);
    } else {
      out.largest_dropped = std::max(out.largest_dropped, sv);
    }
  }
  out.basis = svd.matrixV().rightCols(n - rank);
  return out;
}

Schur schur(const CMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionError("schur: matrix not square");
  if (a.size() == 0) return {CMatrix(0, 0), CMatrix(0, 0)};
  Eigen::ComplexSchur<CMatrix> cs(a);
  if (cs.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  Schur s{cs.matrixU(), cs.matrixT()};
  s.R.triangularView<Eigen::StrictlyLower>().setZero();
  return s;
}

namespace {

// Swaps diagonal entries k and k+1 of the triangular factor.
void swap_adjacent(Schur& s, Eigen::Index k) {
  const Complex a = s.R(k, k);
  const Complex b = s.R(k + 1, k + 1);
  const Complex c = s.R(k, k + 1);
  Complex v1 = c;
  Complex v2 = b - a;
  const double len = std::hypot(std::abs(v1), std::abs(v2));
  if (len == 0.0) return;
  v1 /= len;
  v2 /= len;
  Eigen::Matrix2cd q;
  q << v1, -std::conj(v2), v2, std::conj(v1);
  s.R.middleRows(k, 2) = q.adjoint() * s.R.middleRows(k, 2);
  s.R.middleCols(k, 2) = s.R.middleCols(k, 2) * q;
  s.U.middleCols(k, 2) = s.U.middleCols(k, 2) * q;
  s.R(k, k) = b;
  s.R(k + 1, k + 1) = a;
  s.R(k + 1, k) = 0.0;
}

}  // namespace

void reorder_schur_by_key(Schur& s, std::vector<int>& keys) {
  const auto n = static_cast<Eigen::Index>(s.R.rows());
  if (static_cast<Eigen::Index>(keys.size()) != n)
    throw PreconditionError("reorder_schur: selector size mismatch");
  // Insertion sort by adjacent swaps keeps equal keys in their order.
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index q = j - 1; q >= 0; --q) {
      const auto uq = static_cast<std::size_t>(q);
      if (keys[uq] <= keys[uq + 1]) break;
      swap_adjacent(s, q);
      std::swap(keys[uq], keys[uq + 1]);
    }
  }
  s.R.triangularView<Eigen::StrictlyLower>().setZero();
}

int reorder_schur(Schur& s, std::vector<bool> leading) {
  std::vector<int> keys(leading.size());
  int count = 0;
  for (std::size_t i = 0; i < leading.size(); ++i) {
    keys[i] = leading[i] ? 0 : 1;
    count += leading[i] ? 1 : 0;
  }
  reorder_schur_by_key(s, keys);
  return count;
}

CMatrix solve_triangular_sylvester(const CMatrix& a, const CMatrix& c,
                                   const CMatrix& b) {
  const Eigen::Index r = a.rows();
  const Eigen::Index m = c.rows();
  if (b.rows() != r || b.cols() != m)
    throw PreconditionError("sylvester: shape mismatch");
  CMatrix z = CMatrix::Zero(r, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    CVector rhs = b.col(j);
    for (Eigen::Index l = 0; l < j; ++l) rhs += z.col(l) * c(l, j);
    CMatrix shifted = a;
    shifted.diagonal().array() -= c(j, j);
    for (Eigen::Index i = 0; i < r; ++i)
      if (shifted(i, i) == Complex(0.0))
        throw NumericalError("sylvester: spectra of the two blocks intersect");
    z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return z;
}

double max_principal_angle(const CMatrix& q1, const CMatrix& q2) {
  if (q1.cols() != q2.cols()) return M_PI / 2.0;
  if (q1.cols() == 0) return 0.0;
  const CMatrix residual = q2 - q1 * (q1.adjoint() * q2);
  return std::asin(std::min(1.0, op_norm(residual)));
}

CMatrix column_space(const CMatrix& a, double rel_tol) {
  if (a.size() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace alglift::linalg
