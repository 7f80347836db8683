#include "alglift/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "alglift/linalg.hpp"

namespace alglift {

using linalg::op_norm;

double relation_residual(const RootedPolynomial& p, const CMatrix& t) {
  if (t.rows() != t.cols()) throw PreconditionError("relation check: matrix not square");
  if (t.size() == 0) return 0.0;
  if (p.is_empty_product()) return std::numeric_limits<double>::infinity();
  return op_norm(evaluate(p, t)) / relation_scale(op_norm(t), p.degree());
}

void require_relation(const RootedPolynomial& p, const CMatrix& t, double tol) {
  const double r = relation_residual(p, t);
  if (!(r <= tol))
    throw RelationViolated("relation violated: ||p(T)|| / (1+||T||)^deg = " + std::to_string(r));
}

double default_rank_tol(const CMatrix& t) {
  return 1e-8 * std::max(1.0, op_norm(t)) * static_cast<double>(std::max<Eigen::Index>(t.rows(), 1));
}

namespace {

// Incremental kernel of a growing factor product. `comp` is an orthonormal
// basis of the orthocomplement of the kernel accumulated so far; the next
// increment is ker of the compression comp^* (T - t) comp.
struct Staircase {
  const CMatrix& t;
  double rank_tol;
  CMatrix comp;

  Staircase(const CMatrix& op, double tol)
      : t(op), rank_tol(tol), comp(CMatrix::Identity(op.rows(), op.rows())) {}

  CMatrix step(const Complex& root) {
    const Eigen::Index r = comp.cols();
    if (r == 0) return CMatrix(t.rows(), 0);
    CMatrix shifted = t;
    shifted.diagonal().array() -= root;
    const CMatrix compressed = comp.adjoint() * shifted * comp;
    const auto ker = linalg::kernel(compressed, rank_tol);
    CMatrix increment = comp * ker.basis;
    comp = comp * linalg::orthogonal_complement(ker.basis);
    return increment;
  }
};

}  // namespace

KernelFlag nested_kernel_flag(const CMatrix& t, const RootedPolynomial& p, double rank_tol) {
  if (t.rows() != t.cols()) throw PreconditionError("nested_kernel_flag: matrix not square");
  if (p.is_empty_product() && t.size() != 0)
    throw RelationViolated("empty product annihilates only the zero space");
  require_relation(p, t);
  const double tol = rank_tol > 0.0 ? rank_tol : default_rank_tol(t);

  KernelFlag flag;
  Staircase stairs(t, tol);
  for (const auto& f : p.factors()) {
    for (int q = 0; q < f.mult; ++q) {
      flag.bases.push_back(stairs.step(f.root));
      flag.flag_dims.push_back(static_cast<int>(flag.bases.back().cols()));
      flag.labels.push_back(f.root);
    }
  }
  if (stairs.comp.cols() != 0)
    throw RelationViolated("kernel flag does not exhaust the space (" +
                           std::to_string(stairs.comp.cols()) + " dimensions left)");
  return flag;
}

std::vector<int> TriangularForm::boundaries() const {
  std::vector<int> b;
  int acc = 0;
  for (int d : flag_dims) b.push_back(acc += d);
  return b;
}

TriangularForm upper_triangularize(const CMatrix& t, const RootedPolynomial& p, double rank_tol) {
  const KernelFlag flag = nested_kernel_flag(t, p, rank_tol);
  const Eigen::Index n = t.rows();
  TriangularForm form;
  form.U = CMatrix(n, n);
  Eigen::Index col = 0;
  for (const auto& b : flag.bases) {
    form.U.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  form.flag_dims = flag.flag_dims;
  form.diagonal_labels = flag.labels;
  form.R = form.U.adjoint() * t * form.U;

  const double snap_tol = 1e-6 * (1.0 + op_norm(t));
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < form.flag_dims.size(); ++j) {
    const Eigen::Index d = form.flag_dims[j];
    if (d == 0) continue;
    auto diag = form.R.block(row, row, d, d);
    const CMatrix target = form.diagonal_labels[j] * CMatrix::Identity(d, d);
    const double dev = op_norm(diag - target);
    const double below = row + d < n ? op_norm(form.R.block(row + d, row, n - row - d, d)) : 0.0;
    if (dev > snap_tol || below > snap_tol)
      throw ToleranceAmbiguity("flag block " + std::to_string(j + 1) +
                               " is not a labeled scalar block (deviation " +
                               std::to_string(std::max(dev, below)) + ")");
    diag = target;
    if (row + d < n) form.R.block(row + d, row, n - row - d, d).setZero();
    row += d;
  }
  return form;
}

bool TriangularCertificate::passes(double t_norm) const {
  return dims_consistent && unitarity_error <= 1e-10 && below_block_max == 0.0 &&
         diagonal_block_error <= 1e-8 && reconstruction_error <= 1e-8 * (1.0 + t_norm);
}

TriangularCertificate certify(const TriangularForm& form, const CMatrix& t) {
  TriangularCertificate c;
  const Eigen::Index n = t.rows();
  int total = 0;
  for (int d : form.flag_dims) total += d;
  c.dims_consistent = total == n && form.U.rows() == n && form.U.cols() == n &&
                      form.R.rows() == n && form.R.cols() == n &&
                      form.flag_dims.size() == form.diagonal_labels.size();
  if (!c.dims_consistent) return c;
  c.unitarity_error = op_norm(form.U.adjoint() * form.U - CMatrix::Identity(n, n));
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < form.flag_dims.size(); ++j) {
    const Eigen::Index d = form.flag_dims[j];
    if (d == 0) continue;
    const Complex label = form.diagonal_labels[j];
    const double dev = op_norm(form.R.block(row, row, d, d) - label * CMatrix::Identity(d, d));
    c.diagonal_block_error = std::max(c.diagonal_block_error, dev / (1.0 + std::abs(label)));
    if (row + d < n)
      c.below_block_max = std::max(
          c.below_block_max, form.R.block(row + d, row, n - row - d, d).cwiseAbs().maxCoeff());
    row += d;
  }
  c.reconstruction_error = op_norm(form.U * form.R * form.U.adjoint() - t);
  return c;
}

CMatrix range_projection(const CMatrix& b) {
  if (b.rows() != b.cols()) throw PreconditionError("range_projection: matrix not square");
  const Eigen::Index n = b.rows();
  if (n == 0) return CMatrix(0, 0);
  const double bn = op_norm(b);
  const double idem = op_norm(b * b - b);
  if (idem > 1e-8 * (1.0 + bn) * (1.0 + bn))
    throw PreconditionError("range_projection: input is not an idempotent (||b^2 - b|| = " +
                            std::to_string(idem) + ")");
  CMatrix bbs = b * b.adjoint();
  bbs = 0.5 * (bbs + bbs.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(bbs);
  if (es.info() != Eigen::Success) throw NumericalError("range_projection: eigen-solver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev(i) > 0.1 && ev(i) < 0.9)
      throw NumericalError("range_projection: eigenvalue " + std::to_string(ev(i)) +
                           " of b b^* inside (0.1, 0.9); idempotent is numerically broken");
    f(i) = ev(i) >= 0.5 ? 1.0 : 0.0;
  }
  const CMatrix& v = es.eigenvectors();
  CMatrix p = v * f.asDiagonal() * v.adjoint();
  return 0.5 * (p + p.adjoint());
}

CMatrix spectral_idempotent(const CMatrix& t, const Complex& root, const RootedPolynomial& p) {
  if (t.rows() != t.cols()) throw PreconditionError("spectral_idempotent: matrix not square");
  const auto& fs = p.factors();
  const double tol = default_cluster_tol(p.max_root_modulus());
  auto match = std::find_if(fs.begin(), fs.end(),
                            [&](const Factor& f) { return std::abs(f.root - root) <= tol; });
  if (match == fs.end()) throw PreconditionError("spectral_idempotent: root is not a root of p");
  require_relation(p, t);
  const Eigen::Index n = t.rows();
  if (n == 0) return CMatrix(0, 0);

  linalg::Schur s = linalg::schur(t);
  // Each computed eigenvalue belongs to the nearest root of p.
  std::vector<bool> leading(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex ev = s.R(i, i);
    auto nearest = std::min_element(fs.begin(), fs.end(), [&](const Factor& a, const Factor& b) {
      return std::abs(a.root - ev) < std::abs(b.root - ev);
    });
    leading[static_cast<std::size_t>(i)] = nearest == match;
  }
  const Eigen::Index r = linalg::reorder_schur(s, leading);
  if (r == 0) return CMatrix::Zero(n, n);
  if (r == n) return CMatrix::Identity(n, n);

  const CMatrix z = linalg::solve_triangular_sylvester(
      s.R.topLeftCorner(r, r), s.R.bottomRightCorner(n - r, n - r), s.R.topRightCorner(r, n - r));
  CMatrix q = CMatrix::Zero(n, n);
  q.topLeftCorner(r, r).setIdentity();
  q.topRightCorner(r, n - r) = z;
  return s.U * q * s.U.adjoint();
}

bool corner_zero_check(const CMatrix& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw PreconditionError("corner_zero_check: matrix must be square and nonempty");
  const double an = op_norm(a);
  if (std::abs(a(0, 0)) < an - tol)
    throw PreconditionError("corner_zero_check: |A_11| < ||A|| - tol");
  const double bound = std::sqrt(2.0 * tol * an);
  double off = 0.0;
  for (Eigen::Index j = 1; j < a.rows(); ++j)
    off = std::max({off, std::abs(a(0, j)), std::abs(a(j, 0))});
  return off <= bound;
}

CMatrix StructureDecomposition::embedded_corner() const {
  if (corner_basis.cols() == 0) return CMatrix::Zero(corner_basis.rows(), corner_basis.rows());
  return corner_basis * S * corner_basis.adjoint();
}

CMatrix StructureDecomposition::reconstruct() const {
  CMatrix out = embedded_corner();
  for (const auto& pr : peeled) out += pr.root * pr.projection;
  return out;
}

double default_strictness_margin(double t_norm) { return 1e-6 * (1.0 + t_norm); }

std::vector<StructureDecomposition> structure_decomposition_blocks(
    const std::vector<CMatrix>& blocks, const RootedPolynomial& poly, double strictness_margin) {
  const RootedPolynomial p = canonical_order(poly);
  double t_norm = 0.0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw PreconditionError("structure_decomposition: matrix not square");
    if (p.is_empty_product() && b.size() != 0)
      throw RelationViolated("empty product annihilates only the zero space");
    require_relation(p, b);
    t_norm = std::max(t_norm, op_norm(b));
  }
  const double margin =
      strictness_margin >= 0.0 ? strictness_margin : default_strictness_margin(t_norm);
  const double split_tol = 1e-8 * (1.0 + t_norm);

  const std::size_t nb = blocks.size();
  std::vector<CMatrix> basis(nb), corner(nb);
  std::vector<double> rank_tol(nb);
  std::vector<StructureDecomposition> out(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    basis[k] = CMatrix::Identity(blocks[k].rows(), blocks[k].rows());
    corner[k] = blocks[k];
    rank_tol[k] = default_rank_tol(blocks[k]);
  }

  std::size_t m = 0;
  for (; m < p.size(); ++m) {
    const Factor& f = p.factors()[m];
    double s_norm = 0.0;
    for (const auto& c : corner) s_norm = std::max(s_norm, op_norm(c));
    if (s_norm > std::abs(f.root) + margin) break;

    for (std::size_t k = 0; k < nb; ++k) {
      // ker (S - t)^k inside the current corner coordinates.
      Staircase stairs(corner[k], rank_tol[k]);
      const Eigen::Index r = corner[k].rows();
      CMatrix ker(r, 0);
      for (int q = 0; q < f.mult; ++q) {
        const CMatrix inc = stairs.step(f.root);
        CMatrix grown(r, ker.cols() + inc.cols());
        grown << ker, inc;
        ker = std::move(grown);
      }
      const CMatrix& rest = stairs.comp;
      if (ker.cols() > 0) {
        const CMatrix& s = corner[k];
        const double diag_dev =
            op_norm(ker.adjoint() * s * ker - f.root * CMatrix::Identity(ker.cols(), ker.cols()));
        const double coupling = std::max(op_norm(ker.adjoint() * s * rest),
                                         op_norm(rest.adjoint() * s * ker));
        if (diag_dev > split_tol || coupling > split_tol)
          throw ToleranceAmbiguity(
              "corner norm is within the strictness margin of |t| but the eigenspace does "
              "not split off (coupling " + std::to_string(std::max(diag_dev, coupling)) + ")");
      }
      out[k].peeled.push_back({f.root, linalg::projector(basis[k] * ker)});
      corner[k] = rest.adjoint() * corner[k] * rest;
      basis[k] = basis[k] * rest;
    }
  }

  const RootedPolynomial residual = residual_after_peel(p, m);
  for (std::size_t k = 0; k < nb; ++k) {
    if (residual.is_empty_product() && basis[k].cols() != 0)
      throw RelationViolated("all roots peeled but a nonzero corner remains");
    out[k].m = static_cast<int>(m);
    out[k].residual = residual;
    out[k].corner_basis = basis[k];
    out[k].corner_projection = linalg::projector(basis[k]);
    out[k].S = corner[k];
  }
  return out;
}

StructureDecomposition structure_decomposition(const CMatrix& t, const RootedPolynomial& p,
                                               double strictness_margin) {
  return structure_decomposition_blocks({t}, p, strictness_margin).front();
}

bool DecompositionCertificate::passes(double t_norm, double strictness_margin) const {
  return projection_error <= 1e-10 && sum_error <= 1e-10 && orthogonality_error <= 1e-10 &&
         residual_relation <= 1e-8 && strictness_gap > strictness_margin &&
         reconstruction_error <= 1e-8 * (1.0 + t_norm);
}

DecompositionCertificate certify(const StructureDecomposition& d, const CMatrix& t) {
  DecompositionCertificate c;
  const Eigen::Index n = t.rows();
  std::vector<CMatrix> family;
  for (const auto& pr : d.peeled) family.push_back(pr.projection);
  family.push_back(d.corner_projection);
  CMatrix sum = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const CMatrix& p = family[i];
    c.projection_error =
        std::max({c.projection_error, op_norm(p * p - p), op_norm(p - p.adjoint())});
    sum += p;
    for (std::size_t j = i + 1; j < family.size(); ++j)
      c.orthogonality_error = std::max(c.orthogonality_error, op_norm(p * family[j]));
  }
  c.sum_error = op_norm(sum - CMatrix::Identity(n, n));
  c.residual_relation = d.S.size() == 0 ? 0.0 : relation_residual(d.residual, d.S);
  c.strictness_gap = std::numeric_limits<double>::infinity();
  const double s_norm = op_norm(d.S);
  for (const auto& f : d.residual.factors())
    c.strictness_gap = std::min(c.strictness_gap, s_norm - std::abs(f.root));
  c.reconstruction_error = op_norm(t - d.reconstruct());
  return c;
}

}  // namespace alglift
