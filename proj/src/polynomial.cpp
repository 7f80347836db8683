#include "alglift/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alglift/linalg.hpp"

namespace alglift {

RootedPolynomial::RootedPolynomial(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  for (const auto& f : factors_)
    if (f.mult < 1) throw PreconditionError("factor multiplicity must be >= 1");
  const double tol = default_cluster_tol(max_root_modulus());
  for (std::size_t i = 0; i < factors_.size(); ++i)
    for (std::size_t j = i + 1; j < factors_.size(); ++j)
      if (std::abs(factors_[i].root - factors_[j].root) <= tol)
        throw PreconditionError("roots of a rooted polynomial must be distinct");
}

int RootedPolynomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.mult;
  return d;
}

double RootedPolynomial::max_root_modulus() const {
  double m = 0.0;
  for (const auto& f : factors_) m = std::max(m, std::abs(f.root));
  return m;
}

bool RootedPolynomial::is_canonical() const { return canonical_order(*this) == *this; }

std::vector<Complex> RootedPolynomial::expand() const {
  std::vector<Complex> c{Complex(1.0)};
  for (const auto& f : factors_) {
    for (int k = 0; k < f.mult; ++k) {
      std::vector<Complex> next(c.size() + 1, Complex(0.0));
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i] += c[i];
        next[i + 1] -= f.root * c[i];
      }
      c = std::move(next);
    }
  }
  return c;
}

double default_cluster_tol(double max_root_modulus) {
  return 1e-8 * (1.0 + max_root_modulus);
}

RootedPolynomial factor_from_coefficients(const std::vector<Complex>& coeffs,
                                          double cluster_tol) {
  if (coeffs.empty()) throw PreconditionError("no coefficients given");
  if (coeffs.front() == Complex(0.0))
    throw PreconditionError("leading coefficient must be nonzero");
  const std::size_t degree = coeffs.size() - 1;
  if (degree == 0) throw PreconditionError("degree 0 polynomial defines no relation");

  // Companion matrix of the monic normalization.
  CMatrix companion = CMatrix::Zero(static_cast<Eigen::Index>(degree),
                                    static_cast<Eigen::Index>(degree));
  for (std::size_t j = 0; j < degree; ++j)
    companion(0, static_cast<Eigen::Index>(j)) = -coeffs[j + 1] / coeffs[0];
  for (std::size_t i = 1; i < degree; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

  CVector ev;
  try {
    ev = linalg::eigenvalues(companion);
  } catch (const NumericalError&) {
    throw NumericalError("root finder failed to converge");
  }

  double max_mod = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) max_mod = std::max(max_mod, std::abs(ev(i)));
  const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(max_mod);

  // Single-linkage clustering by union-find.
  const std::size_t n = degree;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(ev(static_cast<Eigen::Index>(i)) - ev(static_cast<Eigen::Index>(j))) <= tol)
        parent[find(i)] = find(j);

  std::vector<Factor> factors;
  std::vector<std::size_t> rep_of;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    auto it = std::find(rep_of.begin(), rep_of.end(), r);
    if (it == rep_of.end()) {
      rep_of.push_back(r);
      factors.push_back({ev(static_cast<Eigen::Index>(i)), 1});
    } else {
      auto& f = factors[static_cast<std::size_t>(it - rep_of.begin())];
      f.root += ev(static_cast<Eigen::Index>(i));
      ++f.mult;
    }
  }
  for (auto& f : factors) f.root /= static_cast<double>(f.mult);

  // A custom tol below the default can leave clusters closer than the
  // distinctness threshold of RootedPolynomial.
  try {
    return canonical_order(RootedPolynomial(std::move(factors)));
  } catch (const PreconditionError&) {
    throw NumericalError("root clusters are not separated; increase cluster_tol");
  }
}

namespace {

double principal_arg(const Complex& z) {
  const double a = std::arg(z);
  return a <= -M_PI ? M_PI : a;
}

}  // namespace

RootedPolynomial canonical_order(const RootedPolynomial& p) {
  std::vector<Factor> f = p.factors();
  std::stable_sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) {
    const double ma = std::abs(a.root), mb = std::abs(b.root);
    if (ma != mb) return ma > mb;
    const double aa = principal_arg(a.root), ab = principal_arg(b.root);
    if (aa != ab) return aa < ab;
    if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
    return a.root.imag() < b.root.imag();
  });
  RootedPolynomial out;
  if (!f.empty()) out = RootedPolynomial(std::move(f));
  return out;
}

CMatrix evaluate(const RootedPolynomial& p, const CMatrix& t) {
  if (t.rows() != t.cols()) throw PreconditionError("evaluate: matrix not square");
  const Eigen::Index n = t.rows();
  CMatrix acc = CMatrix::Identity(n, n);
  for (const auto& f : p.factors()) {
    CMatrix shifted = t;
    shifted.diagonal().array() -= f.root;
    for (int k = 0; k < f.mult; ++k) acc = shifted * acc;
  }
  return acc;
}

RootedPolynomial residual_after_peel(const RootedPolynomial& p, std::size_t m) {
  if (m > p.size()) throw PreconditionError("residual_after_peel: m out of range");
  if (m == p.size()) return RootedPolynomial::empty_product();
  return RootedPolynomial(std::vector<Factor>(p.factors().begin() + static_cast<long>(m),
                                              p.factors().end()));
}

double relation_scale(double norm, int degree) {
  return std::pow(1.0 + norm, std::max(degree, 0));
}

}  // namespace alglift
