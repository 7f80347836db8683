#include "alglift/radius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "alglift/linalg.hpp"

namespace alglift {

using linalg::op_norm;

double theoretical_min(const BlockElement& x, const IdealSpec& ideal) {
  ideal.check_against(x.algebra());
  const double quotient_norm = norm(quotient(x, ideal));
  const double via_rho = std::max(spectral_radius(x), quotient_norm);
  double via_blocks = quotient_norm;
  for (std::size_t k : ideal.support())
    via_blocks = std::max(via_blocks, linalg::spectral_radius(x.block(k)));
  if (std::abs(via_rho - via_blocks) > 1e-10)
    throw NumericalError("theoretical_min: the two lower-bound routes disagree");
  return via_rho;
}

namespace {

// Upper-triangular form B = V^{-1} U^* X U V, block diagonal over clusters
// (a single cluster means B is the Schur factor itself and V = I).
struct ScaledForm {
  CMatrix U;
  CMatrix B;
  CMatrix v_inv;
  std::vector<Eigen::Index> start, size;
  double v_condition = 1.0;
  Eigen::Index max_cluster = 1;
  bool balanced = false;
  double scale = 1.0;  // reference size for the balanced weights
};

// log d_i of the diagonal scaling D, so that D B D^{-1} has entries
// B_ij d_i / d_j. The uniform schedule uses d_{i+1} / d_i = 1 / eps; the
// balanced one divides by the superdiagonal weight r_i = |B_{i,i+1}| / scale
// clamped to [eps, 1], which puts every superdiagonal entry at or below
// eps * scale with the least condition number and never amplifies an entry.
Eigen::VectorXd log_scaling(const ScaledForm& f, double eps) {
  const Eigen::Index n = f.B.rows();
  Eigen::VectorXd d(n);
  for (std::size_t c = 0; c < f.start.size(); ++c) {
    const Eigen::Index s0 = f.start[c];
    d(s0) = 0.0;
    for (Eigen::Index i = 1; i < f.size[c]; ++i) {
      double r = 1.0;
      if (f.balanced) r = std::clamp(std::abs(f.B(s0 + i - 1, s0 + i)) / f.scale, eps, 1.0);
      d(s0 + i) = d(s0 + i - 1) + std::log(r / eps);
    }
  }
  return d;
}

double scaled_value(const ScaledForm& f, const Eigen::VectorXd& d) {
  double v = 0.0;
  for (std::size_t c = 0; c < f.start.size(); ++c) {
    const Eigen::Index s0 = f.start[c], s = f.size[c];
    CMatrix scaled = f.B.block(s0, s0, s, s);
    for (Eigen::Index j = 1; j < s; ++j)
      for (Eigen::Index i = 0; i < j; ++i) scaled(i, j) *= std::exp(d(s0 + i) - d(s0 + j));
    v = std::max(v, s == 1 ? std::abs(scaled(0, 0)) : op_norm(scaled));
  }
  return v;
}

double form_value(const ScaledForm& f, double eps) { return scaled_value(f, log_scaling(f, eps)); }

double condition_estimate(const ScaledForm& f, const Eigen::VectorXd& d) {
  return std::exp(d.maxCoeff() - d.minCoeff()) * f.v_condition;
}

double form_condition_estimate(const ScaledForm& f, double eps) {
  return condition_estimate(f, log_scaling(f, eps));
}

CMatrix scaled_conjugator(const ScaledForm& f, const Eigen::VectorXd& log_d) {
  const Eigen::VectorXd d = log_d.array().exp();
  CMatrix g = d.asDiagonal() * f.v_inv * f.U.adjoint();
  const double lo = linalg::min_singular_value(g);
  return g / lo;
}

CMatrix form_conjugator(const ScaledForm& f, double eps) {
  return scaled_conjugator(f, log_scaling(f, eps));
}

ScaledForm schur_form(const linalg::Schur& s) {
  ScaledForm f;
  const Eigen::Index n = s.R.rows();
  f.U = s.U;
  f.B = s.R;
  f.v_inv = CMatrix::Identity(n, n);
  f.start = {0};
  f.size = {n};
  f.max_cluster = n;
  return f;
}

// Groups the Schur diagonal by single linkage at distance delta and removes
// the coupling between groups. Returns nothing when only one group forms.
std::optional<ScaledForm> decoupled_form(const linalg::Schur& base, double delta,
                                         double max_condition) {
  const Eigen::Index n = base.R.rows();
  std::vector<std::size_t> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(base.R(i, i) - base.R(j, j)) <= delta)
        parent[find(static_cast<std::size_t>(i))] = find(static_cast<std::size_t>(j));

  std::vector<int> keys(static_cast<std::size_t>(n));
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::size_t r = find(i);
    auto it = std::find(reps.begin(), reps.end(), r);
    if (it == reps.end()) {
      keys[i] = static_cast<int>(reps.size());
      reps.push_back(r);
    } else {
      keys[i] = static_cast<int>(it - reps.begin());
    }
  }
  if (reps.size() < 2) return std::nullopt;

  linalg::Schur s = base;
  linalg::reorder_schur_by_key(s, keys);

  ScaledForm f;
  f.U = s.U;
  f.B = s.R;
  Eigen::Index pos = 0;
  for (std::size_t c = 0; c < reps.size(); ++c) {
    Eigen::Index len = 0;
    while (pos + len < n && keys[static_cast<std::size_t>(pos + len)] == static_cast<int>(c)) ++len;
    f.start.push_back(pos);
    f.size.push_back(len);
    f.max_cluster = std::max(f.max_cluster, len);
    pos += len;
  }

  CMatrix v = CMatrix::Identity(n, n);
  for (std::size_t c = 0; c + 1 < f.start.size(); ++c) {
    const Eigen::Index a0 = f.start[c], as = f.size[c];
    const Eigen::Index r0 = a0 + as, rs = n - r0;
    CMatrix y;
    try {
      y = linalg::solve_triangular_sylvester(f.B.block(a0, a0, as, as),
                                             f.B.block(r0, r0, rs, rs),
                                             -f.B.block(a0, r0, as, rs));
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    if (!y.allFinite()) return std::nullopt;
    v.middleCols(r0, rs) += v.middleCols(a0, as) * y;
    f.B.block(a0, r0, as, rs).setZero();
  }
  f.v_condition = linalg::condition_number(v);
  if (!(f.v_condition <= max_condition)) return std::nullopt;
  f.v_inv = v.triangularView<Eigen::UnitUpper>().solve(CMatrix::Identity(n, n));
  return f;
}

}  // namespace

CMatrix schur_diagonal_schedule(const CMatrix& x, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  if (x.rows() != x.cols()) throw PreconditionError("schedule: matrix not square");
  return form_conjugator(schur_form(linalg::schur(x)), eps);
}

double schur_schedule_value(const CMatrix& x, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  if (x.rows() != x.cols()) throw PreconditionError("schedule: matrix not square");
  if (x.size() == 0) return 0.0;
  return form_value(schur_form(linalg::schur(x)), eps);
}

BlockScaling scale_block_to(const CMatrix& x, double target, const RadiusOptions& opts,
                            const std::function<void(double)>& on_eval) {
  const Eigen::Index n = x.rows();
  BlockScaling best;
  best.G = CMatrix::Identity(n, n);
  best.value = op_norm(x);
  if (best.value <= target) {
    best.reached = true;
    return best;
  }

  const linalg::Schur schur = linalg::schur(x);
  std::vector<ScaledForm> forms{schur_form(schur)};
  const double scale = std::max(1.0, best.value);
  for (double delta : {1e-1, 1e-2, 1e-3})
    if (auto f = decoupled_form(schur, delta * scale, opts.max_condition)) forms.push_back(*f);
  for (std::size_t i = 0, count = forms.size(); i < count; ++i) {
    ScaledForm b = forms[i];
    b.balanced = true;
    b.scale = std::max(op_norm(b.B), std::numeric_limits<double>::min());
    forms.push_back(std::move(b));
  }

  const auto& sched = opts.eps_schedule;
  auto evaluate = [&](const ScaledForm& f, double eps) {
    ++best.iterations;
    const double v = form_value(f, eps);
    if (on_eval) on_eval(v);
    return v;
  };
  const ScaledForm* best_form = nullptr;
  Eigen::VectorXd best_d;
  auto consider_scaling = [&](const ScaledForm& f, const Eigen::VectorXd& d, double v) {
    if (v >= best.value) return false;
    CMatrix g = scaled_conjugator(f, d);
    const double cond = linalg::condition_number(g);
    if (!(cond <= opts.max_condition)) return false;
    best.G = std::move(g);
    best.value = v;
    best.condition = cond;
    best_form = &f;
    best_d = d;
    return true;
  };
  auto consider = [&](const ScaledForm& f, double eps, double v) {
    return consider_scaling(f, log_scaling(f, eps), v);
  };

  for (const auto& f : forms) {
    double prev = 1.0;  // eps = 1 is the unscaled form, which fails the target
    for (double eps = sched.initial; eps >= sched.floor && best.iterations < opts.max_iter;
         eps *= sched.ratio) {
      if (form_condition_estimate(f, eps) > opts.max_condition) {
        // Out of budget before the target: settle for the smallest eps the
        // condition guard still admits.
        double lo = eps, hi = prev;
        for (int it = 0; it < opts.line_search_steps; ++it) {
          const double mid = std::sqrt(lo * hi);
          if (form_condition_estimate(f, mid) > opts.max_condition)
            lo = mid;
          else
            hi = mid;
        }
        if (hi < 1.0 && best.iterations < opts.max_iter) consider(f, hi, evaluate(f, hi));
        break;
      }
      const double v = evaluate(f, eps);
      if (v <= target) {
        double lo = eps, hi = prev;
        for (int it = 0; it < opts.line_search_steps && best.iterations < opts.max_iter; ++it) {
          const double mid = std::sqrt(lo * hi);
          if (evaluate(f, mid) <= target)
            lo = mid;
          else
            hi = mid;
        }
        if (consider(f, lo, form_value(f, lo))) {
          best.reached = true;
          return best;
        }
        break;
      }
      consider(f, eps, v);
      prev = eps;
    }
  }

  // No schedule reached the target within the condition budget. Polish the
  // best diagonal scaling coordinatewise, staying inside the budget.
  if (best_form != nullptr) {
    const ScaledForm& f = *best_form;
    Eigen::VectorXd d = best_d;
    double v = best.value;
    for (double step = std::log(2.0); step > 1e-3 && v > target; step /= 2) {
      bool moved = true;
      while (moved && v > target && best.iterations < opts.max_iter) {
        moved = false;
        for (Eigen::Index i = 0; i < d.size() && best.iterations < opts.max_iter; ++i)
          for (double dir : {-1.0, 1.0}) {
            Eigen::VectorXd trial = d;
            trial(i) += dir * step;
            if (condition_estimate(f, trial) > opts.max_condition) continue;
            ++best.iterations;
            const double tv = scaled_value(f, trial);
            if (on_eval) on_eval(tv);
            if (tv < v) {
              d = std::move(trial);
              v = tv;
              moved = true;
              break;
            }
          }
      }
    }
    consider_scaling(f, d, v);
    best.reached = best.value <= target;
  }
  return best;
}

RadiusResult min_similarity_norm(const BlockElement& x, const IdealSpec& ideal,
                                 const RadiusOptions& opts) {
  if (opts.max_iter <= 0 || !(opts.solver_tol > 0.0) || !(opts.max_condition >= 1.0))
    throw PreconditionError("radius options must be positive");
  RadiusResult res;
  res.oracle = theoretical_min(x, ideal);
  res.witness = BlockElement::zero(x.algebra());
  const double x_norm = norm(x);
  const double tol = opts.solver_tol * std::max(1.0, x_norm);
  std::vector<double> current(x.num_blocks());
  for (std::size_t k = 0; k < x.num_blocks(); ++k) current[k] = linalg::op_norm(x.block(k));
  auto overall = [&] { return *std::max_element(current.begin(), current.end()); };
  if (!current.empty()) res.history.emplace_back(0, overall());

  res.converged = true;
  bool exact_targets = true;
  for (std::size_t k : ideal.support()) {
    const CMatrix& xk = x.block(k);
    const double rho_k = linalg::spectral_radius(xk);
    const bool exact = rho_k < res.oracle - tol || current[k] <= res.oracle;
    const double target = exact ? res.oracle : res.oracle + tol;
    const double start = current[k];
    auto on_eval = [&](double v) {
      ++res.iterations;
      if (v < current[k]) current[k] = v;
      res.history.emplace_back(res.iterations, overall());
    };
    RadiusOptions block_opts = opts;
    block_opts.max_iter = std::max(1, opts.max_iter - res.iterations);
    const BlockScaling sc = scale_block_to(xk, target, block_opts, on_eval);
    current[k] = std::min(start, sc.value);
    if (sc.value < start)
      res.witness.block(k) = sc.G - CMatrix::Identity(xk.rows(), xk.cols());
    res.converged = res.converged && sc.reached;
    exact_targets = exact_targets && exact;
  }
  res.value = norm(conjugate(x, res.witness, ideal, opts.max_condition));
  res.attained = res.converged && exact_targets;
  if (!res.history.empty() && res.value < res.history.back().second)
    res.history.emplace_back(res.iterations, res.value);
  return res;
}

}  // namespace alglift
