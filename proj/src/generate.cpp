#include "alglift/generate.hpp"

#include <algorithm>
#include <cmath>

#include "alglift/linalg.hpp"

namespace alglift {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct Conditioned {
  CMatrix g, g_inv;
};

Conditioned conditioned_pair(Rng& rng, Eigen::Index n, double cond) {
  const CMatrix u1 = random_unitary(rng, n);
  const CMatrix u2 = random_unitary(rng, n);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (n == 1 || i == 0)
      s(i) = 1.0;
    else if (i == n - 1)
      s(i) = cond;
    else
      s(i) = std::exp(uniform(rng, 0.0, std::log(cond)));
  }
  Conditioned c;
  c.g = u1 * s.asDiagonal() * u2;
  c.g_inv = u2.adjoint() * s.cwiseInverse().asDiagonal() * u1.adjoint();
  return c;
}

}  // namespace

CMatrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(nd(rng), nd(rng)) / std::sqrt(2.0);
  return m;
}

CMatrix random_unitary(Rng& rng, Eigen::Index n) {
  if (n == 0) return CMatrix(0, 0);
  const CMatrix z = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

CMatrix random_conditioned(Rng& rng, Eigen::Index n, double cond) {
  return conditioned_pair(rng, n, cond).g;
}

RootedPolynomial random_polynomial(Rng& rng, int max_degree, int max_distinct,
                                   double max_modulus, double min_separation) {
  if (max_degree < 1 || max_distinct < 1) throw PreconditionError("random_polynomial: empty");
  const int distinct = uniform_int(rng, 1, std::min(max_degree, max_distinct));
  const int degree = uniform_int(rng, distinct, max_degree);
  std::vector<Complex> roots;
  bool has_zero = false;
  int attempts = 0;
  while (static_cast<int>(roots.size()) < distinct) {
    if (++attempts > 10000) throw NumericalError("random_polynomial: could not place roots");
    const double kind = uniform(rng, 0.0, 1.0);
    Complex z;
    if (kind < 0.15 && !has_zero) {
      z = 0.0;
    } else if (kind < 0.45) {
      z = uniform(rng, -max_modulus, max_modulus);
    } else {
      const double r = max_modulus * std::sqrt(uniform(rng, 0.0, 1.0));
      z = std::polar(r, uniform(rng, -M_PI, M_PI));
    }
    bool ok = true;
    for (const auto& w : roots) ok = ok && std::abs(w - z) >= min_separation;
    if (!ok) continue;
    has_zero = has_zero || z == Complex(0.0);
    roots.push_back(z);
  }
  std::vector<Factor> factors;
  for (const auto& z : roots) factors.push_back({z, 1});
  for (int extra = degree - distinct; extra > 0; --extra)
    ++factors[static_cast<std::size_t>(uniform_int(rng, 0, distinct - 1))].mult;
  return canonical_order(RootedPolynomial(std::move(factors)));
}

GeneratedInstance generate_instance(std::uint64_t seed, const InstanceSpec& spec) {
  Rng rng(seed);
  return generate_instance(rng, spec);
}

GeneratedInstance generate_instance(Rng& rng, const InstanceSpec& spec) {
  if (spec.dim < 0) throw PreconditionError("instance dimension must be >= 0");
  if (!(spec.conditioning_bound >= 1.0)) throw PreconditionError("conditioning_bound must be >= 1");
  if (spec.polynomial.is_empty_product() && spec.dim > 0)
    throw PreconditionError("instance polynomial must have at least one factor");
  const auto& fs = spec.polynomial.factors();
  const int num_roots = static_cast<int>(fs.size());
  const int isolated = std::clamp(spec.isolated_roots, 0, num_roots);

  // Chain dims per root: non-increasing along the chain.
  std::vector<std::vector<int>> chains(fs.size());
  int used = 0;
  for (int i = 0; i < num_roots; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    chains[ui].assign(static_cast<std::size_t>(fs[ui].mult), 0);
    if (!spec.full_chains) continue;
    if (i < isolated) {
      chains[ui][0] = 1;
      used += 1;
    } else {
      std::fill(chains[ui].begin(), chains[ui].end(), 1);
      used += fs[ui].mult;
    }
  }
  if (used > spec.dim)
    throw PreconditionError("infeasible instance: multiplicities exceed the dimension budget");
  for (int remaining = spec.dim - used; remaining > 0; --remaining) {
    const auto i = static_cast<std::size_t>(uniform_int(rng, 0, num_roots - 1));
    auto& c = chains[i];
    std::vector<std::size_t> slots{0};
    if (static_cast<int>(i) >= isolated)
      for (std::size_t j = 1; j < c.size(); ++j)
        if (c[j - 1] > c[j]) slots.push_back(j);
    ++c[slots[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(slots.size()) - 1))]];
  }

  GeneratedInstance inst;
  inst.polynomial = spec.polynomial;
  std::vector<bool> slot_isolated;
  for (int i = 0; i < num_roots; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (int d : chains[ui]) {
      inst.flag_dims.push_back(d);
      inst.labels.push_back(fs[ui].root);
      slot_isolated.push_back(i < isolated);
    }
  }

  const Eigen::Index n = spec.dim;
  inst.model = CMatrix::Zero(n, n);
  std::vector<Eigen::Index> offset;
  Eigen::Index acc = 0;
  for (int d : inst.flag_dims) {
    offset.push_back(acc);
    acc += d;
  }
  for (std::size_t a = 0; a < inst.flag_dims.size(); ++a) {
    const Eigen::Index da = inst.flag_dims[a];
    if (da == 0) continue;
    inst.model.block(offset[a], offset[a], da, da).diagonal().setConstant(inst.labels[a]);
    if (slot_isolated[a]) continue;
    for (std::size_t b = a + 1; b < inst.flag_dims.size(); ++b) {
      const Eigen::Index db = inst.flag_dims[b];
      if (db == 0 || slot_isolated[b]) continue;
      inst.model.block(offset[a], offset[b], da, db) = spec.fill_scale * random_gaussian(rng, da, db);
    }
  }

  if (spec.conditioning_bound == 1.0) {
    inst.G = random_unitary(rng, n);
    inst.T = inst.G * inst.model * inst.G.adjoint();
  } else {
    const Conditioned c = conditioned_pair(rng, n, spec.conditioning_bound);
    inst.G = c.g;
    inst.T = c.g * inst.model * c.g_inv;
  }
  return inst;
}

CMatrix random_idempotent(Rng& rng, Eigen::Index n, Eigen::Index rank, double cond) {
  if (rank < 0 || rank > n) throw PreconditionError("random_idempotent: rank out of range");
  const Conditioned c = conditioned_pair(rng, n, cond);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
  d.head(rank).setOnes();
  return c.g * d.asDiagonal() * c.g_inv;
}

LiftProblem generate_lift_problem(Rng& rng, const LiftSpec& spec) {
  LiftProblem prob;
  prob.algebra = BlockAlgebra(spec.block_dims);
  std::vector<IdealSpec> stages;
  for (const auto& s : spec.chain) stages.emplace_back(s);
  prob.chain = IdealChain(std::move(stages));
  prob.chain.check_against(prob.algebra);
  prob.relation = canonical_order(spec.polynomial);

  const auto surviving = prob.chain.limit().complement(prob.algebra.num_blocks());
  std::vector<int> dims;
  std::vector<CMatrix> blocks;
  for (std::size_t k : surviving) {
    InstanceSpec is;
    is.dim = prob.algebra.dim(k);
    is.polynomial = prob.relation;
    is.full_chains = false;
    is.isolated_roots = uniform_int(rng, 0, static_cast<int>(prob.relation.size()));
    is.fill_scale = spec.fill_scale;
    dims.push_back(is.dim);
    blocks.push_back(generate_instance(rng, is).T);
  }
  prob.target = BlockElement(BlockAlgebra(dims), std::move(blocks));
  if (surviving.empty()) {
    const double smallest = std::abs(prob.relation.factors().back().root);
    prob.bound = smallest * uniform(rng, 0.0, 1.5);
  } else {
    prob.bound = norm(prob.target) * (1.0 + spec.bound_slack);
  }
  return prob;
}

LiftSpec random_lift_spec(Rng& rng) {
  LiftSpec spec;
  const int k = uniform_int(rng, 1, 4);
  for (int i = 0; i < k; ++i) spec.block_dims.push_back(uniform_int(rng, 1, 4));

  std::vector<std::size_t> limit;
  const bool everything = uniform(rng, 0.0, 1.0) < 0.25;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i)
    if (everything || uniform(rng, 0.0, 1.0) < 0.5) limit.push_back(i);
  std::shuffle(limit.begin(), limit.end(), rng);

  const int length = uniform_int(rng, 1, 5);
  std::vector<std::size_t> cuts;
  for (int i = 0; i + 1 < length; ++i)
    cuts.push_back(static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(limit.size()))));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(limit.size());
  for (std::size_t c : cuts) spec.chain.emplace_back(limit.begin(), limit.begin() + static_cast<long>(c));

  spec.polynomial = random_polynomial(rng, 4, 3);
  spec.bound_slack = uniform(rng, 0.0, 1.0) < 0.5 ? 0.0 : uniform(rng, 0.0, 0.5);
  spec.fill_scale = uniform(rng, 0.1, 1.0);
  return spec;
}

}  // namespace alglift
