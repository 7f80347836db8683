#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "alglift/blockalg.hpp"
#include "alglift/decomp.hpp"
#include "test_util.hpp"

using namespace alglift;
using alglift::test::dist;
using alglift::test::mat;

namespace {

BlockElement random_element(Rng& rng, const std::vector<int>& dims) {
  std::vector<CMatrix> blocks;
  for (int d : dims) blocks.push_back(random_gaussian(rng, d, d));
  return BlockElement(BlockAlgebra(dims), std::move(blocks));
}

// Largest singular value from the eigenvalues of x^* x.
double gram_norm(const CMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x.adjoint() * x);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

TEST_CASE("norm") {
  const BlockAlgebra alg({2, 1});
  CHECK(norm(BlockElement::zero(alg)) == 0.0);
  const BlockElement x(alg, {mat({{0, 2}, {0, 0}}), mat({{1}})});
  CHECK(norm(x) == doctest::Approx(2.0).epsilon(1e-15));

  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto y = random_element(rng, {3, 5, 1});
    double oracle = 0.0;
    for (const auto& b : y.blocks()) oracle = std::max(oracle, gram_norm(b));
    CHECK(std::abs(norm(y) - oracle) <= 1e-10 * oracle);
  }
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius(BlockElement(BlockAlgebra({2}), {mat({{0, 1}, {0, 0}})})) == 0.0);
  CHECK(spectral_radius(BlockElement(BlockAlgebra({2}), {mat({{2, 0}, {0, -3}})})) ==
        doctest::Approx(3.0));

  SUBCASE("Gelfand formula") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      auto x = random_element(rng, {4, 3});
      CMatrix p = CMatrix::Identity(4, 4);
      CMatrix q = CMatrix::Identity(3, 3);
      // ||x^64||^{1/64}, accumulated with renormalization to avoid overflow.
      double log_p = 0.0, log_q = 0.0;
      for (int k = 0; k < 64; ++k) {
        p = x.block(0) * p;
        q = x.block(1) * q;
        const double np = p.norm(), nq = q.norm();
        p /= np;
        q /= nq;
        log_p += std::log(np);
        log_q += std::log(nq);
      }
      const double gelfand = std::exp(std::max(log_p + std::log(linalg::op_norm(p)),
                                               log_q + std::log(linalg::op_norm(q))) / 64.0);
      const double rho = spectral_radius(x);
      CHECK(std::abs(gelfand - rho) <= 5e-2 * std::max(1.0, rho));
    }
  }
}

TEST_CASE("quotient") {
  const BlockAlgebra alg({1, 1});
  const BlockElement x(alg, {mat({{3}}), mat({{1}})});
  const auto all = quotient(x, IdealSpec::whole(alg));
  CHECK(all.num_blocks() == 0);
  CHECK(norm(all) == 0.0);
  CHECK(quotient(x, IdealSpec()) == x);
  const auto q = quotient(x, IdealSpec({0}));
  REQUIRE(q.num_blocks() == 1);
  CHECK(q.block(0) == mat({{1}}));
  CHECK(norm(q) == 1.0);
  CHECK_THROWS_AS(quotient(x, IdealSpec({5})), PreconditionError);

  SUBCASE("contractive and composable along chains") {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      const auto y = random_element(rng, {2, 3, 1, 2});
      const IdealChain chain({IdealSpec({1}), IdealSpec({1, 3}), IdealSpec({0, 1, 3})});
      for (const auto& s : chain.stages()) CHECK(norm(quotient(y, s)) <= norm(y));
      // Dropping S_1 then the rest of S_3 is dropping S_3.
      const auto step = quotient(y, chain.stage(0));
      const auto kept = chain.stage(0).complement(4);  // original indices of `step`
      std::vector<std::size_t> rel;
      for (std::size_t j = 0; j < kept.size(); ++j)
        if (chain.stage(2).contains(kept[j])) rel.push_back(j);
      CHECK(quotient(step, IdealSpec(rel)) == quotient(y, chain.stage(2)));
    }
  }
}

TEST_CASE("ideal chains") {
  CHECK_THROWS_AS(IdealChain({IdealSpec({0, 1}), IdealSpec({1})}), PreconditionError);
  CHECK_THROWS_AS(IdealChain(std::vector<IdealSpec>{}), PreconditionError);
  CHECK_THROWS_AS(IdealSpec({1, 1}), PreconditionError);
  const IdealChain c({IdealSpec(), IdealSpec({2}), IdealSpec({0, 2})});
  CHECK(c.limit() == IdealSpec({0, 2}));
}

TEST_CASE("conjugate") {
  const BlockAlgebra one({2});
  const BlockElement x(one, {mat({{0, 5}, {0, 0}})});
  const IdealSpec all = IdealSpec::whole(one);

  CHECK(conjugate(x, BlockElement::zero(one), all) == x);

  // 1 + i = diag(1, 5) scales the (1,2) entry by 1/5.
  const BlockElement i(one, {mat({{0, 0}, {0, 4}})});
  const auto y = conjugate(x, i, all);
  CHECK(dist(y.block(0), mat({{0, 1}, {0, 0}})) <= 1e-15);

  SUBCASE("relation is carried along") {
    const RootedPolynomial p({{0.0, 2}});
    CHECK(relation_residual(p, y.block(0)) <= 1e-10);
  }

  SUBCASE("guards") {
    const BlockElement singular(one, {mat({{-1, 0}, {0, 0}})});
    CHECK_THROWS_AS(conjugate(x, singular, all), NumericalError);
    const BlockElement ill(one, {mat({{0, 0}, {0, 1e13}})});
    CHECK_THROWS_AS(conjugate(x, ill, all), NumericalError);
    CHECK_THROWS_AS(conjugate(x, i, IdealSpec()), PreconditionError);
  }

  SUBCASE("similarity invariants") {
    Rng rng(10);
    const std::vector<int> dims{3, 2, 4};
    const IdealSpec s({0, 2});
    for (int trial = 0; trial < 30; ++trial) {
      const auto z = random_element(rng, dims);
      BlockElement w = BlockElement::zero(BlockAlgebra(dims));
      for (std::size_t k : s.support()) {
        const auto d = static_cast<Eigen::Index>(dims[k]);
        w.block(k) = random_conditioned(rng, d, 50.0) - CMatrix::Identity(d, d);
      }
      const auto c = conjugate(z, w, s);
      const double rho = spectral_radius(z);
      CHECK(std::abs(spectral_radius(c) - rho) <= 1e-8 * (1.0 + rho));
      CHECK(quotient(c, s) == quotient(z, s));
      CHECK(conjugator_condition(w) <= 50.0 * (1 + 1e-10));
    }
  }
}
