#include <doctest.h>

#include <algorithm>

#include "alglift/polynomial.hpp"
#include "test_util.hpp"

using namespace alglift;
using alglift::test::dist;
using alglift::test::mat;

TEST_CASE("factor_from_coefficients") {
  SUBCASE("x^2 is a double root at 0") {
    const auto p = factor_from_coefficients({1.0, 0.0, 0.0});
    REQUIRE(p.size() == 1);
    CHECK(std::abs(p.factors()[0].root) == 0.0);
    CHECK(p.factors()[0].mult == 2);
  }
  SUBCASE("x^3 - 2x^2 factors as (x-2) x^2") {
    // (x-2) x^2 expanded by hand is x^3 - 2x^2.
    const RootedPolynomial factored({{2.0, 1}, {0.0, 2}});
    const auto coeffs = factored.expand();
    REQUIRE(coeffs.size() == 4);
    CHECK(coeffs[0] == Complex(1.0));
    CHECK(coeffs[1] == Complex(-2.0));
    CHECK(coeffs[2] == Complex(0.0));
    CHECK(coeffs[3] == Complex(0.0));

    const auto p = factor_from_coefficients({1.0, -2.0, 0.0, 0.0});
    REQUIRE(p.size() == 2);
    CHECK(std::abs(p.factors()[0].root - 2.0) < 1e-12);
    CHECK(p.factors()[0].mult == 1);
    CHECK(std::abs(p.factors()[1].root) < 1e-12);
    CHECK(p.factors()[1].mult == 2);
  }
  SUBCASE("linear") {
    const auto p = factor_from_coefficients({1.0, -5.0});
    REQUIRE(p.size() == 1);
    CHECK(std::abs(p.factors()[0].root - 5.0) < 1e-14);
  }
  SUBCASE("non-monic input is normalized") {
    const auto p = factor_from_coefficients({3.0, -15.0});
    CHECK(std::abs(p.factors()[0].root - 5.0) < 1e-14);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(factor_from_coefficients({}), PreconditionError);
    CHECK_THROWS_AS(factor_from_coefficients({4.0}), PreconditionError);
    CHECK_THROWS_AS(factor_from_coefficients({0.0, 1.0, 2.0}), PreconditionError);
  }
}

TEST_CASE("canonical_order") {
  SUBCASE("larger modulus first") {
    const auto p = canonical_order(RootedPolynomial({{1.0, 1}, {-2.0, 1}}));
    CHECK(p.factors()[0].root == Complex(-2.0));
    CHECK(p.factors()[1].root == Complex(1.0));
  }
  SUBCASE("equal moduli: smaller argument first") {
    const auto p = canonical_order(RootedPolynomial({{Complex(0, 2), 1}, {-2.0, 1}}));
    CHECK(p.factors()[0].root == Complex(0, 2));
    CHECK(p.factors()[1].root == Complex(-2.0));
    const auto q = canonical_order(RootedPolynomial({{-2.0, 1}, {Complex(0, 2), 1}}));
    CHECK(q == p);
  }
  SUBCASE("negative zero imaginary part maps to argument pi") {
    const auto p = canonical_order(RootedPolynomial({{Complex(-2.0, -0.0), 1}, {Complex(0, 2), 1}}));
    CHECK(p.factors()[0].root == Complex(0, 2));
  }
  SUBCASE("single root unchanged") {
    const RootedPolynomial p({{Complex(1, 1), 3}});
    CHECK(canonical_order(p) == p);
  }
  SUBCASE("idempotent permutation on random inputs") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = random_polynomial(rng, 6, 5);
      std::vector<Factor> shuffled = p.factors();
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto once = canonical_order(RootedPolynomial(shuffled));
      CHECK(canonical_order(once) == once);
      CHECK(once.is_canonical());
      CHECK(once.size() == shuffled.size());
      for (const auto& f : shuffled)
        CHECK(std::find(once.factors().begin(), once.factors().end(), f) != once.factors().end());
    }
  }
}

TEST_CASE("evaluate") {
  const CMatrix nil = mat({{0, 2}, {0, 0}});
  CHECK(evaluate(RootedPolynomial({{0.0, 2}}), nil).isZero(0.0));
  CHECK(evaluate(RootedPolynomial({{2.0, 1}, {0.0, 2}}), nil).isZero(0.0));
  CHECK(evaluate(RootedPolynomial({{1.0, 1}}), CMatrix::Identity(3, 3)).isZero(0.0));
  CHECK_THROWS_AS(evaluate(RootedPolynomial({{1.0, 1}}), CMatrix::Zero(2, 3)), PreconditionError);
  CHECK(evaluate(RootedPolynomial(), CMatrix::Identity(2, 2)) == CMatrix::Identity(2, 2));

  SUBCASE("factor order does not matter") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_polynomial(rng, 5, 4);
      const CMatrix t = random_gaussian(rng, 6, 6);
      std::vector<Factor> rev(p.factors().rbegin(), p.factors().rend());
      const CMatrix a = evaluate(p, t);
      const CMatrix b = evaluate(RootedPolynomial(rev), t);
      const double scale = std::pow(std::max(1.0, linalg::op_norm(t)) + p.max_root_modulus(), p.degree());
      CHECK(dist(a, b) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("residual_after_peel") {
  const RootedPolynomial p({{2.0, 1}, {0.0, 2}});
  CHECK(residual_after_peel(p, 1) == RootedPolynomial({{0.0, 2}}));
  CHECK(residual_after_peel(p, 0) == p);
  CHECK(residual_after_peel(p, 2).is_empty_product());
  CHECK(residual_after_peel(p, 2).degree() == 0);
  CHECK_THROWS_AS(residual_after_peel(p, 3), PreconditionError);
}

TEST_CASE("rooted polynomial invariants") {
  CHECK_THROWS_AS(RootedPolynomial({{1.0, 0}}), PreconditionError);
  CHECK_THROWS_AS(RootedPolynomial({{1.0, 1}, {1.0, 2}}), PreconditionError);
}

TEST_CASE("factoring inverts expansion for separated roots") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<Factor> fs;
    while (static_cast<int>(fs.size()) < n) {
      const Complex z(std::uniform_real_distribution<double>(-2, 2)(rng),
                      std::uniform_real_distribution<double>(-2, 2)(rng));
      bool ok = true;
      for (const auto& f : fs) ok = ok && std::abs(f.root - z) >= 0.3;
      if (ok) fs.push_back({z, 1});
    }
    const RootedPolynomial p(fs);
    const auto q = factor_from_coefficients(p.expand());
    REQUIRE(q.size() == p.size());
    const double tol = default_cluster_tol(p.max_root_modulus());
    for (const auto& f : p.factors()) {
      auto it = std::find_if(q.factors().begin(), q.factors().end(),
                             [&](const Factor& g) { return std::abs(g.root - f.root) <= tol; });
      CHECK(it != q.factors().end());
    }
  }
}

TEST_CASE("multiple roots merge under a looser cluster tolerance") {
  const RootedPolynomial p({{Complex(1.5, 0.5), 2}, {-1.0, 3}});
  const auto q = factor_from_coefficients(p.expand(), 1e-3);
  REQUIRE(q.size() == 2);
  CHECK(q.factors()[0].mult + q.factors()[1].mult == 5);
  for (const auto& f : q.factors()) {
    if (f.mult == 2) CHECK(std::abs(f.root - Complex(1.5, 0.5)) < 1e-6);
    if (f.mult == 3) CHECK(std::abs(f.root + 1.0) < 1e-4);
  }
}
