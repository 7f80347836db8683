#include <doctest.h>

#include "alglift/lifting.hpp"
#include "test_util.hpp"

using namespace alglift;
using alglift::test::dist;
using alglift::test::mat;

namespace {

double power_residual(const CMatrix& x, int n) {
  CMatrix p = CMatrix::Identity(x.rows(), x.cols());
  for (int i = 0; i < n; ++i) p = x * p;
  return linalg::op_norm(p) / std::pow(1 + linalg::op_norm(x), n);
}

CMatrix random_nilpotent(Rng& rng, Eigen::Index d, double size) {
  const CMatrix u = random_unitary(rng, d);
  CMatrix r = random_gaussian(rng, d, d).triangularView<Eigen::StrictlyUpper>();
  if (d > 1) r *= size / linalg::op_norm(r);
  return u * r * u.adjoint();
}

}  // namespace

TEST_CASE("conjugate_to_norm") {
  const BlockAlgebra alg({2, 2});
  const BlockElement x(alg, {mat({{0, 1}, {0, 0}}), mat({{0, 5}, {0, 0}})});
  const IdealSpec s({1});

  // The hand-computed conjugator diag(1, 5) does it exactly.
  const BlockElement i(alg, {CMatrix::Zero(2, 2), mat({{0, 0}, {0, 4}})});
  CHECK(dist(conjugate(x, i, s).block(1), mat({{0, 1}, {0, 0}})) <= 1e-15);

  const auto y = conjugate_to_norm(x, s, 1.0);
  CHECK(std::abs(norm(y) - 1.0) <= 1e-6);
  CHECK(y.block(0) == x.block(0));
  CHECK(power_residual(y.block(1), 2) <= 1e-10);

  SUBCASE("already at the target") {
    const BlockElement z(alg, {mat({{0, 1}, {0, 0}}), mat({{0, 0.5}, {0, 0}})});
    CHECK(conjugate_to_norm(z, s, 1.0) == z);
    const BlockElement scalar(alg, {mat({{0, 1}, {0, 0}}), mat({{0.3, 0}, {0, 0.3}})});
    CHECK(conjugate_to_norm(scalar, s, 1.0) == scalar);
  }
  SUBCASE("hypothesis violated") {
    const BlockElement big(alg, {mat({{0, 1}, {0, 0}}), mat({{2, 0}, {0, 0}})});
    CHECK_THROWS_AS(conjugate_to_norm(big, s, 1.0), PreconditionError);
    CHECK_THROWS_AS(conjugate_to_norm(x, s, 0.7), PreconditionError);
  }
}

TEST_CASE("lift_nilpotent") {
  const BlockAlgebra alg({2, 2});
  const IdealSpec s({1});
  const BlockElement x(BlockAlgebra({2}), {mat({{0, 1}, {0, 0}})});

  const auto lift = lift_nilpotent(alg, x, s, 2, 1.0);
  CHECK(lift.block(0) == x.block(0));
  CHECK(lift.block(1) == CMatrix::Zero(2, 2));

  const auto zero = lift_nilpotent(alg, BlockElement::zero(BlockAlgebra({2})), s, 2, 3.0);
  CHECK(zero == BlockElement::zero(alg));
  CHECK(lift_nilpotent(alg, BlockElement::zero(BlockAlgebra({2})), s, 2, 0.0) ==
        BlockElement::zero(alg));

  SUBCASE("adversarial seed") {
    const BlockElement seed(alg, {CMatrix::Zero(2, 2), mat({{0, 5}, {0, 0}})});
    const auto y = lift_nilpotent(alg, x, s, 2, 1.0, seed);
    CHECK(std::abs(norm(y) - 1.0) <= 1e-6);
    CHECK(power_residual(y.block(1), 2) <= 1e-10);
    CHECK(y.block(0) == x.block(0));
  }

  SUBCASE("random seeds up to ten times the norm") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 3);
      const BlockAlgebra a({n, n, 1 + static_cast<int>(rng() % 3)});
      const IdealSpec ideal({1, 2});
      const BlockElement q(BlockAlgebra({n}), {random_nilpotent(rng, n, 1.0)});
      BlockElement seed = BlockElement::zero(a);
      seed.block(1) = random_nilpotent(rng, n, 10.0);
      const auto y = lift_nilpotent(a, q, ideal, n, 1.0, seed);
      CHECK(std::abs(norm(y) - 1.0) <= 1e-6);
      CHECK(y.block(0) == q.block(0));
      for (const auto& b : y.blocks()) CHECK(power_residual(b, n) <= 1e-10);
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(lift_nilpotent(alg, x, s, 2, 0.5), PreconditionError);
    CHECK_THROWS_AS(lift_nilpotent(alg, x, s, 1, 1.0), RelationViolated);
  }
}

TEST_CASE("lift_projection_family") {
  SUBCASE("identity") {
    const BlockAlgebra alg({2, 3});
    const IdealChain chain({IdealSpec(), IdealSpec({1})});
    const BlockElement one(BlockAlgebra({2}), {CMatrix::Identity(2, 2)});
    const auto l = lift_projection_family(alg, {one}, chain);
    CHECK(l.stage_index == 1);
    REQUIRE(l.projections.size() == 1);
    CHECK(l.projections[0] == BlockElement::identity(alg));
  }
  SUBCASE("rank goes to the last member") {
    const BlockAlgebra alg({2, 3});
    const IdealChain chain({IdealSpec(), IdealSpec({1})});
    const BlockAlgebra q({2});
    const BlockElement p1(q, {mat({{1, 0}, {0, 0}})});
    const BlockElement p2(q, {mat({{0, 0}, {0, 1}})});
    const auto l = lift_projection_family(alg, {p1, p2}, chain);
    CHECK(l.projections[0] == BlockElement(alg, {mat({{1, 0}, {0, 0}}), CMatrix::Zero(3, 3)}));
    CHECK(l.projections[1] == BlockElement(alg, {mat({{0, 0}, {0, 1}}), CMatrix::Identity(3, 3)}));
  }
  SUBCASE("conjugated diagonal families") {
    Rng rng(42);
    const BlockAlgebra alg({4, 2, 3});
    const IdealChain chain({IdealSpec({2}), IdealSpec({1, 2})});
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix u = random_unitary(rng, 4);
      std::vector<BlockElement> fam;
      for (const auto& d : {CVector({{1, 0, 0, 0}}), CVector({{0, 1, 1, 0}}), CVector({{0, 0, 0, 1}})})
        fam.emplace_back(BlockAlgebra({4}), std::vector<CMatrix>{u * d.asDiagonal() * u.adjoint()});
      // Symmetrize so the family is exactly self-adjoint before the check.
      for (auto& f : fam) f.block(0) = (0.5 * (f.block(0) + f.block(0).adjoint())).eval();
      const auto l = lift_projection_family(alg, fam, chain);
      BlockElement sum = BlockElement::zero(l.projections[0].algebra());
      for (std::size_t i = 0; i < l.projections.size(); ++i) {
        const auto& p = l.projections[i];
        for (std::size_t k = 0; k < p.num_blocks(); ++k) {
          CHECK(dist(p.block(k) * p.block(k), p.block(k)) <= 1e-10);
          CHECK(dist(p.block(k), p.block(k).adjoint()) <= 1e-10);
          for (std::size_t j = i + 1; j < l.projections.size(); ++j)
            CHECK(linalg::op_norm(p.block(k) * l.projections[j].block(k)) <= 1e-10);
        }
        sum = sum + p;
      }
      CHECK(norm(sum - BlockElement::identity(sum.algebra())) <= 1e-10);
    }
  }
  SUBCASE("not a family") {
    const BlockAlgebra alg({2});
    const IdealChain chain({IdealSpec()});
    const BlockElement half(alg, {mat({{1, 0}, {0, 0}})});
    CHECK_THROWS_AS(lift_projection_family(alg, {half}, chain), PreconditionError);
  }
}

TEST_CASE("lift_polynomial_contraction") {
  SUBCASE("fully peeled") {
    LiftProblem pr{BlockAlgebra({2, 1}), IdealChain({IdealSpec({1})}),
                   BlockElement(BlockAlgebra({2}), {mat({{2, 0}, {0, 0}})}),
                   RootedPolynomial({{2.0, 1}, {0.0, 1}}), 2.0};
    const auto r = lift_polynomial_contraction(pr);
    CHECK(r.m == 2);
    CHECK(r.certificate.passes(pr.bound));
    CHECK(r.certificate.relation_residual <= 1e-14);
  }
  SUBCASE("zero-dimensional peel with a free block") {
    LiftProblem pr{BlockAlgebra({2, 2}), IdealChain({IdealSpec(), IdealSpec({1})}),
                   BlockElement(BlockAlgebra({2}), {mat({{0, 2}, {0, 0}})}),
                   RootedPolynomial({{2.0, 1}, {0.0, 2}}), 2.0};
    const auto r = lift_polynomial_contraction(pr);
    CHECK(r.m == 1);
    CHECK(r.stage_index == 1);
    CHECK(r.lift_blocks == std::vector<std::size_t>{0, 1});
    CHECK(std::abs(r.certificate.norm_of_lift - 2.0) <= 1e-6);
    CHECK(r.certificate.passes(pr.bound));
    const CMatrix& free = r.lift.block(1);
    const CMatrix two = 2.0 * CMatrix::Identity(2, 2);
    CHECK(linalg::op_norm((free - two) * free * free) <= 1e-8);
  }
  SUBCASE("zero") {
    LiftProblem pr{BlockAlgebra({1, 1}), IdealChain({IdealSpec({1})}),
                   BlockElement(BlockAlgebra({1}), {mat({{0}})}), RootedPolynomial({{0.0, 1}}), 0.0};
    const auto r = lift_polynomial_contraction(pr);
    CHECK(norm(r.lift) == 0.0);
    CHECK(r.certificate.passes(0.0));
  }
  SUBCASE("late stage forced by the bound") {
    // Nothing survives and every root exceeds C, so only the stage that
    // frees no block admits a lift.
    LiftProblem pr{BlockAlgebra({2, 1}), IdealChain({IdealSpec({0}), IdealSpec({0, 1})}),
                   BlockElement(BlockAlgebra(std::vector<int>{}), {}),
                   RootedPolynomial({{1.0, 1}, {Complex(0, 2), 1}}), 0.5};
    const auto r = lift_polynomial_contraction(pr);
    CHECK(r.stage_index == 2);
    CHECK_FALSE(stage_feasible_brute_force(pr, 1));
    CHECK(stage_feasible_brute_force(pr, 2));
    pr.chain = IdealChain({IdealSpec({0}), IdealSpec({0, 1})});
    pr.bound = 1.0;
    CHECK(lift_polynomial_contraction(pr).stage_index == 1);
  }
  SUBCASE("invalid problems") {
    LiftProblem pr{BlockAlgebra({2, 1}), IdealChain({IdealSpec({1})}),
                   BlockElement(BlockAlgebra({2}), {mat({{2, 0}, {0, 0}})}),
                   RootedPolynomial({{2.0, 1}, {0.0, 1}}), 1.0};
    CHECK_THROWS_AS(lift_polynomial_contraction(pr), PreconditionError);
    pr.bound = 2.0;
    pr.relation = RootedPolynomial({{2.0, 1}});
    CHECK_THROWS_AS(lift_polynomial_contraction(pr), RelationViolated);
  }
}

TEST_CASE("random lifting problems") {
  Rng rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pr = generate_lift_problem(rng, random_lift_spec(rng));
    const auto r = lift_polynomial_contraction(pr);
    CHECK(r.certificate.passes(pr.bound));
    CHECK(r.certificate.quotient_match);
    // The reported stage is the first one the brute-force scan admits.
    CHECK(stage_feasible_brute_force(pr, r.stage_index));
    for (std::size_t n = 1; n < r.stage_index; ++n) CHECK_FALSE(stage_feasible_brute_force(pr, n));
  }
}

TEST_CASE("finite_dim_approximants") {
  const CMatrix t = mat({{2, 0, 0}, {0, 0, 1}, {0, 0, 0}});
  const RootedPolynomial p({{2.0, 1}, {0.0, 2}});
  const auto set = finite_dim_approximants(t, p, {1, 3});
  REQUIRE(set.items.size() == 2);
  CHECK(dist(set.items[0].matrix, mat({{2}})) <= 1e-12);
  CHECK(relation_residual(p, set.items[0].matrix) <= 1e-12);
  CHECK(relation_residual(p, set.items[1].matrix) <= 1e-12);
  CHECK(dist(set.form.U * set.items[1].matrix * set.form.U.adjoint(), t) <= 1e-8);

  CHECK_THROWS_AS(finite_dim_approximants(t, p, {4}), PreconditionError);
  CHECK_THROWS_AS(finite_dim_approximants(t, p, {2, 1}), PreconditionError);

  SUBCASE("random conjugated instances") {
    Rng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
      InstanceSpec spec;
      spec.dim = 3 + static_cast<int>(rng() % 6);
      spec.polynomial = random_polynomial(rng, 4, 3);
      spec.full_chains = false;
      const auto inst = generate_instance(rng, spec);
      std::vector<int> dims;
      for (int d = 1; d <= spec.dim; ++d) dims.push_back(d);
      const auto s = finite_dim_approximants(inst.T, inst.polynomial, dims);
      const double tn = linalg::op_norm(inst.T);
      std::vector<double> prev;
      bool nonzero = false;
      for (const auto& a : s.items) {
        CHECK(a.used <= a.requested);
        if (a.used == 0) continue;
        CHECK(relation_residual(a.relation, a.matrix) <= 1e-8);
        CHECK(linalg::op_norm(a.matrix) <= tn + 1e-10);
        nonzero = nonzero || a.matrix.norm() > 0.0;
        const auto err = column_errors(s.form, a);
        if (!prev.empty())
          for (std::size_t j = 0; j < err.size(); ++j) CHECK(err[j] <= prev[j] + 1e-12);
        prev = err;
      }
      for (double e : prev) CHECK(e <= 1e-8 * (1 + tn));
      if (tn > 0.0) CHECK(nonzero);
    }
  }
}
