#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pframe/errors.hpp"
#include "pframe/functionals.hpp"

using namespace pframe;

namespace {

Vector v3(double a, double b, double c) { return Vector{{a, b, c}}; }

SpacePtr space_with(const Vector& anchor) {
  return std::make_shared<const NSpace>(3, std::vector<Vector>{anchor});
}

}  // namespace

TEST(MakeFunctional, Policies) {
  const SpacePtr space = space_with(v3(1, 0, 0));
  EXPECT_NO_THROW(make_functional(space, v3(0, 0, 5)));
  EXPECT_THROW(make_functional(space, v3(1, 0, 0)), UnboundedError);
  const BFunctional projected = make_functional(space, v3(1, 0, 5), ConstructionPolicy::project);
  EXPECT_LT((projected.coeffs() - v3(0, 0, 5)).norm(), 1e-14);
}

TEST(Evaluate, Examples) {
  const SpacePtr space = space_with(v3(1, 0, 0));
  const BFunctional t = make_functional(space, v3(0, 0, 5));
  EXPECT_DOUBLE_EQ(evaluate(t, v3(1, 1, 2)), 10.0);
  EXPECT_EQ(evaluate(t, Vector::Zero(3)), 0.0);
  const Vector x = v3(0.3, -1, 2), y = v3(4, 0.5, -0.25);
  EXPECT_NEAR(evaluate(t, x + y), evaluate(t, x) + evaluate(t, y), 1e-13);
}

TEST(FunctionalNorm, ClosedForm) {
  EXPECT_DOUBLE_EQ(functional_norm(make_functional(space_with(v3(1, 0, 0)), v3(0, 0, 5))), 5.0);
  EXPECT_DOUBLE_EQ(functional_norm(make_functional(space_with(v3(2, 0, 0)), v3(0, 0, 5))), 2.5);
  EXPECT_EQ(functional_norm(make_functional(space_with(v3(2, 0, 0)), Vector::Zero(3))), 0.0);
}

TEST(FunctionalNorm, OptimizerFormulasAgree) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = rng.integer(2, 6);
    const int n = rng.integer(2, d);
    const auto anchors = oracle::random_vectors(rng, n - 1, d);
    const auto space = std::make_shared<const NSpace>(d, anchors);
    const Vector t = oracle::project_out(anchors, rng.normal_vector(d));
    const BFunctional f = make_functional(space, t, ConstructionPolicy::project);
    const double exact = t.norm() / oracle::gram_volume(anchors);
    OptimizerConfig config;
    config.seed = static_cast<std::uint64_t>(trial);
    const NormEstimates e = functional_norm_estimates(f, config);
    EXPECT_LT(oracle::relative_error(e.over_ball, exact), 1e-6);
    EXPECT_LT(oracle::relative_error(e.over_sphere, exact), 1e-6);
    EXPECT_LT(oracle::relative_error(e.ratio, exact), 1e-6);
  }
}

TEST(FunctionalNorm, BoundednessAndAnnihilation) {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(2, 7);
    const int n = rng.integer(2, d);
    const auto anchors = oracle::random_vectors(rng, n - 1, d);
    const auto space = std::make_shared<const NSpace>(d, anchors);
    const BFunctional f = make_functional(space, rng.normal_vector(d), ConstructionPolicy::project);
    for (const auto& a : anchors) EXPECT_LE(std::abs(evaluate(f, a)), 1e-10 * f.coeffs().norm() * a.norm());
    for (int s = 0; s < 10; ++s) {
      const Vector x = rng.normal_vector(d);
      EXPECT_LE(std::abs(evaluate(f, x)), functional_norm(f) * space->anchored_seminorm(x) + 1e-9);
    }
  }
}

TEST(DualNormIdentity, Examples) {
  const SpacePtr space = space_with(v3(0, 0, 1));
  const DualNormIdentity r = dual_norm_identity_check(space, v3(3, 4, 0), 64, 1);
  EXPECT_NEAR(r.lhs, 5.0, 1e-12);
  EXPECT_NEAR(r.rhs, 5.0, 1e-9);
  EXPECT_THROW(dual_norm_identity_check(space, v3(0, 0, 1), 8, 1), DegenerateError);
}

TEST(DualNormIdentity, SamplesNeverExceedSeminorm) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.integer(2, 6);
    const auto space = std::make_shared<const NSpace>(d, oracle::random_vectors(rng, rng.integer(1, d - 1), d));
    const DualNormIdentity r = dual_norm_identity_check(space, rng.normal_vector(d), 32, static_cast<std::uint64_t>(trial));
    EXPECT_LE(r.worst_sample_excess, 1e-9);
    EXPECT_LT(oracle::relative_error(r.lhs, r.rhs), 1e-9);
  }
}
