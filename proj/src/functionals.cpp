#include "pframe/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "pframe/errors.hpp"
#include "pframe/rng.hpp"

namespace pframe {

BFunctional::BFunctional(SpacePtr space, Vector coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw InputError("functional without a space");
  require_vector(coeffs_, space_->dimension(), "functional coefficients");
}

BFunctional make_functional(SpacePtr space, const Vector& t, ConstructionPolicy policy) {
  if (!space) throw InputError("functional without a space");
  require_vector(t, space->dimension(), "functional coefficients");
  if (policy == ConstructionPolicy::project) {
    return BFunctional(space, space->project_complement(t));
  }
  const double tn = t.norm();
  for (const auto& a : space->anchors().anchors()) {
    if (std::abs(t.dot(a)) > 1e-10 * tn * a.norm()) {
      throw UnboundedError("functional does not annihilate the anchor span");
    }
  }
  return BFunctional(std::move(space), t);
}

double evaluate(const BFunctional& functional, const Vector& x) {
  require_vector(x, functional.space().dimension(), "evaluation point");
  return functional.coeffs().dot(x);
}

double functional_norm(const BFunctional& functional) {
  return functional.coeffs().norm() / functional.space().anchor_volume();
}

NormEstimates functional_norm_estimates(const BFunctional& functional,
                                        const OptimizerConfig& config) {
  const NSpace& space = functional.space();
  const Vector& t = functional.coeffs();
  const Matrix& basis = space.complement_basis();
  const double volume = space.anchor_volume();
  const int k = space.complement_dim();

  // Seminorm = 1 is the image of the unit sphere of U under u -> u / V.
  SphereProblem sphere;
  sphere.intrinsic_dim = k;
  sphere.mode = Extremum::max;
  sphere.config = config;
  const Vector tc = basis.transpose() * t;
  sphere.objective.value = [&](const Vector& c) { return std::abs(tc.dot(c)) / volume; };
  sphere.objective.gradient = [&](const Vector& c) {
    return Vector((tc.dot(c) >= 0.0 ? 1.0 : -1.0) * tc / volume);
  };

  // Seminorm <= 1: the unit ball of U is the shadow of the upper unit
  // hemisphere of U x R.
  SphereProblem ball;
  ball.intrinsic_dim = k + 1;
  ball.mode = Extremum::max;
  ball.config = config;
  ball.objective.value = [&](const Vector& w) { return std::abs(tc.dot(w.head(k))) / volume; };
  ball.objective.gradient = [&](const Vector& w) {
    Vector g = Vector::Zero(k + 1);
    g.head(k) = (tc.dot(w.head(k)) >= 0.0 ? 1.0 : -1.0) * tc / volume;
    return g;
  };

  // Ratio over ambient x; the seminorm goes through the Gram volume. The
  // ratio depends only on the direction of P_U x, so points within 1e-3 of
  // the kernel (where the Gram volume is ill-conditioned) are set to 0
  // without changing the supremum.
  constexpr double kKernelGuard = 1e-3;
  SphereProblem ratio;
  ratio.intrinsic_dim = space.dimension();
  ratio.mode = Extremum::max;
  ratio.config = config;
  ratio.objective.value = [&](const Vector& x) {
    if (space.project_complement(x).norm() < kKernelGuard * x.norm()) return 0.0;
    const double s = space.anchored_seminorm(x);
    return s > 0.0 ? std::abs(t.dot(x)) / s : 0.0;
  };
  ratio.objective.gradient = [&](const Vector& x) {
    const Vector px = space.project_complement(x);
    const double n = px.norm();
    if (!(n >= kKernelGuard * x.norm()) || !(n > 0.0)) return Vector(Vector::Zero(x.size()));
    const double dot = t.dot(x);
    return Vector(((dot >= 0.0 ? 1.0 : -1.0) * t - std::abs(dot) * px / (n * n)) / (volume * n));
  };

  return {sphere_extremum(ball).value, sphere_extremum(sphere).value,
          sphere_extremum(ratio).value};
}

DualNormIdentity dual_norm_identity_check(const SpacePtr& space, const Vector& x, int samples,
                                          std::uint64_t seed) {
  if (samples < 1) throw InputError("dual_norm_identity_check: samples must be positive");
  const double lhs = space->anchored_seminorm(x);
  if (!(lhs > 0.0)) throw DegenerateError("dual_norm_identity_check: seminorm of x is zero");

  Rng rng(seed);
  double rhs = 0.0;
  double worst = -lhs;
  for (int s = 0; s < samples; ++s) {
    const Vector t = space->from_complement(rng.normal_vector(space->complement_dim()));
    const BFunctional functional(space, t);
    const double norm = functional_norm(functional);
    if (!(norm > 0.0)) continue;
    const double ratio = std::abs(evaluate(functional, x)) / norm;
    rhs = std::max(rhs, ratio);
    worst = std::max(worst, ratio - lhs);
  }
  const BFunctional maximizer(space, space->project_complement(x));
  rhs = std::max(rhs, std::abs(evaluate(maximizer, x)) / functional_norm(maximizer));
  return {lhs, rhs, worst};
}

}  // namespace pframe
