#pragma once

#include <cstdint>
#include <memory>

#include "pframe/nspace.hpp"
#include "pframe/optimizer.hpp"

namespace pframe {

using SpacePtr = std::shared_ptr<const NSpace>;

enum class ConstructionPolicy { strict, project };

/// Bounded b-linear functional T(x, a2, ..., an) = <t, x>.
///
/// Only the fixed anchor tail is ever evaluated, so T is carried by a single
/// coefficient vector t. Boundedness against the anchored seminorm is
/// equivalent to t being orthogonal to every anchor.
class BFunctional {
 public:
  BFunctional(SpacePtr space, Vector coeffs);

  const Vector& coeffs() const { return coeffs_; }
  const NSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

 private:
  SpacePtr space_;
  Vector coeffs_;
};

/// Builds a functional from ambient coefficients. `project` replaces t by
/// P_U t; `strict` throws UnboundedError when t has an anchor component
/// larger than 1e-10 * ||t|| * ||a_j||.
BFunctional make_functional(SpacePtr space, const Vector& t,
                            ConstructionPolicy policy = ConstructionPolicy::strict);

double evaluate(const BFunctional& functional, const Vector& x);

/// Closed form ||t|| / volume(anchors).
double functional_norm(const BFunctional& functional);

/// Optimizer estimates of the three equivalent norm formulas:
/// sup over seminorm <= 1, sup over seminorm = 1, sup of the ratio.
struct NormEstimates {
  double over_ball;
  double over_sphere;
  double ratio;
};

NormEstimates functional_norm_estimates(const BFunctional& functional,
                                        const OptimizerConfig& config);

struct DualNormIdentity {
  double lhs;  // anchored seminorm of x
  double rhs;  // sup of |T(x)| / ||T|| over sampled and analytic functionals
  double worst_sample_excess;  // max over samples of ratio - lhs (should be <= 0)
};

/// Throws DegenerateError when the seminorm of x vanishes.
DualNormIdentity dual_norm_identity_check(const SpacePtr& space, const Vector& x,
                                          int samples, std::uint64_t seed);

}  // namespace pframe
