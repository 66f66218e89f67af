#include "pframe/frames.hpp"

#include <algorithm>
#include <cmath>

#include "pframe/errors.hpp"
#include "power_sum.hpp"

namespace pframe {

double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InputError("exponent p must lie in (1, inf)");
  return p / (p - 1.0);
}

PFrameFamily::PFrameFamily(std::vector<BFunctional> members, double p)
    : members_(std::move(members)), p_(p) {
  conjugate_exponent(p_);
  if (members_.empty()) throw InputError("a family needs at least one member");
  space_ = members_.front().space_ptr();
  for (const auto& m : members_) {
    if (m.space_ptr() != space_ && !(m.space() == *space_)) {
      throw InputError("family members act on different spaces");
    }
  }
}

PFrameFamily::PFrameFamily(SpacePtr space, const std::vector<Vector>& coeffs, double p,
                           ConstructionPolicy policy)
    : PFrameFamily(
          [&] {
            std::vector<BFunctional> members;
            members.reserve(coeffs.size());
            for (const auto& t : coeffs) members.push_back(make_functional(space, t, policy));
            return members;
          }(),
          p) {}

Matrix PFrameFamily::coefficient_matrix() const {
  Matrix m(space_->dimension(), static_cast<Eigen::Index>(members_.size()));
  for (std::size_t i = 0; i < members_.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = members_[i].coeffs();
  return m;
}

Matrix PFrameFamily::complement_matrix() const {
  return space_->complement_basis().transpose() * coefficient_matrix();
}

std::string to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::spectral: return "spectral";
    case BoundMethod::optimizer: return "optimizer";
    case BoundMethod::grid: return "grid";
  }
  return "unknown";
}

double frame_sum(const PFrameFamily& family, const Vector& x) {
  require_vector(x, family.space().dimension(), "frame_sum argument");
  return detail::power_sum(family.coefficient_matrix().transpose() * x, family.p());
}

std::vector<double> analysis_sequence(const PFrameFamily& family, const Vector& x) {
  std::vector<double> out;
  out.reserve(family.size());
  for (const auto& m : family.members()) out.push_back(evaluate(m, x));
  return out;
}

namespace {

FrameBounds from_extremes(const detail::SphereExtremes& e, const NSpace& space) {
  FrameBounds b;
  b.lower = e.lower;
  b.upper = e.upper;
  b.arg_lower = space.from_complement(e.arg_lower);
  b.arg_upper = space.from_complement(e.arg_upper);
  b.method = e.spectral ? BoundMethod::spectral
                        : (e.grid_won ? BoundMethod::grid : BoundMethod::optimizer);
  return b;
}

void require_compatible(const PFrameFamily& a, const PFrameFamily& b) {
  if (a.p() != b.p()) throw InputError("families use different exponents");
  if (a.size() != b.size()) throw InputError("families have different cardinalities");
  if (a.space_ptr() != b.space_ptr() && !(a.space() == b.space())) {
    throw InputError("families act on different spaces");
  }
}

}  // namespace

FrameBounds optimal_bounds(const PFrameFamily& family, const OptimizerConfig& config) {
  const NSpace& space = family.space();
  if (space.complement_dim() < 1) throw DegenerateError("complement subspace is trivial");
  const double scale = std::pow(space.anchor_volume(), -family.p());
  return from_extremes(detail::power_sum_extremes(family.complement_matrix(), family.p(), scale, config),
                       space);
}

bool lower_bound_positive(double lower, double upper) {
  return upper > 0.0 && lower > 1e-9 * upper;
}

FrameVerdict is_p_frame(const PFrameFamily& family, const OptimizerConfig& config) {
  FrameBounds b = optimal_bounds(family, config);
  return {lower_bound_positive(b.lower, b.upper), std::move(b)};
}

FrameVerdict is_p_bessel(const PFrameFamily& family, std::optional<double> claimed_upper,
                         const OptimizerConfig& config) {
  FrameBounds b = optimal_bounds(family, config);
  bool holds = std::isfinite(b.upper);
  if (claimed_upper) holds = holds && b.upper <= *claimed_upper * (1.0 + 1e-9);
  return {holds, std::move(b)};
}

PFrameFamily scale_family(const PFrameFamily& family, double factor) {
  std::vector<BFunctional> members;
  for (const auto& m : family.members()) members.emplace_back(family.space_ptr(), factor * m.coeffs());
  return PFrameFamily(std::move(members), family.p());
}

PFrameFamily parseval_rescale(const PFrameFamily& family, const OptimizerConfig& config) {
  const FrameBounds b = optimal_bounds(family, config);
  if (!(b.lower > 0.0) || std::abs(b.upper - b.lower) > 1e-8 * b.upper) {
    throw PreconditionError("parseval_rescale needs a tight frame (A = B > 0)");
  }
  return scale_family(family, std::pow(b.lower, -1.0 / family.p()));
}

PFrameFamily sum_families(const PFrameFamily& first, const PFrameFamily& second) {
  return combine_families({first, second}, {1.0, 1.0});
}

PFrameFamily combine_families(const std::vector<PFrameFamily>& families,
                              const std::vector<double>& weights) {
  if (families.empty()) throw InputError("combine_families: no families");
  if (families.size() != weights.size()) throw InputError("combine_families: weight count mismatch");
  for (const auto& f : families) require_compatible(families.front(), f);
  const auto& base = families.front();
  std::vector<BFunctional> members;
  for (std::size_t i = 0; i < base.size(); ++i) {
    Vector t = Vector::Zero(base.space().dimension());
    for (std::size_t k = 0; k < families.size(); ++k) t += weights[k] * families[k].members()[i].coeffs();
    members.emplace_back(base.space_ptr(), std::move(t));
  }
  return PFrameFamily(std::move(members), base.p());
}

BFunctional synthesis_apply(const PFrameFamily& family, const std::vector<double>& d) {
  if (d.size() != family.size()) throw InputError("synthesis_apply: coefficient count mismatch");
  Vector t = Vector::Zero(family.space().dimension());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i])) throw InputError("synthesis_apply: non-finite coefficient");
    t += d[i] * family.members()[i].coeffs();
  }
  return BFunctional(family.space_ptr(), std::move(t));
}

double synthesis_norm(const PFrameFamily& family, const OptimizerConfig& config) {
  return lp_operator_norm(family.coefficient_matrix(), family.q(), OutputNorm::euclidean,
                          1.0 / family.space().anchor_volume(), config);
}

QDualFamily canonical_dual(const PFrameFamily& family, const OptimizerConfig& /*config*/) {
  const NSpace& space = family.space();
  const Matrix c = family.complement_matrix();
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Eigen::Index k = c.rows();
  // Rank test matching the p = 2 frame threshold A > 1e-9 B.
  if (sv.size() < k || !(sv[0] > 0.0) || !(sv[k - 1] > std::sqrt(1e-9) * sv[0])) {
    throw DegenerateError("canonical_dual: family is not a frame");
  }
  // pinv(C)^T = U S^-1 V^T; its columns are the duals in complement coordinates.
  const Matrix dual_coords =
      svd.matrixU() * sv.cwiseInverse().asDiagonal() * svd.matrixV().transpose();
  QDualFamily dual;
  dual.q = family.q();
  for (Eigen::Index i = 0; i < dual_coords.cols(); ++i) {
    dual.members.push_back(space.from_complement(dual_coords.col(i)));
  }
  return dual;
}

Vector reconstruct(const PFrameFamily& family, const QDualFamily& dual, const Vector& x) {
  if (dual.members.size() != family.size()) throw InputError("reconstruct: cardinality mismatch");
  const NSpace& space = family.space();
  Vector out = Vector::Zero(space.dimension());
  for (std::size_t i = 0; i < family.size(); ++i) {
    out += evaluate(family.members()[i], x) * space.project_complement(dual.members[i]);
  }
  return out;
}

FrameBounds q_frame_bounds(const QDualFamily& dual, const NSpace& space, const OptimizerConfig& config) {
  if (space.complement_dim() < 1) throw DegenerateError("complement subspace is trivial");
  if (dual.members.empty()) throw InputError("q_frame_bounds: empty family");
  conjugate_exponent(dual.q);
  Matrix columns(space.complement_dim(), static_cast<Eigen::Index>(dual.members.size()));
  for (std::size_t i = 0; i < dual.members.size(); ++i) {
    columns.col(static_cast<Eigen::Index>(i)) = space.to_complement(dual.members[i]);
  }
  const double scale = std::pow(space.anchor_volume(), dual.q);
  return from_extremes(detail::power_sum_extremes(columns, dual.q, scale, config), space);
}

// ---------------------------------------------------------------------------

ProductSpace::ProductSpace(SpacePtr first, SpacePtr second, double p)
    : first_(std::move(first)), second_(std::move(second)), p_(p) {
  conjugate_exponent(p_);
  if (first_->order() != second_->order()) throw InputError("product spaces need the same order n");
}

std::vector<Vector> ProductSpace::anchors() const {
  std::vector<Vector> out;
  for (std::size_t j = 0; j < first_->anchors().size(); ++j) {
    Vector a(dimension());
    a << first_->anchors().anchors()[j], second_->anchors().anchors()[j];
    out.push_back(std::move(a));
  }
  return out;
}

Vector ProductSpace::first_part(const Vector& z) const {
  require_vector(z, dimension(), "product vector");
  return z.head(first_->dimension());
}

Vector ProductSpace::second_part(const Vector& z) const {
  require_vector(z, dimension(), "product vector");
  return z.tail(second_->dimension());
}

double ProductSpace::n_norm(std::span<const Vector> xs) const {
  std::vector<Vector> xparts, yparts;
  for (const auto& z : xs) {
    xparts.push_back(first_part(z));
    yparts.push_back(second_part(z));
  }
  return std::pow(std::pow(first_->n_norm(xparts), p_) + std::pow(second_->n_norm(yparts), p_),
                  1.0 / p_);
}

double ProductSpace::anchored_seminorm(const Vector& z) const {
  return std::pow(std::pow(first_->anchored_seminorm(first_part(z)), p_) +
                      std::pow(second_->anchored_seminorm(second_part(z)), p_),
                  1.0 / p_);
}

ProductFamily::ProductFamily(PFrameFamily first, PFrameFamily second)
    : first_(std::move(first)),
      second_(std::move(second)),
      space_(first_.space_ptr(), second_.space_ptr(), first_.p()) {
  if (first_.p() != second_.p()) throw InputError("product families need the same p");
  if (first_.size() != second_.size()) throw InputError("product families need the same cardinality");
}

std::vector<Vector> ProductFamily::member_coeffs() const {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < size(); ++i) {
    Vector t(space_.dimension());
    t << first_.members()[i].coeffs(), second_.members()[i].coeffs();
    out.push_back(std::move(t));
  }
  return out;
}

ProductFamily cartesian_product(const PFrameFamily& first, const PFrameFamily& second) {
  return ProductFamily(first, second);
}

double frame_sum(const ProductFamily& family, const Vector& z) {
  return frame_sum(family.first(), family.space().first_part(z)) +
         frame_sum(family.second(), family.space().second_part(z));
}

FrameBounds optimal_bounds(const ProductFamily& family, const OptimizerConfig& config) {
  const NSpace& x = family.first().space();
  const NSpace& y = family.second().space();
  const int kx = x.complement_dim();
  const int ky = y.complement_dim();
  const double p = family.p();
  const Matrix cx = family.first().complement_matrix();
  const Matrix cy = family.second().complement_matrix();
  const double vx = std::pow(x.anchor_volume(), p);
  const double vy = std::pow(y.anchor_volume(), p);

  detail::PowerSumForm numerator(kx + ky, p);
  {
    Matrix stacked = Matrix::Zero(kx + ky, cx.cols() + cy.cols());
    stacked.topLeftCorner(kx, cx.cols()) = cx;
    stacked.bottomRightCorner(ky, cy.cols()) = cy;
    numerator.add(std::move(stacked), 1.0);
  }
  auto denominator = [&](const Vector& c) {
    return vx * std::pow(c.head(kx).norm(), p) + vy * std::pow(c.tail(ky).norm(), p);
  };
  auto denominator_gradient = [&](const Vector& c) {
    Vector g(kx + ky);
    const double na = c.head(kx).norm();
    const double nb = c.tail(ky).norm();
    g.head(kx) = na > 1e-300 ? Vector(vx * p * std::pow(na, p - 2.0) * c.head(kx)) : Vector::Zero(kx);
    g.tail(ky) = nb > 1e-300 ? Vector(vy * p * std::pow(nb, p - 2.0) * c.tail(ky)) : Vector::Zero(ky);
    return g;
  };

  SphereProblem problem;
  problem.intrinsic_dim = kx + ky;
  problem.config = config;
  problem.objective.value = [&](const Vector& c) { return numerator.value(c) / denominator(c); };
  problem.objective.gradient = [&](const Vector& c) {
    const double n = numerator.value(c);
    const double d = denominator(c);
    return Vector((numerator.gradient(c) * d - n * denominator_gradient(c)) / (d * d));
  };

  // Pure-component extremizers seed the search; values come only from the
  // product objective.
  const FrameBounds bx = optimal_bounds(family.first(), config);
  const FrameBounds by = optimal_bounds(family.second(), config);
  auto embed = [&](const Vector& ux, const Vector& uy) {
    Vector c(kx + ky);
    c << ux, uy;
    return c;
  };
  const Vector zx = Vector::Zero(kx);
  const Vector zy = Vector::Zero(ky);

  problem.mode = Extremum::min;
  problem.hints = {embed(x.to_complement(bx.arg_lower), zy), embed(zx, y.to_complement(by.arg_lower))};
  const ExtremumResult low = sphere_extremum(problem);
  problem.mode = Extremum::max;
  problem.hints = {embed(x.to_complement(bx.arg_upper), zy), embed(zx, y.to_complement(by.arg_upper))};
  const ExtremumResult high = sphere_extremum(problem);

  auto to_ambient = [&](const Vector& c) {
    Vector z(x.dimension() + y.dimension());
    z << x.from_complement(c.head(kx)), y.from_complement(c.tail(ky));
    return z;
  };
  FrameBounds b;
  b.lower = std::min(std::max(low.value, 0.0), high.value);
  b.upper = high.value;
  b.arg_lower = to_ambient(low.argument);
  b.arg_upper = to_ambient(high.argument);
  b.method = (low.grid_won || high.grid_won) ? BoundMethod::grid : BoundMethod::optimizer;
  return b;
}

}  // namespace pframe
