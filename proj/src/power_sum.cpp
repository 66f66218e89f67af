#include "power_sum.hpp"

#include <cmath>

namespace pframe::detail {

double power_sum(const Vector& z, double r) {
  double s = 0.0;
  if (r == 2.0) return z.squaredNorm();
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::pow(std::abs(z[i]), r);
  return s;
}

namespace {

// r * sign(z) |z|^(r-1), clamped to 0 for |z| < 1e-14.
Vector power_sum_weights(const Vector& z, double r) {
  Vector w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]);
    w[i] = a < 1e-14 ? 0.0 : r * std::copysign(std::pow(a, r - 1.0), z[i]);
  }
  return w;
}

}  // namespace

double PowerSumForm::value(const Vector& c) const {
  double total = constant_;
  for (const auto& term : terms_) total += term.weight * power_sum(term.columns.transpose() * c, exponent_);
  return total;
}

Vector PowerSumForm::gradient(const Vector& c) const {
  Vector g = Vector::Zero(dim_);
  for (const auto& term : terms_) {
    const Vector z = term.columns.transpose() * c;
    g += term.weight * (term.columns * power_sum_weights(z, exponent_));
  }
  return g;
}

double PowerSumForm::magnitude_bound() const {
  double total = std::abs(constant_);
  for (const auto& term : terms_) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < term.columns.cols(); ++i) s += std::pow(term.columns.col(i).norm(), exponent_);
    total += std::abs(term.weight) * s;
  }
  return total;
}

SphereObjective PowerSumForm::objective() const {
  return {[this](const Vector& c) { return value(c); },
          [this](const Vector& c) { return gradient(c); }};
}

SphereExtremes power_sum_extremes(const Matrix& columns, double r, double scale,
                                  const OptimizerConfig& config) {
  const auto k = static_cast<int>(columns.rows());
  const Matrix gram = columns * columns.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);

  if (r == 2.0) {
    const Vector lo = es.eigenvectors().col(0);
    const Vector hi = es.eigenvectors().col(k - 1);
    const double lower = std::max(es.eigenvalues()[0], 0.0) * scale;
    const double upper = std::max(es.eigenvalues()[k - 1], 0.0) * scale;
    return {std::min(lower, upper), upper, lo, hi, true, false};
  }

  PowerSumForm form(k, r);
  form.add(columns, scale);
  SphereProblem problem;
  problem.intrinsic_dim = k;
  problem.objective = form.objective();
  problem.config = config;
  for (int j = 0; j < k; ++j) problem.hints.push_back(es.eigenvectors().col(j));

  problem.mode = Extremum::min;
  const ExtremumResult low = sphere_extremum(problem);
  problem.mode = Extremum::max;
  ExtremumResult high = sphere_extremum(problem);

  // The sum is convex, so linearize-and-renormalize never decreases it.
  Vector u = high.argument;
  double best = high.value;
  for (int it = 0; it < config.max_iters; ++it) {
    const Vector z = columns.transpose() * u;
    Vector w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = std::copysign(std::pow(std::abs(z[i]), r - 1.0), z[i]);
    const Vector next_raw = columns * w;
    if (next_raw.norm() == 0.0) break;
    const Vector next = next_raw.normalized();
    const double value = form.value(next);
    if (!(value > best * (1.0 + 1e-16))) break;
    best = value;
    u = next;
  }
  high.value = best;
  high.argument = u;

  const double lower = std::max(low.value, 0.0);
  return {std::min(lower, high.value), high.value, low.argument, high.argument, false,
          low.grid_won || high.grid_won};
}

ExtremumResult maximize_form(const PowerSumForm& form, const OptimizerConfig& config) {
  SphereProblem problem;
  problem.intrinsic_dim = form.dim();
  problem.objective = form.objective();
  problem.mode = Extremum::max;
  problem.config = config;
  return sphere_extremum(problem);
}

}  // namespace pframe::detail
