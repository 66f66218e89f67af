// Reference computations that avoid the library's own code paths.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "pframe/nspace.hpp"
#include "pframe/rng.hpp"

namespace oracle {

using pframe::Matrix;
using pframe::Vector;

// Parallelotope volume as the product of Gram-Schmidt residual norms.
inline double gram_volume(const std::vector<Vector>& vs) {
  std::vector<Vector> basis;
  double volume = 1.0;
  for (const auto& v : vs) {
    Vector r = v;
    for (const auto& b : basis) r -= r.dot(b) * b;
    const double n = r.norm();
    volume *= n;
    if (n == 0.0) return 0.0;
    basis.push_back(r / n);
  }
  return volume;
}

// Normal-equation projection onto the orthogonal complement of the anchors.
inline Vector project_out(const std::vector<Vector>& anchors, const Vector& x) {
  if (anchors.empty()) return x;
  Matrix a(x.size(), static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t j = 0; j < anchors.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = anchors[j];
  const Vector coeffs = (a.transpose() * a).ldlt().solve(a.transpose() * x);
  return x - a * coeffs;
}

// Orthonormal basis of the complement by Gram-Schmidt over the standard basis.
inline Matrix complement_basis(const std::vector<Vector>& anchors, int d) {
  std::vector<Vector> basis;
  for (const auto& a : anchors) {
    Vector r = a;
    for (const auto& b : basis) r -= r.dot(b) * b;
    basis.push_back(r.normalized());
  }
  const std::size_t fixed = basis.size();
  for (int i = 0; i < d && static_cast<int>(basis.size()) < d; ++i) {
    Vector r = Vector::Unit(d, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) r -= r.dot(b) * b;
    }
    if (r.norm() > 1e-6) basis.push_back(r.normalized());
  }
  Matrix out(d, static_cast<Eigen::Index>(basis.size() - fixed));
  for (std::size_t j = fixed; j < basis.size(); ++j) out.col(static_cast<Eigen::Index>(j - fixed)) = basis[j];
  return out;
}

struct Bounds {
  double lower;
  double upper;
};

// p = 2 frame bounds from singular values of the restricted coefficient matrix.
inline Bounds quadratic_bounds(const std::vector<Vector>& anchors, const std::vector<Vector>& coeffs) {
  const int d = static_cast<int>(coeffs.front().size());
  const Matrix u = complement_basis(anchors, d);
  Matrix c(u.cols(), static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = u.transpose() * coeffs[i];
  Eigen::JacobiSVD<Matrix> svd(c);
  const auto& s = svd.singularValues();
  const double v2 = std::pow(gram_volume(anchors), 2.0);
  const double smallest = c.cols() >= c.rows() ? s(s.size() - 1) : 0.0;
  return {smallest * smallest / v2, s(0) * s(0) / v2};
}

// Extremes of f on the unit circle: dense sweep, then golden-section polish.
inline Bounds circle_extremes(const std::function<double(double)>& f, int samples = 20000) {
  auto polish = [&](double center, double width, bool maximize) {
    double a = center - width, b = center + width;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
      const double c = b - g * (b - a), e = a + g * (b - a);
      const bool keep_left = maximize ? f(c) > f(e) : f(c) < f(e);
      if (keep_left) b = e; else a = c;
    }
    return f(0.5 * (a + b));
  };
  const double step = 2.0 * std::numbers::pi / samples;
  double lo_angle = 0.0, hi_angle = 0.0, lo = f(0.0), hi = lo;
  for (int i = 1; i < samples; ++i) {
    const double angle = i * step;
    const double v = f(angle);
    if (v < lo) { lo = v; lo_angle = angle; }
    if (v > hi) { hi = v; hi_angle = angle; }
  }
  return {std::min(lo, polish(lo_angle, step, false)), std::max(hi, polish(hi_angle, step, true))};
}

inline std::vector<Vector> random_vectors(pframe::Rng& rng, int count, int d) {
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.normal_vector(d));
  return out;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle
