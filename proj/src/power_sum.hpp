#pragma once

#include <vector>

#include "pframe/nspace.hpp"
#include "pframe/optimizer.hpp"

namespace pframe::detail {

/// sum_j weight_j * sum_i |(C_j^T c)_i|^r + constant, on unit c in R^k.
///
/// Every "for all x" statement in the frame inequalities is a combination
/// of such sums once restricted to the unit sphere of U.
class PowerSumForm {
 public:
  PowerSumForm(int dim, double exponent) : dim_(dim), exponent_(exponent) {}

  void add(Matrix columns, double weight) { terms_.push_back({std::move(columns), weight}); }
  void add_constant(double c) { constant_ += c; }

  int dim() const { return dim_; }
  double exponent() const { return exponent_; }

  double value(const Vector& c) const;
  Vector gradient(const Vector& c) const;

  /// Cheap bound on the magnitude of the form over the sphere:
  /// sum_j |weight_j| * sum_i ||col_i||^r + |constant|.
  double magnitude_bound() const;

  SphereObjective objective() const;

 private:
  struct Term {
    Matrix columns;
    double weight;
  };
  int dim_;
  double exponent_;
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

double power_sum(const Vector& z, double r);

/// Extremes of sum_i |(C^T c)_i|^r * scale over unit c, with the exact
/// eigen path for r = 2 and the optimizer otherwise.
struct SphereExtremes {
  double lower;
  double upper;
  Vector arg_lower;  // complement coordinates
  Vector arg_upper;
  bool spectral;
  bool grid_won;
};

SphereExtremes power_sum_extremes(const Matrix& columns, double r, double scale,
                                  const OptimizerConfig& config);

/// Maximum of a power-sum form over the unit sphere; used for hypothesis margins.
ExtremumResult maximize_form(const PowerSumForm& form, const OptimizerConfig& config);

}  // namespace pframe::detail
