#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pframe {

struct OptimizerConfig {
  int starts = 32;
  int max_iters = 500;
  double step_shrink = 0.5;
  double tol = 1e-10;
  std::uint64_t seed = 0x5eedULL;
  double grid_resolution = 1e-3;  // radians; the grid runs for intrinsic_dim <= 3

  void validate() const;
};

enum class Extremum { min, max };

/// Scalar field on the unit sphere of R^k. `gradient` returns the ambient
/// gradient; when empty, central differences are used.
struct SphereObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct SphereProblem {
  int intrinsic_dim = 1;
  SphereObjective objective;
  Extremum mode = Extremum::max;
  OptimizerConfig config;
  /// Extra deterministic starting points tried before the seeded schedule.
  std::vector<Eigen::VectorXd> hints;
};

struct ExtremumResult {
  double value = 0.0;
  Eigen::VectorXd argument;
  /// |refined - grid| when the grid ran, otherwise 0.
  double certified_margin = 0.0;
  int iterations_used = 0;
  bool grid_ran = false;
  bool grid_won = false;
};

/// Multi-start Riemannian descent/ascent on the unit sphere, with an angular
/// grid cross-check for intrinsic_dim <= 3. Deterministic for a fixed config.
/// Throws NumericError when the objective is non-finite at a visited point.
ExtremumResult sphere_extremum(const SphereProblem& problem);

enum class OutputNorm { euclidean, lp };

/// Operator norm of `matrix` from the l^r unit sphere of its domain.
/// euclidean: sup ||M d||_2 * output_scale; lp: sup ||M d||_r / ||d||_r.
/// r = 2 uses the largest singular value exactly.
double lp_operator_norm(const Eigen::MatrixXd& matrix, double r, OutputNorm output,
                        double output_scale, const OptimizerConfig& config);

}  // namespace pframe
