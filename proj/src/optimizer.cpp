#include "pframe/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pframe/errors.hpp"

namespace pframe {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void OptimizerConfig::validate() const {
  if (starts < 1) throw InputError("optimizer: starts must be positive");
  if (max_iters < 1) throw InputError("optimizer: max_iters must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw InputError("optimizer: step_shrink must lie in (0, 1)");
  }
  if (!(tol > 0.0)) throw InputError("optimizer: tol must be positive");
  if (!(grid_resolution > 0.0)) throw InputError("optimizer: grid_resolution must be positive");
}

namespace {

constexpr std::array<int, 40> kPrimes = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,
                                         31,  37,  41,  43,  47,  53,  59,  61,  67,  71,
                                         73,  79,  83,  89,  97,  101, 103, 107, 109, 113,
                                         127, 131, 137, 139, 149, 151, 157, 163, 167, 173};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double fraction = 1.0 / base;
  while (index > 0) {
    result += fraction * static_cast<double>(index % base);
    index /= base;
    fraction /= base;
  }
  return result;
}

// Evaluates the objective, rejecting non-finite values with the offending point.
class Evaluator {
 public:
  Evaluator(const SphereObjective& objective, double sign)
      : objective_(objective), sign_(sign) {}

  double value(const VectorXd& u) const {
    const double v = objective_.value(u);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite objective value at [" << u.transpose() << "]";
      throw NumericError(os.str());
    }
    return sign_ * v;
  }

  // Tangential gradient of sign * f at unit u.
  VectorXd tangent_gradient(const VectorXd& u) const {
    VectorXd g;
    if (objective_.gradient) {
      g = objective_.gradient(u);
    } else {
      constexpr double h = 1e-6;
      g.resize(u.size());
      VectorXd shifted = u;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        shifted[i] = u[i] + h;
        const double fp = objective_.value(shifted);
        shifted[i] = u[i] - h;
        const double fm = objective_.value(shifted);
        shifted[i] = u[i];
        g[i] = (fp - fm) / (2.0 * h);
      }
    }
    if (!g.allFinite()) {
      std::ostringstream os;
      os << "non-finite objective gradient at [" << u.transpose() << "]";
      throw NumericError(os.str());
    }
    g *= sign_;
    return g - u.dot(g) * u;
  }

  bool analytic_gradient() const { return static_cast<bool>(objective_.gradient); }

 private:
  const SphereObjective& objective_;
  double sign_;
};

VectorXd normalized(const VectorXd& v) { return v / v.norm(); }

// Orthonormal basis of the tangent space at unit u, as columns.
MatrixXd tangent_basis(const VectorXd& u) {
  Eigen::HouseholderQR<MatrixXd> qr(u);
  const MatrixXd q = qr.householderQ();
  return q.rightCols(u.size() - 1);
}

struct LocalResult {
  double value;  // sign * f
  VectorXd u;
  int iterations;
};

// Gradient of phi(z) = sign * f(normalize(u + E z)).
VectorXd chart_gradient(const Evaluator& eval, const VectorXd& u, const MatrixXd& basis,
                        const VectorXd& z) {
  const VectorXd w = u + basis * z;
  const double wn = w.norm();
  const VectorXd v = w / wn;
  return basis.transpose() * eval.tangent_gradient(v) / wn;
}

// A start that wanders next to an optimum already found (or its antipode)
// would only reconverge there, so it is abandoned.
bool near_known(const VectorXd& u, const std::vector<VectorXd>& known) {
  constexpr double kMergeRadius = 1e-3;
  for (const auto& v : known) {
    if ((u - v).norm() < kMergeRadius || (u + v).norm() < kMergeRadius) return true;
  }
  return false;
}

LocalResult refine(const Evaluator& eval, VectorXd u, const OptimizerConfig& config,
                   const std::vector<VectorXd>& known = {}) {
  const Eigen::Index k = u.size();
  double f = eval.value(u);
  if (k == 1) return {f, u, 0};

  double gradient_step = 1.0;
  int iteration = 0;
  int stalls = 0;
  for (; iteration < config.max_iters; ++iteration) {
    if (iteration > 0 && near_known(u, known)) break;
    const VectorXd g = eval.tangent_gradient(u);
    const double gnorm = g.norm();
    if (gnorm <= config.tol * std::max(1.0, std::abs(f))) break;

    bool moved = false;
    double new_f = f;
    VectorXd new_u = u;

    // Saddle-free Newton step in a local chart, Hessian by differences of the gradient.
    {
      const MatrixXd basis = tangent_basis(u);
      const Eigen::Index t = k - 1;
      const VectorXd g0 = basis.transpose() * g;
      const double h = eval.analytic_gradient() ? 1e-5 : 1e-4;
      MatrixXd hessian(t, t);
      VectorXd z = VectorXd::Zero(t);
      for (Eigen::Index j = 0; j < t; ++j) {
        z[j] = h;
        const VectorXd gp = chart_gradient(eval, u, basis, z);
        z[j] = -h;
        const VectorXd gm = chart_gradient(eval, u, basis, z);
        z[j] = 0.0;
        hessian.col(j) = (gp - gm) / (2.0 * h);
      }
      hessian = 0.5 * (hessian + hessian.transpose()).eval();
      if (hessian.allFinite()) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(hessian);
        VectorXd magnitudes = es.eigenvalues().cwiseAbs();
        const double floor = std::max(1e-10 * magnitudes.maxCoeff(), 1e-300);
        magnitudes = magnitudes.cwiseMax(floor);
        // Ascent on sign * f: z = |H|^{-1} grad.
        VectorXd step = es.eigenvectors() *
                        (es.eigenvectors().transpose() * g0).cwiseQuotient(magnitudes);
        const double length = step.norm();
        if (length > 0.5) step *= 0.5 / length;
        const double slope = g0.dot(step);
        double scale = 1.0;
        for (int attempt = 0; attempt < 30 && slope > 0.0; ++attempt) {
          const VectorXd candidate = normalized(u + basis * (scale * step));
          const double fc = eval.value(candidate);
          if (fc >= f + 1e-4 * scale * slope) {
            new_u = candidate;
            new_f = fc;
            moved = true;
            break;
          }
          scale *= config.step_shrink;
        }
      }
    }

    if (!moved) {
      // Projected gradient step with backtracking.
      double step = gradient_step / std::max(gnorm, 1e-300);
      for (int attempt = 0; attempt < 60; ++attempt) {
        const VectorXd candidate = normalized(u + step * g);
        const double fc = eval.value(candidate);
        if (fc >= f + 1e-4 * step * gnorm * gnorm) {
          new_u = candidate;
          new_f = fc;
          moved = true;
          gradient_step = std::min(2.0 * step * gnorm, 1.0);
          break;
        }
        step *= config.step_shrink;
      }
    }

    if (!moved) break;
    const double gain = new_f - f;
    u = new_u;
    f = new_f;
    if (gain <= 1e-16 * std::max(1.0, std::abs(f))) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }
  return {f, u, iteration};
}

bool better(double value, const VectorXd& u, double best_value, const VectorXd& best_u) {
  if (value != best_value) return value > best_value;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] != best_u[i]) return u[i] < best_u[i];
  }
  return false;
}

std::vector<VectorXd> start_points(const SphereProblem& problem) {
  const int k = problem.intrinsic_dim;
  std::vector<VectorXd> starts;
  for (const auto& hint : problem.hints) {
    if (hint.size() == k && hint.allFinite() && hint.norm() > 0.0) starts.push_back(normalized(hint));
  }
  const int budget = problem.config.starts;
  int added = 0;
  // Coordinate axes and their antipodes.
  for (int i = 0; i < k && added + 2 <= std::max(budget / 2, 2); ++i) {
    VectorXd e = VectorXd::Zero(k);
    e[i] = 1.0;
    starts.push_back(e);
    starts.push_back(-e);
    added += 2;
  }
  // Halton points mapped to the cube [-1, 1]^k, with antipodes.
  std::uint64_t index = 1 + problem.config.seed % 997;
  while (added < budget) {
    VectorXd v(k);
    for (int i = 0; i < k; ++i) {
      const int base = kPrimes[static_cast<std::size_t>(i) % kPrimes.size()];
      v[i] = 2.0 * radical_inverse(index + static_cast<std::uint64_t>(i / 40) * 7919, base) - 1.0;
    }
    ++index;
    if (v.norm() < 1e-8) continue;
    v.normalize();
    starts.push_back(v);
    ++added;
    if (added < budget) {
      starts.push_back(-v);
      ++added;
    }
  }
  return starts;
}

struct GridResult {
  double value;
  VectorXd u;
};

// Best point of a local tangent-plane patch around u, zoomed until the
// spacing reaches the configured resolution.
GridResult zoom(const Evaluator& eval, VectorXd u, double value, double half_width,
                double resolution) {
  const Eigen::Index t = u.size() - 1;
  constexpr int kSide = 5;  // 2 * kSide + 1 points per axis
  while (true) {
    const double spacing = half_width / kSide;
    VectorXd best_u = u;
    double best = value;
    const MatrixXd local = tangent_basis(u);
    std::vector<int> counter(static_cast<std::size_t>(t), -kSide);
    while (true) {
      VectorXd offset = VectorXd::Zero(u.size());
      for (Eigen::Index j = 0; j < t; ++j) offset += spacing * counter[j] * local.col(j);
      const VectorXd candidate = normalized(u + offset);
      const double fc = eval.value(candidate);
      if (better(fc, candidate, best, best_u)) {
        best = fc;
        best_u = candidate;
      }
      Eigen::Index j = 0;
      while (j < t && ++counter[j] > kSide) counter[j++] = -kSide;
      if (j == t) break;
    }
    u = best_u;
    value = best;
    if (spacing <= resolution) break;
    half_width = 2.0 * spacing;
  }
  return {value, u};
}

GridResult angular_grid(const Evaluator& eval, int k, double resolution) {
  if (k == 1) {
    VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    const double fp = eval.value(plus);
    const double fm = eval.value(minus);
    return better(fm, minus, fp, plus) ? GridResult{fm, minus} : GridResult{fp, plus};
  }
  // Coarse full-sphere sweep, then zoom into the best few cells.
  const double coarse = k == 2 ? std::max(resolution, 0.01) : std::max(resolution, 0.1);
  std::vector<GridResult> cells;
  if (k == 2) {
    const int count = static_cast<int>(std::ceil(2.0 * std::numbers::pi / coarse));
    for (int i = 0; i < count; ++i) {
      const double angle = 2.0 * std::numbers::pi * i / count;
      VectorXd u(2);
      u << std::cos(angle), std::sin(angle);
      cells.push_back({eval.value(u), u});
    }
  } else {
    const int polar = static_cast<int>(std::ceil(std::numbers::pi / coarse));
    for (int i = 0; i <= polar; ++i) {
      const double theta = std::numbers::pi * i / polar;
      const int around =
          std::max(1, static_cast<int>(std::ceil(2.0 * std::numbers::pi * std::sin(theta) / coarse)));
      for (int j = 0; j < around; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / around;
        VectorXd u(3);
        u << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
        cells.push_back({eval.value(u), u});
      }
    }
  }
  const std::size_t keep = std::min<std::size_t>(4, cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(keep), cells.end(),
                    [](const GridResult& a, const GridResult& b) { return better(a.value, a.u, b.value, b.u); });
  GridResult best = cells.front();
  for (std::size_t c = 0; c < keep; ++c) {
    const GridResult zoomed = zoom(eval, cells[c].u, cells[c].value, coarse, resolution);
    if (better(zoomed.value, zoomed.u, best.value, best.u)) best = zoomed;
  }
  return best;
}

}  // namespace

ExtremumResult sphere_extremum(const SphereProblem& problem) {
  problem.config.validate();
  if (problem.intrinsic_dim < 1) throw InputError("sphere_extremum: intrinsic_dim must be >= 1");
  if (!problem.objective.value) throw InputError("sphere_extremum: missing objective");

  const double sign = problem.mode == Extremum::max ? 1.0 : -1.0;
  const Evaluator eval(problem.objective, sign);

  ExtremumResult result;
  double best = -std::numeric_limits<double>::infinity();
  VectorXd best_u = VectorXd::Zero(problem.intrinsic_dim);
  std::vector<VectorXd> optima;
  for (const auto& start : start_points(problem)) {
    const LocalResult local = refine(eval, start, problem.config, optima);
    result.iterations_used += local.iterations;
    if (!near_known(local.u, optima)) optima.push_back(local.u);
    if (better(local.value, local.u, best, best_u)) {
      best = local.value;
      best_u = local.u;
    }
  }

  if (problem.intrinsic_dim <= 3) {
    const GridResult grid = angular_grid(eval, problem.intrinsic_dim, problem.config.grid_resolution);
    result.grid_ran = true;
    result.certified_margin = std::abs(best - grid.value);
    if (grid.value > best) {
      // Polish the grid winner; it lies in a basin the starts missed.
      const LocalResult local = refine(eval, grid.u, problem.config);
      result.iterations_used += local.iterations;
      best = local.value;
      best_u = local.u;
      result.grid_won = true;
    }
  }

  result.value = sign * best;
  result.argument = best_u;
  return result;
}

namespace {

double lp_norm(const VectorXd& v, double r) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), r);
  return std::pow(s, 1.0 / r);
}

// Point of the l^r unit sphere norming the dual vector y.
VectorXd dual_point(const VectorXd& y, double r) {
  const double r_star = r / (r - 1.0);
  VectorXd d(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    d[i] = std::copysign(std::pow(std::abs(y[i]), r_star - 1.0), y[i]);
  }
  const double n = lp_norm(d, r);
  return n > 0.0 ? VectorXd(d / n) : d;
}

// Monotone nonlinear power iteration for a convex 1-homogeneous objective.
double power_polish(const MatrixXd& matrix, double r, OutputNorm output, VectorXd d, int iters) {
  auto value = [&](const VectorXd& x) {
    const VectorXd image = matrix * x;
    return output == OutputNorm::euclidean ? image.norm() : lp_norm(image, r);
  };
  double current = value(d);
  for (int it = 0; it < iters && current > 0.0; ++it) {
    const VectorXd image = matrix * d;
    VectorXd weight(image.size());
    if (output == OutputNorm::euclidean) {
      weight = image;
    } else {
      for (Eigen::Index i = 0; i < image.size(); ++i) {
        weight[i] = std::copysign(std::pow(std::abs(image[i]), r - 1.0), image[i]);
      }
    }
    const VectorXd y = matrix.transpose() * weight;
    if (y.norm() == 0.0) break;
    const VectorXd next = dual_point(y, r);
    const double next_value = value(next);
    if (!(next_value > current * (1.0 + 1e-15))) {
      current = std::max(current, next_value);
      break;
    }
    d = next;
    current = next_value;
  }
  return current;
}

}  // namespace

double lp_operator_norm(const MatrixXd& matrix, double r, OutputNorm output, double output_scale,
                        const OptimizerConfig& config) {
  if (!(r > 1.0) || !std::isfinite(r)) throw InputError("lp_operator_norm: exponent must lie in (1, inf)");
  if (matrix.cols() == 0 || matrix.rows() == 0) return 0.0;
  if (!matrix.allFinite()) throw InputError("lp_operator_norm: non-finite matrix");

  if (r == 2.0) {
    Eigen::JacobiSVD<MatrixXd> svd(matrix);
    return svd.singularValues()[0] * (output == OutputNorm::euclidean ? output_scale : 1.0);
  }

  const Eigen::Index k = matrix.cols();
  const double exponent = 2.0 / r;
  auto to_lr = [&](const VectorXd& v) {
    VectorXd d(k);
    for (Eigen::Index i = 0; i < k; ++i) d[i] = std::copysign(std::pow(std::abs(v[i]), exponent), v[i]);
    return d;
  };
  auto out_norm = [&](const VectorXd& image) {
    return output == OutputNorm::euclidean ? image.norm() : lp_norm(image, r);
  };

  SphereProblem problem;
  problem.intrinsic_dim = static_cast<int>(k);
  problem.mode = Extremum::max;
  problem.config = config;
  problem.objective.value = [&](const VectorXd& v) { return out_norm(matrix * to_lr(v)); };
  problem.objective.gradient = [&](const VectorXd& v) {
    const VectorXd d = to_lr(v);
    const VectorXd image = matrix * d;
    const double n = out_norm(image);
    VectorXd g = VectorXd::Zero(k);
    if (n == 0.0) return g;
    VectorXd weight(image.size());
    if (output == OutputNorm::euclidean) {
      weight = image / n;
    } else {
      for (Eigen::Index i = 0; i < image.size(); ++i) {
        weight[i] = std::copysign(std::pow(std::abs(image[i]) / n, r - 1.0), image[i]);
      }
    }
    const VectorXd dd = matrix.transpose() * weight;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double a = std::max(std::abs(v[i]), 1e-14);
      g[i] = dd[i] * exponent * std::pow(a, exponent - 1.0);
    }
    return g;
  };
  // Seed with the top right singular vector mapped onto the l^r sphere.
  Eigen::JacobiSVD<MatrixXd> svd(matrix, Eigen::ComputeThinV);
  VectorXd top = svd.matrixV().col(0);
  VectorXd seed(k);
  for (Eigen::Index i = 0; i < k; ++i) seed[i] = std::copysign(std::pow(std::abs(top[i]), r / 2.0), top[i]);
  problem.hints.push_back(seed);

  const ExtremumResult found = sphere_extremum(problem);
  double best = found.value;
  best = std::max(best, power_polish(matrix, r, output, to_lr(found.argument), config.max_iters));
  for (Eigen::Index i = 0; i < k; ++i) {
    VectorXd e = VectorXd::Zero(k);
    e[i] = 1.0;
    best = std::max(best, power_polish(matrix, r, output, e, config.max_iters));
  }
  return best * (output == OutputNorm::euclidean ? output_scale : 1.0);
}

}  // namespace pframe
