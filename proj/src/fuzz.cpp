#include "pframe/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "pframe/errors.hpp"
#include "pframe/rng.hpp"

namespace pframe {

namespace {

constexpr double kExponents[] = {1.5, 2.0, 2.5, 3.0};
constexpr double kConditionFloor = 0.1;

struct Setting {
  SpaceData data;
  SpacePtr space;
  int k = 1;
  double volume_p = 1.0;  // V^p
};

Setting random_setting(Rng& rng, int dim_max, int order = 0) {
  for (;;) {
    Setting s;
    const int lo = std::max(2, order);
    s.data.dimension = rng.integer(lo, std::max(lo, dim_max));
    s.data.order = order > 0 ? order : rng.integer(2, s.data.dimension);
    s.data.anchors.clear();
    double norms = 1.0;
    for (int j = 0; j + 1 < s.data.order; ++j) {
      s.data.anchors.push_back(rng.normal_vector(s.data.dimension));
      norms *= s.data.anchors.back().norm();
    }
    if (gram_volume(s.data.anchors) < 1e-2 * norms) continue;
    s.space = build_space(s.data);
    s.k = s.space->complement_dim();
    return s;
  }
}

double condition(const Matrix& c) {
  Eigen::JacobiSVD<Matrix> svd(c);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / sv(0);
}

// Columns are coefficient vectors in complement coordinates.
Matrix random_frame(Rng& rng, int k, int m) {
  for (;;) {
    Matrix c(k, m);
    for (int i = 0; i < m; ++i) c.col(i) = rng.normal_vector(k) * rng.uniform(0.5, 2.0);
    if (condition(c) >= kConditionFloor) return c;
  }
}

Matrix random_bessel(Rng& rng, int k, int m) {
  Matrix c(k, m);
  for (int i = 0; i < m; ++i) c.col(i) = rng.normal_vector(k) * rng.uniform(0.0, 2.0);
  return c;
}

// Bounds of sum_i |(C^T u)_i|^p over unit u from the l2 sum, via the
// comparison between l^p and l^2 norms on R^m.
double sum_lower(const Matrix& c, double p) {
  Eigen::JacobiSVD<Matrix> svd(c);
  const double s = svd.singularValues()(svd.singularValues().size() - 1);
  const double m = static_cast<double>(c.cols());
  return std::pow(s, p) * (p >= 2.0 ? std::pow(m, 1.0 - p / 2.0) : 1.0);
}

double sum_upper(const Matrix& c, double p) {
  Eigen::JacobiSVD<Matrix> svd(c);
  const double s = svd.singularValues()(0);
  const double m = static_cast<double>(c.cols());
  return std::pow(s, p) * (p <= 2.0 ? std::pow(m, 1.0 - p / 2.0) : 1.0);
}

// Columns with sum_i ||col_i||^p = total.
Matrix random_perturbation(Rng& rng, int k, int m, double p, double total) {
  Matrix e(k, m);
  double mass = 0.0;
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    w[static_cast<std::size_t>(i)] = rng.uniform(0.1, 1.0);
    mass += std::pow(w[static_cast<std::size_t>(i)], p);
  }
  const double scale = std::pow(total / mass, 1.0 / p);
  for (int i = 0; i < m; ++i) {
    Vector dir = rng.normal_vector(k);
    e.col(i) = dir.normalized() * (w[static_cast<std::size_t>(i)] * scale);
  }
  return e;
}

Family ambient(const Setting& s, const Matrix& c) {
  Family f;
  for (Eigen::Index i = 0; i < c.cols(); ++i) f.push_back(s.space->from_complement(c.col(i)));
  return f;
}

Instance base_instance(const Setting& s, double p, const Matrix& c) {
  Instance inst;
  inst.space = s.data;
  inst.p = p;
  inst.functionals = ambient(s, c);
  return inst;
}

Instance generate(const std::string& id, Rng& rng, int dim_max) {
  double p = kExponents[rng.integer(0, 3)];
  Setting s = random_setting(rng, dim_max);
  s.volume_p = std::pow(s.space->anchor_volume(), p);
  const int k = s.k;
  const int m = rng.integer(k, k + 3);

  if (id == "thm3.4") {
    Instance inst = base_instance(s, p, random_bessel(rng, k, m));
    inst.second_family = ambient(s, random_bessel(rng, k, m));
    return inst;
  }
  if (id == "thm3.8" || id == "thm3.9") return base_instance(s, p, random_frame(rng, k, m));
  if (id == "thm3.11") {
    Setting other = random_setting(rng, dim_max, s.data.order);
    const int mm = std::max(m, other.k);
    Instance inst = base_instance(s, p, random_frame(rng, k, mm));
    inst.product = ProductBlock{other.data, ambient(other, random_frame(rng, other.k, mm))};
    return inst;
  }
  if (id == "thm4.1") {
    const Matrix c = random_frame(rng, k, m);
    const double a_lower = sum_lower(c, p) / s.volume_p;
    const Vector r = rng.normal_vector(k) * rng.uniform(0.2, 3.0);
    const double r_norm_p = std::pow(r.norm() / s.space->anchor_volume(), p);
    const double budget = rng.uniform(0.0, 0.9) * a_lower / r_norm_p;
    std::vector<double> coeffs(static_cast<std::size_t>(m));
    double mass = 0.0;
    for (auto& x : coeffs) {
      x = rng.normal();
      mass += std::pow(std::abs(x), p);
    }
    const double scale = std::pow(budget / mass, 1.0 / p);
    for (auto& x : coeffs) x *= scale;
    Instance inst = base_instance(s, p, c);
    inst.perturbation = RankOneBlock{coeffs, s.space->from_complement(r)};
    return inst;
  }
  if (id == "thm4.2") {
    const double two_p = std::pow(2.0, p);
    const Matrix c = random_frame(rng, k, m);
    ConfinedBlock b;
    for (int i = 0; i < m; ++i) {
      b.alpha.push_back(rng.uniform(0.5, 2.0));
      b.beta.push_back(rng.uniform(0.5, 2.0));
    }
    b.lambda = rng.uniform(0.2, 0.9) / two_p;
    b.mu = rng.uniform(0.0, 0.9) / two_p;
    const double m1 = *std::min_element(b.alpha.begin(), b.alpha.end());
    // alpha_i eps_i carries half of lambda * M1^p * A V^p.
    const Matrix scaled = random_perturbation(rng, k, m, p, 0.5 * b.lambda * std::pow(m1, p) * sum_lower(c, p));
    Matrix r(k, m);
    for (int i = 0; i < m; ++i) {
      const double a = b.alpha[static_cast<std::size_t>(i)];
      r.col(i) = (a / b.beta[static_cast<std::size_t>(i)]) * (c.col(i) + scaled.col(i) / a);
    }
    Instance inst = base_instance(s, p, c);
    inst.second_family = ambient(s, r);
    inst.perturbation = b;
    return inst;
  }
  if (id == "thm5.1" || id == "cor5.2") {
    const Matrix c = random_frame(rng, k, m);
    const double a_lower = sum_lower(c, p) / s.volume_p;
    StabilityBlock b;
    if (id == "thm5.1") {
      b.alpha = rng.uniform(0.0, 0.5);
      b.beta = (rng.uniform(b.alpha + 0.05, 0.9) - b.alpha) * a_lower;
    } else {
      b.beta = rng.uniform(0.2, 0.9) * a_lower;
    }
    const double total = 0.5 * (b.alpha * a_lower + b.beta) * s.volume_p;
    const Matrix r = c + random_perturbation(rng, k, m, p, total);
    Instance inst = base_instance(s, p, c);
    inst.second_family = ambient(s, r);
    inst.perturbation = b;
    return inst;
  }
  if (id == "thm5.3") {
    const Matrix c = random_frame(rng, k, m);
    const double lower = sum_lower(c, p);
    EquivalenceBlock b;
    b.M = rng.uniform(0.2, 2.0);
    double total = 0.5 * b.M * lower;
    for (;;) {
      const double root = std::pow(lower, 1.0 / p) - std::pow(total, 1.0 / p);
      if (root > 0.0 && total <= 0.5 * b.M * std::pow(root, p)) break;
      total *= 0.5;
    }
    const Matrix r = c + random_perturbation(rng, k, m, p, total);
    Instance inst = base_instance(s, p, c);
    inst.second_family = ambient(s, r);
    inst.perturbation = b;
    return inst;
  }
  if (id == "thm5.4") {
    for (;;) {
      const int l = rng.integer(2, 3);
      std::vector<Matrix> cs;
      FiniteSumBlock b;
      Matrix combined = Matrix::Zero(k, m);
      for (int j = 0; j < l; ++j) {
        cs.push_back(random_frame(rng, k, m));
        const double a = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        b.coefficients.push_back(a);
        combined += a * cs.back();
      }
      if (condition(combined) < kConditionFloor) continue;
      b.m = rng.integer(1, l);
      b.beta = 0.5 * sum_lower(combined, p) / sum_upper(cs[static_cast<std::size_t>(b.m - 1)], p);
      Instance inst = base_instance(s, p, cs[0]);
      for (int j = 1; j < l; ++j) b.extra_families.push_back(ambient(s, cs[static_cast<std::size_t>(j)]));
      inst.perturbation = b;
      return inst;
    }
  }
  if (id == "thm5.5") {
    for (;;) {
      const int l = rng.integer(1, 3);
      OperatorSumBlock b;
      b.lambda = rng.uniform(0.05, 1.0);
      b.m = rng.integer(1, l);
      std::vector<Matrix> ts;
      std::vector<Matrix> rs;
      Matrix combined = Matrix::Zero(k, m);
      for (int j = 0; j < l; ++j) {
        ts.push_back(random_frame(rng, k, m));
        rs.push_back(ts.back() + random_perturbation(rng, k, m, p, 0.5 * b.lambda * sum_lower(ts.back(), p)));
        combined += rs.back();
      }
      if (condition(combined) < kConditionFloor) continue;
      const Matrix analysis = combined.transpose();
      const Matrix pinv = analysis.completeOrthogonalDecomposition().pseudoInverse();
      b.Q = ts[static_cast<std::size_t>(b.m - 1)].transpose() * pinv;
      Instance inst = base_instance(s, p, rs[0]);
      for (int j = 0; j < l; ++j) {
        b.base_families.push_back(ambient(s, ts[static_cast<std::size_t>(j)]));
        if (j > 0) b.extra_families.push_back(ambient(s, rs[static_cast<std::size_t>(j)]));
      }
      inst.perturbation = b;
      return inst;
    }
  }
  throw InputError("unknown theorem id '" + id + "'");
}

}  // namespace

Instance generate_instance(const std::string& theorem_id, std::uint64_t trial_seed, int dim_max) {
  if (!is_theorem_id(theorem_id)) throw InputError("unknown theorem id '" + theorem_id + "'");
  if (dim_max < 2) throw InputError("dim_max must be at least 2");
  Rng rng(trial_seed);
  Instance inst = generate(theorem_id, rng, dim_max);
  inst.seed = derive_seed(trial_seed, 1);
  return inst;
}

FuzzSummary run_fuzz(const FuzzOptions& options, const TrialObserver& observer) {
  if (!is_theorem_id(options.theorem_id)) throw InputError("unknown theorem id '" + options.theorem_id + "'");
  if (options.trials < 1) throw InputError("trials must be at least 1");
  if (options.dim_max < 2) throw InputError("dim_max must be at least 2");
  options.optimizer.validate();

  FuzzSummary summary;
  summary.theorem_id = options.theorem_id;
  summary.trials = options.trials;
  for (int index = 0; index < options.trials; ++index) {
    const std::uint64_t trial_seed = derive_seed(options.seed, static_cast<std::uint64_t>(index));
    Instance inst = generate_instance(options.theorem_id, trial_seed, options.dim_max);
    inst.optimizer = options.optimizer;
    OptimizerConfig config = options.optimizer;
    config.seed = *inst.seed;

    FuzzFailure failure{index, "", "", ""};
    try {
      const TheoremVerdict verdict = check_instance(inst, options.theorem_id, config);
      if (observer) observer(index, inst, verdict);
      switch (verdict.status) {
        case VerdictStatus::pass: ++summary.passed; break;
        case VerdictStatus::inconclusive: ++summary.inconclusive; break;
        case VerdictStatus::hypothesis_failed: ++summary.hypothesis_failed; break;
        case VerdictStatus::fail:
          ++summary.failed;
          failure.status = "fail";
          failure.notes = verdict.notes;
          break;
      }
    } catch (const std::exception& e) {
      ++summary.errors;
      failure.status = "error";
      failure.notes = e.what();
    }
    if (failure.status.empty()) continue;
    if (!options.reproducer_dir.empty()) {
      std::filesystem::create_directories(options.reproducer_dir);
      const auto path = std::filesystem::path(options.reproducer_dir) /
                        (options.theorem_id + "-trial" + std::to_string(index) + ".json");
      std::ofstream(path) << serialize_instance(inst);
      failure.reproducer = path.string();
    }
    summary.failures.push_back(std::move(failure));
  }
  return summary;
}

Json fuzz_json(const FuzzSummary& s) {
  Json failures = Json::array();
  for (const auto& f : s.failures) {
    failures.push_back({{"index", f.index},
                        {"status", f.status},
                        {"notes", f.notes},
                        {"reproducer", f.reproducer.empty() ? Json(nullptr) : Json(f.reproducer)}});
  }
  return {{"theorem_id", s.theorem_id},     {"trials", s.trials},
          {"passed", s.passed},             {"failed", s.failed},
          {"inconclusive", s.inconclusive}, {"hypothesis_failed", s.hypothesis_failed},
          {"errors", s.errors},             {"failures", failures}};
}

}  // namespace pframe
