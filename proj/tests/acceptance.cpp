// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pframe/errors.hpp"
#include "pframe/frames.hpp"
#include "pframe/functionals.hpp"
#include "pframe/fuzz.hpp"
#include "pframe/instance.hpp"
#include "pframe/optimizer.hpp"
#include "pframe/report.hpp"
#include "pframe/rng.hpp"
#include "pframe/theorems.hpp"

using namespace pframe;

namespace {

constexpr std::uint64_t kSeed = 0xacce97ULL;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  int violations = 0;

  void require(bool condition, const std::string& what) {
    if (condition) return;
    if (violations < 3) detail << (violations ? "; " : "") << what;
    ++violations;
    ok = false;
  }
};

struct RandomSetting {
  std::vector<Vector> anchors;
  SpacePtr space;
};

RandomSetting random_setting(Rng& rng, int d_min, int d_max) {
  const int d = rng.integer(d_min, d_max);
  const int n = rng.integer(2, std::min(d, 4));
  auto anchors = oracle::random_vectors(rng, n - 1, d);
  auto space = std::make_shared<const NSpace>(d, anchors);
  return {std::move(anchors), std::move(space)};
}

std::vector<Vector> random_coeffs(Rng& rng, const RandomSetting& s, int m) {
  std::vector<Vector> out;
  for (int i = 0; i < m; ++i) {
    out.push_back(oracle::project_out(s.anchors, rng.normal_vector(s.space->dimension())));
  }
  return out;
}

OptimizerConfig config_for(std::uint64_t seed) {
  OptimizerConfig c;
  c.seed = seed;
  return c;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// 1. n-norm axioms.
void axioms(Outcome& out) {
  for (int n : {2, 3}) {
    Rng rng(derive_seed(kSeed, 100 + static_cast<std::uint64_t>(n)));
    for (int trial = 0; trial < 500; ++trial) {
      const int d = rng.integer(n, 8);
      NSpace space(d, oracle::random_vectors(rng, n - 1, d));
      auto xs = oracle::random_vectors(rng, n, d);
      const double base = space.n_norm(xs);
      const std::string tag = "n=" + std::to_string(n) + " trial " + std::to_string(trial);

      // (i) positive on independent tuples, zero on dependent ones.
      out.require(base > 0.0 && oracle::relative_error(base, oracle::gram_volume(xs)) < 1e-10,
                  tag + ": independent tuple");
      auto dependent = xs;
      Vector combo = Vector::Zero(d);
      for (int j = 0; j + 1 < n; ++j) combo += rng.uniform(-2, 2) * xs[static_cast<std::size_t>(j)];
      dependent[static_cast<std::size_t>(n - 1)] = combo;
      out.require(space.n_norm(dependent) == 0.0, tag + ": dependent tuple");

      // (ii) permutation invariance.
      auto permuted = xs;
      std::reverse(permuted.begin(), permuted.end());
      std::swap(permuted[0], permuted[static_cast<std::size_t>(rng.integer(0, n - 1))]);
      out.require(oracle::relative_error(space.n_norm(permuted), base) < 1e-12, tag + ": permutation");

      // (iii) homogeneity in the first slot.
      const double alpha = rng.uniform(-10, 10);
      auto scaled = xs;
      scaled[0] *= alpha;
      out.require(oracle::relative_error(space.n_norm(scaled), std::abs(alpha) * base) < 1e-12,
                  tag + ": homogeneity");

      // (iv) triangle inequality in the first slot.
      auto other = xs;
      other[0] = rng.normal_vector(d);
      auto sum = xs;
      sum[0] = xs[0] + other[0];
      const double rhs = base + space.n_norm(other);
      out.require(space.n_norm(sum) <= rhs * (1.0 + 1e-12), tag + ": triangle");
    }
  }
  out.detail << (out.ok ? "1000 tuples per axiom" : "");
}

// 2. Functional norm: three estimates against the closed form.
void functional_norms(Outcome& out) {
  Rng rng(derive_seed(kSeed, 2));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomSetting s = random_setting(rng, 2, 6);
    const Vector t = oracle::project_out(s.anchors, rng.normal_vector(s.space->dimension()));
    const BFunctional f = make_functional(s.space, t, ConstructionPolicy::project);
    const double exact = t.norm() / oracle::gram_volume(s.anchors);
    const NormEstimates e = functional_norm_estimates(f, config_for(derive_seed(kSeed, 2000 + trial)));
    for (double est : {e.over_ball, e.over_sphere, e.ratio, functional_norm(f)}) {
      const double err = oracle::relative_error(est, exact);
      worst = std::max(worst, err);
      out.require(err <= 1e-6, "trial " + std::to_string(trial) + ": estimate " + num(est) + " vs " + num(exact));
    }
  }
  if (out.ok) out.detail << "max relative error " << num(worst);
}

// 3. p = 2 spectral path against a direct optimizer run and the SVD oracle.
void spectral_cross_check(Outcome& out) {
  Rng rng(derive_seed(kSeed, 3));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomSetting s = random_setting(rng, 2, 6);
    const int k = s.space->complement_dim();
    const int m = rng.integer(k, 12);
    const auto coeffs = random_coeffs(rng, s, m);
    const PFrameFamily family(s.space, coeffs, 2.0, ConstructionPolicy::project);
    const FrameBounds spectral = optimal_bounds(family);
    const oracle::Bounds svd = oracle::quadratic_bounds(s.anchors, coeffs);

    const Matrix c = s.space->complement_basis().transpose() * family.coefficient_matrix();
    const Matrix gram = c * c.transpose();
    const double v2 = std::pow(s.space->anchor_volume(), 2.0);
    double optimized[2];
    for (int which = 0; which < 2; ++which) {
      SphereProblem problem;
      problem.intrinsic_dim = k;
      problem.mode = which == 0 ? Extremum::min : Extremum::max;
      problem.config = config_for(derive_seed(kSeed, 3000 + trial));
      problem.objective.value = [&](const Vector& u) { return u.dot(gram * u) / v2; };
      problem.objective.gradient = [&](const Vector& u) { return Vector(2.0 * gram * u / v2); };
      optimized[which] = sphere_extremum(problem).value;
    }
    const std::string tag = "trial " + std::to_string(trial);
    for (auto [a, b] : {std::pair{spectral.lower, optimized[0]}, std::pair{spectral.upper, optimized[1]},
                        std::pair{spectral.lower, svd.lower}, std::pair{spectral.upper, svd.upper}}) {
      const double err = oracle::relative_error(a, b);
      worst = std::max(worst, err);
      out.require(err <= 1e-6, tag + ": " + num(a) + " vs " + num(b));
    }
    out.require(spectral.method == BoundMethod::spectral, tag + ": method not spectral");
  }
  if (out.ok) out.detail << "max relative error " << num(worst);
}

using VerdictCheck =
    std::function<void(Outcome&, const std::string& tag, const Instance&, const TheoremVerdict&)>;

// Runs a generator-backed sweep of one theorem id.
std::map<VerdictStatus, int> sweep(Outcome& out, const std::string& id, int count, const VerdictCheck& check) {
  std::map<VerdictStatus, int> tally;
  const auto& ids = theorem_ids();
  const auto id_index = 1000 + static_cast<std::uint64_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  for (int trial = 0; trial < count; ++trial) {
    const std::uint64_t trial_seed = derive_seed(derive_seed(kSeed, id_index), static_cast<std::uint64_t>(trial));
    const std::string tag = id + " trial " + std::to_string(trial);
    try {
      const Instance inst = generate_instance(id, trial_seed, 5);
      const TheoremVerdict v = check_instance(inst, id, config_for(*inst.seed));
      ++tally[v.status];
      check(out, tag, inst, v);
    } catch (const std::exception& e) {
      out.require(false, tag + ": " + e.what());
    }
  }
  return tally;
}

bool at_least(double value, double floor) { return value >= floor * (1.0 - 1e-6); }
bool at_most(double value, double ceiling) { return value <= ceiling * (1.0 + 1e-6); }

// 4. Sum of Bessel families.
void bessel_sum(Outcome& out) {
  sweep(out, "thm3.4", 200, [](Outcome& o, const std::string& tag, const Instance& inst, const TheoremVerdict& v) {
    const double bound = std::pow(2.0, inst.p) * std::max(v.diagnostics.at("bessel_first"), v.diagnostics.at("bessel_second"));
    o.require(v.empirical.upper <= bound * (1.0 + 1e-8), tag + ": " + num(v.empirical.upper) + " > " + num(bound));
    o.require(v.status == VerdictStatus::pass, tag + ": status " + to_string(v.status));
  });
}

// 5. Canonical dual and reconstruction.
void duality(Outcome& out) {
  sweep(out, "thm3.8", 200, [](Outcome& o, const std::string& tag, const Instance& inst, const TheoremVerdict& v) {
    const auto& dg = v.diagnostics;
    const double q = conjugate_exponent(inst.p);
    o.require(oracle::relative_error(*v.predicted_lower, std::pow(dg.at("dual_upper"), -inst.p / q)) < 1e-12,
              tag + ": lemma floor is not B^(-p/q)");
    o.require(dg.at("reconstruction_residual") <= 1e-9, tag + ": reconstruction " + num(dg.at("reconstruction_residual")));
    o.require(dg.at("functional_identity_residual") <= 1e-9,
              tag + ": functional identity " + num(dg.at("functional_identity_residual")));
    o.require(at_least(v.empirical.lower, *v.predicted_lower), tag + ": lower below B^(-p/q)");
    o.require(at_least(dg.at("dual_lower"), dg.at("dual_lower_floor")), tag + ": dual lower below B^(-q/p)");
    o.require(v.status == VerdictStatus::pass, tag + ": status " + to_string(v.status));
  });
}

// 6. Synthesis norm equals the Bessel bound.
void synthesis(Outcome& out) {
  Rng rng(derive_seed(kSeed, 6));
  double worst = 0.0;
  const double ps[] = {1.5, 2.0, 3.0};
  for (int trial = 0; trial < 200; ++trial) {
    const double p = ps[trial % 3];
    const RandomSetting s = random_setting(rng, 2, 5);
    const int m = rng.integer(1, s.space->complement_dim() + 3);
    const PFrameFamily family(s.space, random_coeffs(rng, s, m), p, ConstructionPolicy::project);
    const TheoremVerdict v = check_synthesis(family, config_for(derive_seed(kSeed, 6000 + trial)));
    const double err = oracle::relative_error(v.diagnostics.at("synthesis_norm_p"), v.empirical.upper);
    worst = std::max(worst, err);
    const std::string tag = "trial " + std::to_string(trial) + " p=" + num(p);
    out.require(err <= 1e-6, tag + ": relative error " + num(err));
    out.require(v.status == VerdictStatus::pass, tag + ": status " + to_string(v.status));
  }
  if (out.ok) out.detail << "max relative error " << num(worst);
}

// 7. Product bounds.
void product(Outcome& out) {
  sweep(out, "thm3.11", 200, [](Outcome& o, const std::string& tag, const Instance&, const TheoremVerdict& v) {
    const auto& dg = v.diagnostics;
    const double a = std::min(dg.at("first_lower"), dg.at("second_lower"));
    const double b = std::max(dg.at("first_upper"), dg.at("second_upper"));
    o.require(oracle::relative_error(v.empirical.lower, a) <= 1e-6, tag + ": lower " + num(v.empirical.lower) + " vs " + num(a));
    o.require(oracle::relative_error(v.empirical.upper, b) <= 1e-6, tag + ": upper " + num(v.empirical.upper) + " vs " + num(b));
  });
}

// 8. Rank-one perturbation.
void rank_one(Outcome& out) {
  sweep(out, "thm4.1", 500, [](Outcome& o, const std::string& tag, const Instance& inst, const TheoremVerdict& v) {
    const auto& dg = v.diagnostics;
    const double cap = dg.at("original_lower") / std::pow(dg.at("R_norm"), inst.p);
    const double margin = cap - dg.at("sum_c_p");
    o.require(v.hypothesis_margin && oracle::relative_error(*v.hypothesis_margin, margin) < 1e-9,
              tag + ": reported margin disagrees");
    o.require(margin >= 0.1 * cap, tag + ": margin " + num(margin) + " below 0.1*" + num(cap));
    o.require(*v.hypothesis_margin >= 0.1 * cap, tag + ": margin " + num(*v.hypothesis_margin) + " below 0.1*" + num(cap));
    o.require(lower_bound_positive(v.empirical.lower, v.empirical.upper), tag + ": perturbed lower " + num(v.empirical.lower));
    o.require(v.status == VerdictStatus::pass, tag + ": status " + to_string(v.status));
  });
}

// Shared by criteria 9 and 10.
void envelope(Outcome& o, const std::string& tag, const Instance&, const TheoremVerdict& v) {
  o.require(v.status != VerdictStatus::fail, tag + ": fail (" + v.notes + ")");
  if (v.status == VerdictStatus::inconclusive) return;
  o.require(v.hypothesis_holds && v.hypothesis_margin && *v.hypothesis_margin > 0.0,
            tag + ": hypothesis not certified");
  if (v.predicted_lower) o.require(at_least(v.empirical.lower, *v.predicted_lower), tag + ": below predicted lower");
  if (v.predicted_upper) o.require(at_most(v.empirical.upper, *v.predicted_upper), tag + ": above predicted upper");
}

void perturbation_family(Outcome& out) {
  for (const std::string id : {"thm4.2", "thm5.1", "cor5.2", "thm5.3"}) {
    auto tally = sweep(out, id, 200, envelope);
    const int inconclusive = tally[VerdictStatus::inconclusive];
    out.require(inconclusive < 4, id + ": inconclusive " + std::to_string(inconclusive) + "/200");
    out.require(tally[VerdictStatus::pass] + inconclusive == 200, id + ": not every instance certified");
    if (out.ok) out.detail << id << " " << tally[VerdictStatus::pass] << "/200 ";
  }
}

void sums(Outcome& out) {
  for (const std::string id : {"thm5.4", "thm5.5"}) {
    auto tally = sweep(out, id, 200, [](Outcome& o, const std::string& tag, const Instance& inst, const TheoremVerdict& v) {
      envelope(o, tag, inst, v);
      const auto& dg = v.diagnostics;
      o.require(at_most(v.empirical.upper, dg.at("holder_upper")), tag + ": Holder upper violated");
      const double floor = v.theorem_id == "thm5.5"
                               ? dg.at("target_lower") / std::pow(dg.at("Q_norm"), inst.p)
                               : dg.at("base_lower") * std::get<FiniteSumBlock>(inst.perturbation).beta;
      o.require(at_least(v.empirical.lower, floor), tag + ": lower " + num(v.empirical.lower) + " below " + num(floor));
      o.require(v.status == VerdictStatus::pass, tag + ": status " + to_string(v.status));
    });
    if (out.ok) out.detail << id << " " << tally[VerdictStatus::pass] << "/200 ";
  }
}

// 11 and 12 share the campaign: early verdicts are kept for the rerun.
constexpr int kCampaignTrials = 10000;
constexpr int kRerunTrials = 300;
std::map<std::string, std::string> campaign_prefix;

void campaign(Outcome& out) {
  const auto dir = std::filesystem::temp_directory_path() / "pframe-acceptance-reproducers";
  std::filesystem::remove_all(dir);
  int total_fail = 0, total_inconclusive = 0, total_hypothesis = 0, replays = 0;
  for (const auto& id : theorem_ids()) {
    FuzzOptions options;
    options.theorem_id = id;
    options.trials = kCampaignTrials;
    options.seed = kSeed;
    options.dim_max = 5;
    options.reproducer_dir = dir.string();
    std::string& prefix = campaign_prefix[id];
    const FuzzSummary summary = run_fuzz(options, [&](int index, const Instance& inst, const TheoremVerdict& v) {
      if (index < kRerunTrials) prefix += verdict_json(v).dump() + "\n";
      // Replay a sample through the serialized form.
      if (index % 1000 == 0) {
        const Instance replayed = parse_instance(serialize_instance(inst));
        const TheoremVerdict again = check_instance(replayed, id, config_for(*replayed.seed));
        out.require(verdict_json(again).dump() == verdict_json(v).dump(), id + ": sample replay differs");
        ++replays;
      }
    });
    total_fail += summary.failed + summary.errors;
    total_inconclusive += summary.inconclusive;
    total_hypothesis += summary.hypothesis_failed;
    out.require(summary.sound(), id + ": " + std::to_string(summary.failed) + " fails, " +
                                     std::to_string(summary.errors) + " errors");
    for (const auto& f : summary.failures) {
      if (f.reproducer.empty()) continue;
      const Instance inst = load_instance(f.reproducer);
      try {
        const TheoremVerdict v = check_instance(inst, id, config_for(*inst.seed));
        out.require(to_string(v.status) == f.status, f.reproducer + ": replay status differs");
      } catch (const std::exception& e) {
        out.require(f.status == "error", f.reproducer + ": replay raised " + e.what());
      }
      ++replays;
    }
  }
  std::filesystem::remove_all(dir);
  out.detail << (out.ok ? "" : " | ") << theorem_ids().size() << "x" << kCampaignTrials << " trials, " << total_fail
             << " violations, " << total_inconclusive << " inconclusive, " << total_hypothesis
             << " hypothesis_failed, " << replays << " replays";
}

void determinism(Outcome& out) {
  if (campaign_prefix.empty()) {
    out.require(false, "campaign did not run");
    return;
  }
  for (const auto& id : theorem_ids()) {
    std::string first, second;
    for (std::string* target : {&first, &second}) {
      FuzzOptions options;
      options.theorem_id = id;
      options.trials = kRerunTrials;
      options.seed = kSeed;
      std::string verdicts;
      const FuzzSummary s = run_fuzz(options, [&](int, const Instance&, const TheoremVerdict& v) {
        verdicts += verdict_json(v).dump() + "\n";
      });
      RunReport report{"", "fuzz", kSeed, fuzz_json(s), std::nullopt};
      *target = report.to_json().dump(2) + "\n" + verdicts;
      if (target == &first) out.require(verdicts == campaign_prefix[id], id + ": verdicts differ from campaign run");
    }
    out.require(first == second, id + ": reports differ between runs");
  }
  if (out.ok) out.detail << theorem_ids().size() << " ids x " << kRerunTrials << " trials, three runs agree byte for byte";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"n-norm axioms", axioms},
      {"functional norm oracle", functional_norms},
      {"p=2 spectral vs optimizer", spectral_cross_check},
      {"thm3.4 Bessel sum", bessel_sum},
      {"thm3.8 duality", duality},
      {"thm3.9 synthesis norm", synthesis},
      {"thm3.11 product bounds", product},
      {"thm4.1 rank-one perturbation", rank_one},
      {"thm4.2/thm5.1/cor5.2/thm5.3 envelopes", perturbation_family},
      {"thm5.4/thm5.5 combined families", sums},
      {"fuzz campaign", campaign},
      {"determinism", determinism},
  };
  const std::map<int, double> time_limits = {{1, 5.0}, {2, 30.0}, {11, 600.0}};

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (auto it = time_limits.find(number); it != time_limits.end()) {
      out.require(seconds < it->second, "runtime " + num(seconds) + " s over " + num(it->second) + " s");
    }
    if (!out.ok) ++failed;
    std::printf("%s %2d %-40s %8.2fs  %s\n", out.ok ? "PASS" : "FAIL", number, criteria[i].first.c_str(), seconds,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
