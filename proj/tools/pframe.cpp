#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pframe/errors.hpp"
#include "pframe/fuzz.hpp"
#include "pframe/instance.hpp"
#include "pframe/report.hpp"

using namespace pframe;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kInconclusive = 3 };

struct Options {
  std::string file;
  std::string theorem;
  std::string x;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<double> grid_res;
  int trials = 100;
  int dim_max = 5;
  bool text = false;
  bool timings = false;
  std::string out;
  std::string reproducers = "reproducers";
};

OptimizerConfig resolve_config(const Options& o, const Instance* inst) {
  OptimizerConfig c = inst && inst->optimizer ? *inst->optimizer : OptimizerConfig{};
  if (o.starts) c.starts = *o.starts;
  if (o.max_iters) c.max_iters = *o.max_iters;
  if (o.tol) c.tol = *o.tol;
  if (o.grid_res) c.grid_resolution = *o.grid_res;
  if (o.seed) {
    c.seed = *o.seed;
  } else if (inst && inst->seed) {
    c.seed = *inst->seed;
  }
  c.validate();
  return c;
}

Vector parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("--x: cannot parse '" + item + "'");
    }
    if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
      throw InputError("--x: cannot parse '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InputError("--x: no coordinates");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json cmd_norm(const Options& o, const Instance& inst) {
  const SpacePtr space = build_space(inst.space);
  if (o.x.empty()) throw InputError("norm needs --x");
  const Vector x = parse_point(o.x);
  require_vector(x, space->dimension(), "--x");
  const double seminorm = space->anchored_seminorm(x);
  const Vector projection = space->project_complement(x);
  const bool kernel = projection.norm() <= kRankTolerance * std::max(1.0, x.norm());
  return {{"seminorm", seminorm},
          {"projection", coordinates_json(projection)},
          {"anchor_volume", space->anchor_volume()},
          {"kernel", kernel}};
}

Json cmd_bounds(const Instance& inst, const OptimizerConfig& config) {
  const SpacePtr space = build_space(inst.space);
  const PFrameFamily f = build_family(space, inst.functionals, inst.p, inst.policy);
  const FrameBounds b = optimal_bounds(f, config);
  Json j = bounds_json(b);
  const bool frame = lower_bound_positive(b.lower, b.upper);
  j["frame"] = frame;
  j["notes"] = frame ? (b.lower >= b.upper * (1.0 - 1e-8) ? "tight p-frame" : "p-frame") : "not a frame";
  return j;
}

Json cmd_dual(const Instance& inst, const OptimizerConfig& config) {
  const SpacePtr space = build_space(inst.space);
  const PFrameFamily f = build_family(space, inst.functionals, inst.p, inst.policy);
  const QDualFamily dual = canonical_dual(f, config);
  Json members = Json::array();
  for (const auto& v : dual.members) members.push_back(coordinates_json(v));
  Json j;
  j["q"] = dual.q;
  j["dual"] = members;
  j["dual_bounds"] = bounds_json(q_frame_bounds(dual, *space, config));
  return j;
}

Json cmd_product(const Instance& inst, const OptimizerConfig& config) {
  if (!inst.product) throw InputError("product needs a 'product' block");
  const PFrameFamily f = build_family(build_space(inst.space), inst.functionals, inst.p, inst.policy);
  const PFrameFamily g =
      build_family(build_space(inst.product->space), inst.product->functionals, inst.p, inst.policy);
  Json j;
  j["first"] = bounds_json(optimal_bounds(f, config));
  j["second"] = bounds_json(optimal_bounds(g, config));
  j["product"] = bounds_json(optimal_bounds(cartesian_product(f, g), config));
  return j;
}

int emit(const Options& o, const Json& report) {
  const std::string text = o.text ? render_text(report) : report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.out);
    if (!out) throw InputError("cannot write '" + o.out + "'");
    out << text;
  }
  return kOk;
}

int exit_for(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::pass: return kOk;
    case VerdictStatus::fail: return kViolation;
    case VerdictStatus::inconclusive:
    case VerdictStatus::hypothesis_failed: return kInconclusive;
  }
  return kViolation;
}

int run(const std::string& command, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = command;
  int code = kOk;

  if (command == "fuzz") {
    FuzzOptions f;
    f.theorem_id = o.theorem;
    f.trials = o.trials;
    f.seed = o.seed.value_or(0x5eedULL);
    f.dim_max = o.dim_max;
    f.optimizer = resolve_config(o, nullptr);
    f.reproducer_dir = o.reproducers;
    const FuzzSummary summary = run_fuzz(f);
    report.seed = f.seed;
    report.results = fuzz_json(summary);
    code = summary.sound() ? kOk : kViolation;
  } else {
    if (command == "check" && !is_theorem_id(o.theorem)) throw InputError("unknown theorem id '" + o.theorem + "'");
    const Instance inst = load_instance(o.file);
    const OptimizerConfig config = resolve_config(o, &inst);
    report.digest = instance_digest(inst);
    report.seed = config.seed;
    if (command == "norm") {
      report.results = cmd_norm(o, inst);
    } else if (command == "bounds") {
      report.results = cmd_bounds(inst, config);
    } else if (command == "dual") {
      report.results = cmd_dual(inst, config);
    } else if (command == "product") {
      report.results = cmd_product(inst, config);
    } else {
      const TheoremVerdict verdict = check_instance(inst, o.theorem, config);
      report.results = verdict_json(verdict);
      code = exit_for(verdict.status);
    }
  }
  if (o.timings) {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  emit(o, report.to_json());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-frames of bounded b-linear functionals on finite-dimensional n-normed spaces"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Optimizer / fuzz seed");
    sub->add_option("--starts", o.starts, "Optimizer multi-starts");
    sub->add_option("--max-iters", o.max_iters, "Iterations per start");
    sub->add_option("--tol", o.tol, "Optimizer tolerance");
    sub->add_option("--grid-res", o.grid_res, "Grid resolution (radians)");
    auto* json = sub->add_flag("--json", "JSON output (default)");
    sub->add_flag("--text", o.text, "Plain text output")->excludes(json);
    sub->add_option("--out", o.out, "Write the report to a file");
    sub->add_flag("--timings", o.timings, "Include wall-clock timings");
  };

  auto* norm = app.add_subcommand("norm", "Anchored seminorm of a point");
  norm->add_option("file", o.file, "Instance file")->required();
  norm->add_option("--x", o.x, "Comma-separated coordinates")->required();
  common(norm);

  for (const char* name : {"bounds", "dual", "product"}) {
    auto* sub = app.add_subcommand(name, std::string("Run '") + name + "' on an instance");
    sub->add_option("file", o.file, "Instance file")->required();
    common(sub);
  }

  auto* check = app.add_subcommand("check", "Check a theorem on an instance");
  check->add_option("theorem", o.theorem, "Theorem id")->required();
  check->add_option("file", o.file, "Instance file")->required();
  common(check);

  auto* fuzz = app.add_subcommand("fuzz", "Random hypothesis-satisfying instances for a theorem");
  fuzz->add_option("theorem", o.theorem, "Theorem id")->required();
  fuzz->add_option("--trials", o.trials, "Number of instances");
  fuzz->add_option("--dim-max", o.dim_max, "Largest ambient dimension");
  fuzz->add_option("--reproducers", o.reproducers, "Directory for failing instances");
  common(fuzz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
