#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pframe/instance.hpp"
#include "pframe/report.hpp"

namespace pframe {

/// Random instance whose hypothesis holds by construction. The instance
/// carries its own checker seed so a replay reproduces the verdict.
Instance generate_instance(const std::string& theorem_id, std::uint64_t trial_seed, int dim_max);

struct FuzzOptions {
  std::string theorem_id;
  int trials = 100;
  std::uint64_t seed = 0x5eedULL;
  int dim_max = 5;
  OptimizerConfig optimizer;
  /// Where reproducer files go; empty disables writing them.
  std::string reproducer_dir;
};

struct FuzzFailure {
  int index = 0;
  std::string status;  // verdict status or "error"
  std::string notes;
  std::string reproducer;
};

struct FuzzSummary {
  std::string theorem_id;
  int trials = 0;
  int passed = 0;
  int failed = 0;
  int inconclusive = 0;
  int hypothesis_failed = 0;
  int errors = 0;
  std::vector<FuzzFailure> failures;  // fails and errors, by trial index

  bool sound() const { return failed == 0 && errors == 0; }
};

using TrialObserver = std::function<void(int index, const Instance&, const TheoremVerdict&)>;

/// Throws InputError for an unknown id, trials < 1 or dim_max < 2.
FuzzSummary run_fuzz(const FuzzOptions& options, const TrialObserver& observer = {});

Json fuzz_json(const FuzzSummary& summary);

}  // namespace pframe
