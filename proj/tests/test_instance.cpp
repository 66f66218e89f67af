#include <filesystem>

#include <gtest/gtest.h>

#include "pframe/errors.hpp"
#include "pframe/fuzz.hpp"
#include "pframe/instance.hpp"
#include "pframe/report.hpp"

using namespace pframe;

namespace {

const std::string kMinimal = R"({"dimension": 3, "order": 2, "anchors": [[0, 0, 1]], "p": 2,
                                  "functionals": [[1, 0, 0], [0, 1, 0]]})";

std::string with(const std::string& extra) {
  return kMinimal.substr(0, kMinimal.size() - 1) + ", " + extra + "}";
}

}  // namespace

TEST(Instance, ParsesMinimal) {
  const Instance inst = parse_instance(kMinimal);
  EXPECT_EQ(inst.space.dimension, 3);
  EXPECT_EQ(inst.space.order, 2);
  EXPECT_EQ(inst.p, 2.0);
  ASSERT_EQ(inst.functionals.size(), 2u);
  EXPECT_EQ(inst.functionals[1][1], 1.0);
  EXPECT_FALSE(inst.seed.has_value());
  EXPECT_TRUE(std::holds_alternative<std::monostate>(inst.perturbation));
}

TEST(Instance, RejectsMalformedInput) {
  EXPECT_THROW(parse_instance("{"), InputError);
  EXPECT_THROW(parse_instance("[]"), InputError);
  EXPECT_THROW(parse_instance(R"({"dimension": 3, "order": 2, "anchors": [[0,0,1]], "p": 2})"), InputError);
  EXPECT_THROW(parse_instance(R"({"dimension": 3, "order": 2, "anchors": [[0,0,1]], "p": 2,
                                  "functionals": [[1, 0]]})"), InputError);
  EXPECT_THROW(parse_instance(R"({"dimension": 3, "order": 3, "anchors": [[0,0,1]], "p": 2,
                                  "functionals": [[1, 0, 0]]})"), InputError);
  EXPECT_THROW(parse_instance(R"({"dimension": 3, "order": 2, "anchors": [[0,0,1]], "p": 1,
                                  "functionals": [[1, 0, 0]]})"), InputError);
  EXPECT_THROW(parse_instance(with(R"("colour": 1)")), InputError);
  EXPECT_THROW(parse_instance(with(R"("second_family": [[1, 0, 0]])")), InputError);
  EXPECT_THROW(parse_instance(with(R"("perturbation": {"rank_one": {"c": [1], "R": [1, 0, 0]}})")), InputError);
  EXPECT_THROW(parse_instance(with(R"("perturbation": {"bogus": {}})")), InputError);
  EXPECT_THROW(parse_instance(with(R"("perturbation": {"equivalence": {"M": 1, "combiner": "avg"}})")), InputError);
  EXPECT_THROW(parse_instance(with(R"("seed": -4)")), InputError);
  EXPECT_THROW(parse_instance(with(R"("optimizer": {"starts": 0})")), InputError);
}

TEST(Instance, RoundTripsGeneratedInstances) {
  for (const auto& id : theorem_ids()) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Instance inst = generate_instance(id, seed, 5);
      inst.optimizer = OptimizerConfig{};
      const std::string text = serialize_instance(inst);
      const Instance back = parse_instance(text);
      EXPECT_EQ(serialize_instance(back), text) << id;
      EXPECT_EQ(instance_digest(back), instance_digest(inst));
      ASSERT_EQ(back.functionals.size(), inst.functionals.size());
      for (std::size_t i = 0; i < inst.functionals.size(); ++i) EXPECT_EQ(back.functionals[i], inst.functionals[i]);
    }
  }
}

TEST(Instance, DigestTracksContent) {
  Instance a = parse_instance(kMinimal);
  Instance b = a;
  EXPECT_EQ(instance_digest(a), instance_digest(b));
  EXPECT_EQ(instance_digest(a).size(), 16u);
  b.functionals[0][0] = 1.0000000000000002;
  EXPECT_NE(instance_digest(a), instance_digest(b));
}

TEST(Instance, DispatchNeedsTheRightBlock) {
  const Instance inst = parse_instance(kMinimal);
  EXPECT_THROW(check_instance(inst, "thm4.1", {}), InputError);
  EXPECT_THROW(check_instance(inst, "thm3.4", {}), InputError);
  EXPECT_THROW(check_instance(inst, "thm9.9", {}), InputError);
  EXPECT_EQ(check_instance(inst, "thm3.9", {}).status, VerdictStatus::pass);
}

TEST(Instance, StrictPolicyRejectsUnboundedFunctionals) {
  const std::string text = R"({"dimension": 3, "order": 2, "anchors": [[0, 0, 1]], "p": 2,
                                "functionals": [[1, 0, 0.5]]})";
  EXPECT_THROW(check_instance(parse_instance(text), "thm3.9", {}), UnboundedError);
  const Instance projected = parse_instance(text.substr(0, text.size() - 1) + R"(, "policy": "project"})");
  EXPECT_EQ(check_instance(projected, "thm3.9", {}).status, VerdictStatus::pass);
}

TEST(Verdicts, ReplayIsBitIdentical) {
  for (const auto& id : theorem_ids()) {
    FuzzOptions options;
    options.theorem_id = id;
    options.trials = 5;
    options.seed = 99;
    run_fuzz(options, [&](int, const Instance& inst, const TheoremVerdict& verdict) {
      const Instance replayed = parse_instance(serialize_instance(inst));
      OptimizerConfig config = *replayed.optimizer;
      config.seed = *replayed.seed;
      EXPECT_EQ(verdict_json(check_instance(replayed, id, config)).dump(), verdict_json(verdict).dump()) << id;
    });
  }
}

TEST(Fuzz, DeterministicSummaries) {
  FuzzOptions options;
  options.theorem_id = "thm5.3";
  options.trials = 20;
  std::vector<std::string> first, second;
  const FuzzSummary a = run_fuzz(options, [&](int, const Instance&, const TheoremVerdict& v) {
    first.push_back(verdict_json(v).dump());
  });
  const FuzzSummary b = run_fuzz(options, [&](int, const Instance&, const TheoremVerdict& v) {
    second.push_back(verdict_json(v).dump());
  });
  EXPECT_EQ(first, second);
  EXPECT_EQ(fuzz_json(a).dump(), fuzz_json(b).dump());
  EXPECT_EQ(a.passed, 20);
}

TEST(Fuzz, RejectsBadOptions) {
  FuzzOptions options;
  options.theorem_id = "thm3.4";
  options.trials = 0;
  EXPECT_THROW(run_fuzz(options), InputError);
  options.trials = 1;
  options.theorem_id = "lemma";
  EXPECT_THROW(run_fuzz(options), InputError);
  options.theorem_id = "thm3.4";
  options.dim_max = 1;
  EXPECT_THROW(run_fuzz(options), InputError);
}

TEST(Report, VerdictSchema) {
  const Instance inst = parse_instance(kMinimal);
  const Json j = verdict_json(check_instance(inst, "thm3.8", {}));
  for (const char* key : {"theorem_id", "hypothesis", "predicted", "empirical", "passed", "notes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["hypothesis"].contains("holds"));
  EXPECT_TRUE(j["hypothesis"]["margin"].is_null());
  EXPECT_EQ(j["status"], "pass");
  RunReport report;
  report.command = "check";
  report.results = j;
  EXPECT_FALSE(report.to_json().contains("timings"));
  report.seconds = 1.5;
  EXPECT_TRUE(report.to_json().contains("timings"));
}
