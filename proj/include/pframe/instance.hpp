#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pframe/frames.hpp"
#include "pframe/optimizer.hpp"
#include "pframe/theorems.hpp"

namespace pframe {

using Family = std::vector<Vector>;

struct SpaceData {
  int dimension = 0;
  int order = 0;
  std::vector<Vector> anchors;
};

struct RankOneBlock {
  std::vector<double> c;
  Vector R;
};

struct ConfinedBlock {
  std::vector<double> alpha;
  std::vector<double> beta;
  double lambda = 0.0;
  double mu = 0.0;
};

struct StabilityBlock {
  double alpha = 0.0;
  double beta = 0.0;
};

struct EquivalenceBlock {
  double M = 1.0;
  Combiner combiner = Combiner::sound_max;
};

/// Families are `functionals` followed by `extra_families`.
struct FiniteSumBlock {
  std::vector<double> coefficients;
  int m = 1;
  double beta = 1.0;
  std::vector<Family> extra_families;
};

/// Perturbed families R_k are `functionals` followed by `extra_families`;
/// `base_families` are the frames T_k.
struct OperatorSumBlock {
  Matrix Q;
  double lambda = 0.0;
  int m = 1;
  std::vector<Family> base_families;
  std::vector<Family> extra_families;
};

using PerturbationBlock = std::variant<std::monostate, RankOneBlock, ConfinedBlock, StabilityBlock,
                                       EquivalenceBlock, FiniteSumBlock, OperatorSumBlock>;

struct ProductBlock {
  SpaceData space;
  Family functionals;
};

struct Instance {
  SpaceData space;
  double p = 2.0;
  Family functionals;
  std::optional<Family> second_family;
  PerturbationBlock perturbation;
  std::optional<ProductBlock> product;
  ConstructionPolicy policy = ConstructionPolicy::strict;
  /// Checker seed and optimizer settings; recorded in reproducer files.
  std::optional<std::uint64_t> seed;
  std::optional<OptimizerConfig> optimizer;
};

/// Throws InputError on malformed text, unknown keys, or inconsistent shapes.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
/// Canonical text: fixed key order, shortest round-trip decimals.
std::string serialize_instance(const Instance& instance);
/// FNV-1a (64 bit) of the canonical text, as 16 hex digits.
std::string instance_digest(const Instance& instance);

SpacePtr build_space(const SpaceData& data);
PFrameFamily build_family(const SpacePtr& space, const Family& coeffs, double p,
                          ConstructionPolicy policy);

const std::vector<std::string>& theorem_ids();
bool is_theorem_id(const std::string& id);

/// Dispatches to the checker for `theorem_id`. Throws InputError when the
/// instance lacks the block the theorem needs.
TheoremVerdict check_instance(const Instance& instance, const std::string& theorem_id,
                              const OptimizerConfig& config);

}  // namespace pframe
