#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pframe/frames.hpp"

namespace pframe {

enum class VerdictStatus { pass, fail, inconclusive, hypothesis_failed };

std::string to_string(VerdictStatus status);

struct TheoremVerdict {
  std::string theorem_id;
  bool hypothesis_holds = false;
  /// Slack of the hypothesis; empty for unconditional statements.
  std::optional<double> hypothesis_margin;
  std::optional<double> predicted_lower;
  std::optional<double> predicted_upper;
  FrameBounds empirical;
  bool passed = false;
  VerdictStatus status = VerdictStatus::fail;
  std::string notes;
  std::map<std::string, double> diagnostics;
};

struct RankOnePerturbation {
  std::vector<double> c;
  BFunctional functional;
};

struct ConfinedPerturbation {
  std::vector<double> alpha;
  std::vector<double> beta;
  double lambda = 0.0;
  double mu = 0.0;
};

struct StabilitySpec {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class Combiner { paper_min, sound_max };

struct EquivalenceSpec {
  double M = 1.0;
  Combiner combiner = Combiner::sound_max;
};

struct FiniteSumSpec {
  std::vector<double> coefficients;
  int m_index = 1;  // 1-based
  double beta = 1.0;
};

struct OperatorSumSpec {
  Matrix Q;
  double lambda = 0.0;
  int m_index = 1;  // 1-based index of the frame that Q maps onto
};

/// thm3.4: the sum of two p-Bessel families has bound 2^p max(B_F, B_G).
TheoremVerdict check_bessel_sum(const PFrameFamily& f, const PFrameFamily& g,
                                const OptimizerConfig& config = {});

/// thm3.8: reconstruction and lower bounds through the canonical dual.
TheoremVerdict check_duality(const PFrameFamily& f, const OptimizerConfig& config = {});

/// thm3.9: ||synthesis||^p equals the optimal Bessel bound.
TheoremVerdict check_synthesis(const PFrameFamily& f, const OptimizerConfig& config = {});

/// thm3.11: product bounds min(A, C) and max(B, D).
TheoremVerdict check_product(const PFrameFamily& f, const PFrameFamily& g,
                             const OptimizerConfig& config = {});

/// thm4.1: {T_i + c_i R} under sum |c_i|^p < A / ||R||^p.
TheoremVerdict check_rank_one(const PFrameFamily& f, const RankOnePerturbation& perturbation,
                              const OptimizerConfig& config = {});

/// thm4.2: confined perturbation {beta_i R_i} of {alpha_i T_i}.
TheoremVerdict check_confined(const PFrameFamily& f, const PFrameFamily& r,
                              const ConfinedPerturbation& spec,
                              const OptimizerConfig& config = {});

/// thm5.1: |T - R| <= alpha |T| + beta ||x||^p.
TheoremVerdict check_stability(const PFrameFamily& f, const PFrameFamily& r,
                               const StabilitySpec& spec, const OptimizerConfig& config = {});

/// cor5.2: thm5.1 with alpha = 0, beta = bound.
TheoremVerdict check_stability_simple(const PFrameFamily& f, const PFrameFamily& r,
                                      double bound, const OptimizerConfig& config = {});

/// thm5.3: forward direction plus the converse constants.
TheoremVerdict check_equivalence(const PFrameFamily& f, const PFrameFamily& r,
                                 const EquivalenceSpec& spec,
                                 const OptimizerConfig& config = {});

/// thm5.4: weighted sum of l families against the m-th.
TheoremVerdict check_finite_sum(const std::vector<PFrameFamily>& families,
                                const FiniteSumSpec& spec, const OptimizerConfig& config = {});

/// thm5.5: `perturbed` are the R_k, `frames` the T_k.
TheoremVerdict check_operator_sum(const std::vector<PFrameFamily>& perturbed,
                                  const std::vector<PFrameFamily>& frames,
                                  const OperatorSumSpec& spec,
                                  const OptimizerConfig& config = {});

}  // namespace pframe
