#include "pframe/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pframe/errors.hpp"
#include "pframe/rng.hpp"
#include "power_sum.hpp"

namespace pframe {

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::pass: return "pass";
    case VerdictStatus::fail: return "fail";
    case VerdictStatus::inconclusive: return "inconclusive";
    case VerdictStatus::hypothesis_failed: return "hypothesis_failed";
  }
  return "unknown";
}

namespace {

constexpr double kBoundTol = 1e-6;

using detail::PowerSumForm;

struct Hypothesis {
  double margin;
  double threshold;
};

// Margins within 10x the optimizer tolerance (scaled to the form) are not
// trusted in either direction.
double margin_threshold(const OptimizerConfig& config, double magnitude) {
  return 10.0 * config.tol * std::max(1.0, magnitude);
}

// The hypothesis "form <= 0 on the unit sphere of U"; margin = -max form.
Hypothesis sphere_hypothesis(const PowerSumForm& form, const OptimizerConfig& config) {
  const ExtremumResult r = detail::maximize_form(form, config);
  return {-r.value, margin_threshold(config, form.magnitude_bound())};
}

Hypothesis weakest(const Hypothesis& a, const Hypothesis& b) {
  return {std::min(a.margin, b.margin), std::max(a.threshold, b.threshold)};
}

void decide(TheoremVerdict& v, const Hypothesis& h, bool conclusion_ok) {
  v.hypothesis_margin = h.margin;
  if (h.margin < -h.threshold) {
    v.hypothesis_holds = false;
    v.passed = false;
    v.status = VerdictStatus::hypothesis_failed;
    return;
  }
  v.hypothesis_holds = true;
  if (conclusion_ok) {
    v.passed = true;
    v.status = VerdictStatus::pass;
  } else {
    v.passed = false;
    v.status = h.margin > h.threshold ? VerdictStatus::fail : VerdictStatus::inconclusive;
  }
}

void decide_unconditional(TheoremVerdict& v, bool conclusion_ok) {
  v.hypothesis_holds = true;
  v.hypothesis_margin.reset();
  v.passed = conclusion_ok;
  v.status = conclusion_ok ? VerdictStatus::pass : VerdictStatus::fail;
}

bool within_lower(double empirical, double predicted) {
  return empirical >= predicted * (1.0 - kBoundTol);
}

bool within_upper(double empirical, double predicted) {
  return empirical <= predicted * (1.0 + kBoundTol);
}

void require_same_setting(const PFrameFamily& a, const PFrameFamily& b, const char* what) {
  if (a.p() != b.p()) throw InputError(std::string(what) + ": families use different exponents");
  if (a.size() != b.size()) throw InputError(std::string(what) + ": cardinality mismatch");
  if (a.space_ptr() != b.space_ptr() && !(a.space() == b.space())) {
    throw InputError(std::string(what) + ": families act on different spaces");
  }
}

Matrix difference_columns(const PFrameFamily& a, const PFrameFamily& b) {
  return a.complement_matrix() - b.complement_matrix();
}

double volume_power(const PFrameFamily& f) { return std::pow(f.space().anchor_volume(), f.p()); }

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

TheoremVerdict check_bessel_sum(const PFrameFamily& f, const PFrameFamily& g,
                                const OptimizerConfig& config) {
  require_same_setting(f, g, "check_bessel_sum");
  TheoremVerdict v;
  v.theorem_id = "thm3.4";
  const double bf = optimal_bounds(f, config).upper;
  const double bg = optimal_bounds(g, config).upper;
  v.empirical = optimal_bounds(sum_families(f, g), config);
  v.predicted_upper = std::pow(2.0, f.p()) * std::max(bf, bg);
  v.diagnostics = {{"bessel_first", bf}, {"bessel_second", bg}};
  decide_unconditional(v, v.empirical.upper <= *v.predicted_upper * (1.0 + 1e-8));
  v.notes = "sum bound " + describe(v.empirical.upper) + " vs 2^p max(B1,B2) " + describe(*v.predicted_upper);
  return v;
}

TheoremVerdict check_duality(const PFrameFamily& f, const OptimizerConfig& config) {
  const FrameBounds fb = optimal_bounds(f, config);
  if (!lower_bound_positive(fb.lower, fb.upper)) throw DegenerateError("check_duality: family is not a p-frame");
  const QDualFamily dual = canonical_dual(f, config);
  const FrameBounds db = q_frame_bounds(dual, f.space(), config);
  const NSpace& space = f.space();
  const double p = f.p();
  const double q = f.q();

  Rng rng(derive_seed(config.seed, 0xd0a1));
  // (a) reconstruction on the quotient.
  double reconstruction = 0.0;
  std::vector<Vector> points;
  for (int j = 0; j < space.complement_dim(); ++j) points.push_back(space.complement_basis().col(j));
  for (const auto& a : space.anchors().anchors()) points.push_back(a);
  for (int s = 0; s < 16; ++s) points.push_back(rng.normal_vector(space.dimension()));
  for (const auto& x : points) {
    const double err = (reconstruct(f, dual, x) - space.project_complement(x)).norm();
    reconstruction = std::max(reconstruction, err / std::max(1.0, x.norm()));
  }
  // (d) R = sum_i R(f_i) T_i for functionals R with coefficients in U.
  double functional_identity = 0.0;
  for (int s = 0; s < 16; ++s) {
    const Vector t = space.from_complement(rng.normal_vector(space.complement_dim()));
    Vector rebuilt = Vector::Zero(space.dimension());
    for (std::size_t i = 0; i < f.size(); ++i) rebuilt += t.dot(dual.members[i]) * f.members()[i].coeffs();
    functional_identity = std::max(functional_identity, (rebuilt - t).norm() / std::max(1.0, t.norm()));
  }

  const double lemma_floor = std::pow(db.upper, -p / q);   // lower p-frame bound of F
  const double dual_floor = std::pow(fb.upper, -q / p);    // lower q-frame bound of the dual

  TheoremVerdict v;
  v.theorem_id = "thm3.8";
  v.empirical = fb;
  v.predicted_lower = lemma_floor;
  v.diagnostics = {{"reconstruction_residual", reconstruction},
                   {"functional_identity_residual", functional_identity},
                   {"dual_lower", db.lower},
                   {"dual_upper", db.upper},
                   {"dual_lower_floor", dual_floor}};
  const bool ok_a = reconstruction <= 1e-9;
  const bool ok_b = within_lower(fb.lower, lemma_floor);
  const bool ok_c = within_lower(db.lower, dual_floor);
  const bool ok_d = functional_identity <= 1e-9;
  decide_unconditional(v, ok_a && ok_b && ok_c && ok_d);
  v.notes = std::string("reconstruction ") + (ok_a ? "ok" : "FAILED") + ", lemma floor " +
            (ok_b ? "ok" : "FAILED") + ", dual floor " + (ok_c ? "ok" : "FAILED") +
            ", functional identity " + (ok_d ? "ok" : "FAILED");
  return v;
}

TheoremVerdict check_synthesis(const PFrameFamily& f, const OptimizerConfig& config) {
  TheoremVerdict v;
  v.theorem_id = "thm3.9";
  v.empirical = optimal_bounds(f, config);
  const double norm = synthesis_norm(f, config);
  const double norm_p = std::pow(norm, f.p());
  v.predicted_upper = norm_p;
  v.diagnostics = {{"synthesis_norm", norm}, {"synthesis_norm_p", norm_p}};
  const double b = v.empirical.upper;
  decide_unconditional(v, norm_p <= b * (1.0 + kBoundTol) && b <= norm_p * (1.0 + kBoundTol));
  v.notes = "||synthesis||^p " + describe(norm_p) + " vs Bessel bound " + describe(b);
  return v;
}

TheoremVerdict check_product(const PFrameFamily& f, const PFrameFamily& g, const OptimizerConfig& config) {
  const ProductFamily product = cartesian_product(f, g);
  const FrameBounds fb = optimal_bounds(f, config);
  const FrameBounds gb = optimal_bounds(g, config);
  TheoremVerdict v;
  v.theorem_id = "thm3.11";
  v.empirical = optimal_bounds(product, config);
  v.predicted_lower = std::min(fb.lower, gb.lower);
  v.predicted_upper = std::max(fb.upper, gb.upper);
  auto gap = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  const double lower_gap = *v.predicted_lower > 0.0 ? gap(v.empirical.lower, *v.predicted_lower)
                                                    : std::abs(v.empirical.lower);
  const double upper_gap = *v.predicted_upper > 0.0 ? gap(v.empirical.upper, *v.predicted_upper)
                                                    : std::abs(v.empirical.upper);
  v.diagnostics = {{"first_lower", fb.lower},   {"first_upper", fb.upper},
                   {"second_lower", gb.lower},  {"second_upper", gb.upper},
                   {"lower_equality_gap", lower_gap}, {"upper_equality_gap", upper_gap}};
  decide_unconditional(v, within_lower(v.empirical.lower, *v.predicted_lower) &&
                              within_upper(v.empirical.upper, *v.predicted_upper));
  v.notes = std::string("equality ") + (lower_gap <= kBoundTol && upper_gap <= kBoundTol ? "holds" : "does not hold") +
            " for the volume-norm model";
  return v;
}

TheoremVerdict check_rank_one(const PFrameFamily& f, const RankOnePerturbation& perturbation,
                              const OptimizerConfig& config) {
  if (perturbation.c.size() != f.size()) throw InputError("check_rank_one: c has the wrong length");
  if (perturbation.functional.space_ptr() != f.space_ptr() && !(perturbation.functional.space() == f.space())) {
    throw InputError("check_rank_one: R acts on a different space");
  }
  const double r_norm = functional_norm(perturbation.functional);
  if (!(r_norm > 0.0)) throw InputError("check_rank_one: R must be nonzero");
  const double p = f.p();
  double c_sum = 0.0;
  for (double c : perturbation.c) {
    if (!std::isfinite(c)) throw InputError("check_rank_one: non-finite c");
    c_sum += std::pow(std::abs(c), p);
  }
  const FrameBounds fb = optimal_bounds(f, config);
  const double capacity = fb.lower / std::pow(r_norm, p);

  std::vector<BFunctional> members;
  for (std::size_t i = 0; i < f.size(); ++i) {
    members.emplace_back(f.space_ptr(), f.members()[i].coeffs() + perturbation.c[i] * perturbation.functional.coeffs());
  }
  const PFrameFamily perturbed(std::move(members), p);

  TheoremVerdict v;
  v.theorem_id = "thm4.1";
  v.empirical = optimal_bounds(perturbed, config);
  const double root = std::pow(fb.lower, 1.0 / p) - std::pow(c_sum, 1.0 / p) * r_norm;
  const double floor = root > 0.0 ? std::pow(root, p) : 0.0;
  v.diagnostics = {{"original_lower", fb.lower}, {"sum_c_p", c_sum}, {"R_norm", r_norm},
                   {"minkowski_floor", floor}};
  const Hypothesis h{capacity - c_sum, margin_threshold(config, capacity)};
  decide(v, h, lower_bound_positive(v.empirical.lower, v.empirical.upper));
  v.notes = v.hypothesis_holds ? "sum |c_i|^p < A/||R||^p" : "sufficient condition not met; no frame claim";
  return v;
}

TheoremVerdict check_confined(const PFrameFamily& f, const PFrameFamily& r,
                              const ConfinedPerturbation& spec, const OptimizerConfig& config) {
  require_same_setting(f, r, "check_confined");
  const double p = f.p();
  const double two_p = std::pow(2.0, p);
  const std::size_t m = f.size();
  if (spec.alpha.size() != m || spec.beta.size() != m) throw InputError("check_confined: alpha/beta length mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(spec.alpha[i] > 0.0) || !(spec.beta[i] > 0.0) || !std::isfinite(spec.alpha[i]) ||
        !std::isfinite(spec.beta[i])) {
      throw InputError("check_confined: sequences must be positively confined");
    }
  }
  if (!(spec.lambda >= 0.0 && spec.lambda < 1.0 / two_p) || !(spec.mu >= 0.0 && spec.mu < 1.0 / two_p)) {
    throw InputError("check_confined: lambda and mu must lie in [0, 2^-p)");
  }
  const double big_m = *std::min_element(spec.beta.begin(), spec.beta.end());
  const double big_n = *std::max_element(spec.alpha.begin(), spec.alpha.end());
  const double m1 = *std::min_element(spec.alpha.begin(), spec.alpha.end());
  const double n1 = *std::max_element(spec.beta.begin(), spec.beta.end());

  Matrix scaled_t = f.complement_matrix();
  Matrix scaled_r = r.complement_matrix();
  for (std::size_t i = 0; i < m; ++i) {
    scaled_t.col(static_cast<Eigen::Index>(i)) *= spec.alpha[i];
    scaled_r.col(static_cast<Eigen::Index>(i)) *= spec.beta[i];
  }
  PowerSumForm form(f.space().complement_dim(), p);
  form.add(scaled_t - scaled_r, 1.0);
  form.add(scaled_t, -spec.lambda);
  form.add(scaled_r, -spec.mu);
  const Hypothesis h = sphere_hypothesis(form, config);

  const FrameBounds fb = optimal_bounds(f, config);
  TheoremVerdict v;
  v.theorem_id = "thm4.2";
  v.empirical = optimal_bounds(r, config);
  v.predicted_lower = (1.0 - two_p * spec.lambda) * std::pow(m1, p) * fb.lower / (two_p * (1.0 + spec.mu) * std::pow(n1, p));
  v.predicted_upper = two_p * (1.0 + spec.lambda) * std::pow(big_n, p) * fb.upper /
                      ((1.0 - two_p * spec.mu) * std::pow(big_m, p));
  v.diagnostics = {{"original_lower", fb.lower}, {"original_upper", fb.upper},
                   {"M", big_m}, {"N", big_n}, {"M1", m1}, {"N1", n1}};
  decide(v, h, within_lower(v.empirical.lower, *v.predicted_lower) &&
                   within_upper(v.empirical.upper, *v.predicted_upper));
  v.notes = "confined perturbation envelope";
  return v;
}

TheoremVerdict check_stability(const PFrameFamily& f, const PFrameFamily& r, const StabilitySpec& spec,
                               const OptimizerConfig& config) {
  require_same_setting(f, r, "check_stability");
  if (!(spec.alpha >= 0.0) || !(spec.beta >= 0.0) || !std::isfinite(spec.alpha) || !std::isfinite(spec.beta)) {
    throw InputError("check_stability: alpha and beta must be nonnegative");
  }
  const double p = f.p();
  const FrameBounds fb = optimal_bounds(f, config);
  TheoremVerdict v;
  v.theorem_id = "thm5.1";
  v.empirical = optimal_bounds(r, config);
  const double feasibility = fb.lower > 0.0 ? spec.alpha + spec.beta / fb.lower
                                            : std::numeric_limits<double>::infinity();
  v.diagnostics = {{"original_lower", fb.lower}, {"original_upper", fb.upper},
                   {"alpha_plus_beta_over_A", feasibility}};
  if (!(feasibility < 1.0)) {
    v.hypothesis_holds = false;
    v.hypothesis_margin = std::isfinite(feasibility) ? 1.0 - feasibility : -1.0;
    v.passed = false;
    v.status = VerdictStatus::hypothesis_failed;
    v.notes = "hypothesis infeasible: alpha + beta/A >= 1";
    return v;
  }
  PowerSumForm form(f.space().complement_dim(), p);
  form.add(difference_columns(f, r), 1.0);
  form.add(f.complement_matrix(), -spec.alpha);
  form.add_constant(-spec.beta * volume_power(f));
  const Hypothesis h = sphere_hypothesis(form, config);

  v.predicted_lower = std::pow(1.0 - std::pow(feasibility, 1.0 / p), p) * fb.lower;
  v.predicted_upper = std::pow(std::pow(spec.alpha * fb.upper + spec.beta, 1.0 / p) + std::pow(fb.upper, 1.0 / p), p);
  decide(v, h, within_lower(v.empirical.lower, *v.predicted_lower) &&
                   within_upper(v.empirical.upper, *v.predicted_upper));
  v.notes = "stability envelope";
  return v;
}

TheoremVerdict check_stability_simple(const PFrameFamily& f, const PFrameFamily& r, double bound,
                                      const OptimizerConfig& config) {
  if (!(bound > 0.0) || !std::isfinite(bound)) throw InputError("check_stability_simple: bound must be positive");
  TheoremVerdict v = check_stability(f, r, {0.0, bound}, config);
  v.theorem_id = "cor5.2";
  if (v.status == VerdictStatus::hypothesis_failed && v.diagnostics["alpha_plus_beta_over_A"] >= 1.0) {
    v.notes = "hypothesis infeasible: R >= A";
  }
  return v;
}

TheoremVerdict check_equivalence(const PFrameFamily& f, const PFrameFamily& r, const EquivalenceSpec& spec,
                                 const OptimizerConfig& config) {
  require_same_setting(f, r, "check_equivalence");
  if (!(spec.M > 0.0) || !std::isfinite(spec.M)) throw InputError("check_equivalence: M must be positive");
  const double p = f.p();
  const int k = f.space().complement_dim();
  const Matrix diff = difference_columns(f, r);
  const Matrix ct = f.complement_matrix();
  const Matrix cr = r.complement_matrix();

  auto domination = [&](double constant) {
    PowerSumForm against_t(k, p);
    against_t.add(diff, 1.0);
    against_t.add(ct, -constant);
    PowerSumForm against_r(k, p);
    against_r.add(diff, 1.0);
    against_r.add(cr, -constant);
    return weakest(sphere_hypothesis(against_t, config), sphere_hypothesis(against_r, config));
  };

  const FrameBounds fb = optimal_bounds(f, config);
  TheoremVerdict v;
  v.theorem_id = "thm5.3";
  v.empirical = optimal_bounds(r, config);
  const double factor = std::pow(std::pow(spec.M, 1.0 / p) + 1.0, p);
  v.predicted_lower = fb.lower / factor;
  v.predicted_upper = factor * fb.upper;
  const Hypothesis h = domination(spec.M);
  bool conclusion = within_lower(v.empirical.lower, *v.predicted_lower) &&
                    within_upper(v.empirical.upper, *v.predicted_upper);
  v.diagnostics = {{"original_lower", fb.lower}, {"original_upper", fb.upper}};
  v.notes = "forward envelope";

  const double c_lower = v.empirical.lower;
  const double d_upper = v.empirical.upper;
  if (lower_bound_positive(fb.lower, fb.upper) && lower_bound_positive(c_lower, d_upper)) {
    const double via_t = std::pow(1.0 + std::pow(d_upper / fb.lower, 1.0 / p), p);
    const double via_r = std::pow(1.0 + std::pow(fb.upper / c_lower, 1.0 / p), p);
    const double m_min = std::min(via_t, via_r);
    const double m_max = std::max(via_t, via_r);
    const Hypothesis h_min = domination(m_min);
    const Hypothesis h_max = domination(m_max);
    v.diagnostics["converse_M_paper_min"] = m_min;
    v.diagnostics["converse_M_sound_max"] = m_max;
    v.diagnostics["converse_margin_paper_min"] = h_min.margin;
    v.diagnostics["converse_margin_sound_max"] = h_max.margin;
    const Hypothesis& asserted = spec.combiner == Combiner::sound_max ? h_max : h_min;
    const bool converse_ok = asserted.margin >= -asserted.threshold;
    conclusion = conclusion && converse_ok;
    v.notes += std::string("; converse (") + (spec.combiner == Combiner::sound_max ? "sound_max" : "paper_min") +
               ") " + (converse_ok ? "holds" : "VIOLATED") + "; paper_min domination " +
               (h_min.margin >= -h_min.threshold ? "holds" : "fails");
  } else {
    v.notes += "; converse skipped (a family is not a frame)";
  }
  decide(v, h, conclusion);
  return v;
}

TheoremVerdict check_finite_sum(const std::vector<PFrameFamily>& families, const FiniteSumSpec& spec,
                                const OptimizerConfig& config) {
  if (families.empty()) throw InputError("check_finite_sum: no families");
  for (const auto& fam : families) require_same_setting(families.front(), fam, "check_finite_sum");
  const std::size_t l = families.size();
  if (spec.coefficients.size() != l) throw InputError("check_finite_sum: coefficient count mismatch");
  if (spec.m_index < 1 || static_cast<std::size_t>(spec.m_index) > l) throw InputError("check_finite_sum: m out of range");
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) throw InputError("check_finite_sum: beta must be positive");
  const double p = families.front().p();
  const PFrameFamily& base = families[static_cast<std::size_t>(spec.m_index - 1)];
  const PFrameFamily combined = combine_families(families, spec.coefficients);

  PowerSumForm form(base.space().complement_dim(), p);
  form.add(base.complement_matrix(), spec.beta);
  form.add(combined.complement_matrix(), -1.0);
  const Hypothesis h = sphere_hypothesis(form, config);

  double upper_sum = 0.0;
  double base_lower = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    const FrameBounds b = optimal_bounds(families[k], config);
    upper_sum += b.upper;
    if (k == static_cast<std::size_t>(spec.m_index - 1)) base_lower = b.lower;
  }
  double max_coeff = 0.0;
  for (double a : spec.coefficients) max_coeff = std::max(max_coeff, std::pow(std::abs(a), p));
  const double stated_upper = max_coeff * upper_sum;
  const double holder_upper = std::pow(static_cast<double>(l), p - 1.0) * stated_upper;

  TheoremVerdict v;
  v.theorem_id = "thm5.4";
  v.empirical = optimal_bounds(combined, config);
  v.predicted_lower = base_lower * spec.beta;
  v.predicted_upper = holder_upper;
  v.diagnostics = {{"base_lower", base_lower}, {"stated_upper", stated_upper}, {"holder_upper", holder_upper},
                   {"stated_upper_violated", v.empirical.upper > stated_upper * (1.0 + kBoundTol) ? 1.0 : 0.0}};
  decide(v, h, within_lower(v.empirical.lower, *v.predicted_lower) && std::isfinite(v.empirical.upper) &&
                   within_upper(v.empirical.upper, holder_upper));
  v.notes = "combined family floor A_m*beta; upper checked against l^(p-1) max|a_k|^p sum B_k";
  return v;
}

TheoremVerdict check_operator_sum(const std::vector<PFrameFamily>& perturbed,
                                  const std::vector<PFrameFamily>& frames, const OperatorSumSpec& spec,
                                  const OptimizerConfig& config) {
  if (frames.empty() || frames.size() != perturbed.size()) {
    throw InputError("check_operator_sum: need equally many frames and perturbed families");
  }
  for (const auto& fam : frames) require_same_setting(frames.front(), fam, "check_operator_sum");
  for (const auto& fam : perturbed) require_same_setting(frames.front(), fam, "check_operator_sum");
  const std::size_t l = frames.size();
  const auto m = static_cast<Eigen::Index>(frames.front().size());
  if (spec.Q.rows() != m || spec.Q.cols() != m || !spec.Q.allFinite()) {
    throw InputError("check_operator_sum: Q must be a finite m x m matrix");
  }
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) throw InputError("check_operator_sum: lambda must be >= 0");
  if (spec.m_index < 1 || static_cast<std::size_t>(spec.m_index) > l) throw InputError("check_operator_sum: m out of range");
  const double p = frames.front().p();
  const NSpace& space = frames.front().space();
  const int k = space.complement_dim();
  const PFrameFamily& target = frames[static_cast<std::size_t>(spec.m_index - 1)];
  const PFrameFamily combined = combine_families(perturbed, std::vector<double>(l, 1.0));

  // Intertwining on a spanning set of U: Q (combined analysis) = target analysis.
  const Matrix combined_analysis = combined.complement_matrix().transpose();  // m x k
  const Matrix target_analysis = target.complement_matrix().transpose();
  const Matrix residual = spec.Q * combined_analysis - target_analysis;
  const double scale = std::max({1.0, (spec.Q * combined_analysis).norm(), target_analysis.norm()});
  const double intertwining = residual.norm() / scale;

  double upper_sum = 0.0;
  double target_lower = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const FrameBounds b = optimal_bounds(frames[j], config);
    upper_sum += b.upper;
    if (j == static_cast<std::size_t>(spec.m_index - 1)) target_lower = b.lower;
  }
  const double q_norm = lp_operator_norm(spec.Q, p, OutputNorm::lp, 1.0, config);

  TheoremVerdict v;
  v.theorem_id = "thm5.5";
  v.empirical = optimal_bounds(combined, config);
  const double stated_upper = std::pow(1.0 + std::pow(spec.lambda, 1.0 / p), p) * upper_sum;
  const double holder_upper = std::pow(static_cast<double>(l), p - 1.0) * stated_upper;
  v.diagnostics = {{"intertwining_residual", intertwining}, {"Q_norm", q_norm}, {"target_lower", target_lower},
                   {"stated_upper", stated_upper}, {"holder_upper", holder_upper},
                   {"stated_upper_violated", v.empirical.upper > stated_upper * (1.0 + kBoundTol) ? 1.0 : 0.0}};
  if (intertwining > 1e-8 || !(q_norm > 0.0)) {
    v.hypothesis_holds = false;
    v.hypothesis_margin = -intertwining;
    v.passed = false;
    v.status = VerdictStatus::hypothesis_failed;
    v.notes = "hypothesis infeasible: Q does not intertwine the analysis maps";
    return v;
  }

  Hypothesis h{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t j = 0; j < l; ++j) {
    PowerSumForm form(k, p);
    form.add(difference_columns(frames[j], perturbed[j]), 1.0);
    form.add(frames[j].complement_matrix(), -spec.lambda);
    h = weakest(h, sphere_hypothesis(form, config));
  }
  v.predicted_lower = target_lower / std::pow(q_norm, p);
  v.predicted_upper = holder_upper;
  decide(v, h, within_lower(v.empirical.lower, *v.predicted_lower) &&
                   within_upper(v.empirical.upper, holder_upper));
  v.notes = "combined floor A_m/||Q||^p; upper checked against l^(p-1)(1+lambda^(1/p))^p sum B_k";
  return v;
}

}  // namespace pframe
