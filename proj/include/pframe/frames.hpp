#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pframe/functionals.hpp"
#include "pframe/optimizer.hpp"

namespace pframe {

/// Conjugate exponent q with 1/p + 1/q = 1.
double conjugate_exponent(double p);

/// Finite family {T_i} over one space together with the exponent p.
class PFrameFamily {
 public:
  PFrameFamily(std::vector<BFunctional> members, double p);
  /// Members given as ambient coefficient vectors.
  PFrameFamily(SpacePtr space, const std::vector<Vector>& coeffs, double p,
               ConstructionPolicy policy = ConstructionPolicy::strict);

  const std::vector<BFunctional>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  double p() const { return p_; }
  double q() const { return conjugate_exponent(p_); }
  const NSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  /// Coefficient vectors as columns (dimension x m).
  Matrix coefficient_matrix() const;
  /// The same restricted to U, in complement coordinates (complement_dim x m).
  Matrix complement_matrix() const;

 private:
  SpacePtr space_;
  std::vector<BFunctional> members_;
  double p_;
};

enum class BoundMethod { spectral, optimizer, grid };

std::string to_string(BoundMethod method);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  Vector arg_lower;  // unit vectors in U (ambient coordinates)
  Vector arg_upper;
  BoundMethod method = BoundMethod::spectral;
};

/// Sum over i of |T_i(x)|^p.
double frame_sum(const PFrameFamily& family, const Vector& x);

std::vector<double> analysis_sequence(const PFrameFamily& family, const Vector& x);

/// Best constants A, B of the p-frame inequality: extremes of
/// sum_i |<t_i, u>|^p / V^p over unit u in U.
FrameBounds optimal_bounds(const PFrameFamily& family, const OptimizerConfig& config = {});

struct FrameVerdict {
  bool holds;
  FrameBounds bounds;
};

/// Scale-free frame threshold: A > 1e-9 * B.
bool lower_bound_positive(double lower, double upper);

FrameVerdict is_p_frame(const PFrameFamily& family, const OptimizerConfig& config = {});
FrameVerdict is_p_bessel(const PFrameFamily& family, std::optional<double> claimed_upper,
                         const OptimizerConfig& config = {});

/// Scales a tight family by A^(-1/p). Throws PreconditionError when not tight.
PFrameFamily parseval_rescale(const PFrameFamily& family, const OptimizerConfig& config = {});

/// Member-wise {T_i + U_i}.
PFrameFamily sum_families(const PFrameFamily& first, const PFrameFamily& second);
/// Member-wise {sum_k weights[k] * T_{k,i}}.
PFrameFamily combine_families(const std::vector<PFrameFamily>& families,
                              const std::vector<double>& weights);
PFrameFamily scale_family(const PFrameFamily& family, double factor);

/// The functional sum_i d_i T_i.
BFunctional synthesis_apply(const PFrameFamily& family, const std::vector<double>& d);

/// Norm of d -> sum_i d_i T_i from l^q into the functional norm.
double synthesis_norm(const PFrameFamily& family, const OptimizerConfig& config = {});

/// Vectors {f_i} of X, used as a q-frame for the bounded functionals.
struct QDualFamily {
  std::vector<Vector> members;
  double q;
};

/// Pseudo-inverse dual: f_i in U with P_U x = sum_i T_i(x) f_i.
/// Throws DegenerateError when the family is not a frame.
QDualFamily canonical_dual(const PFrameFamily& family, const OptimizerConfig& config = {});

/// sum_i T_i(x) P_U f_i.
Vector reconstruct(const PFrameFamily& family, const QDualFamily& dual, const Vector& x);

/// Extremes of sum_i |<t, f_i>|^q * (V / ||t||)^q over nonzero t in U.
FrameBounds q_frame_bounds(const QDualFamily& dual, const NSpace& space,
                           const OptimizerConfig& config = {});

/// Direct sum X (+) Y carrying the n-norm whose p-th power is the sum of
/// the component p-th powers; anchors are the pairs a_j (+) b_j.
class ProductSpace {
 public:
  ProductSpace(SpacePtr first, SpacePtr second, double p);

  int dimension() const { return first_->dimension() + second_->dimension(); }
  int order() const { return first_->order(); }
  double p() const { return p_; }
  const NSpace& first() const { return *first_; }
  const NSpace& second() const { return *second_; }
  std::vector<Vector> anchors() const;

  double n_norm(std::span<const Vector> xs) const;
  double anchored_seminorm(const Vector& z) const;
  Vector first_part(const Vector& z) const;
  Vector second_part(const Vector& z) const;

 private:
  SpacePtr first_;
  SpacePtr second_;
  double p_;
};

/// {T_i (+) U_i}: evaluation yields the pair (T_i(x), U_i(y)) whose p-th
/// power magnitude is |T_i(x)|^p + |U_i(y)|^p.
class ProductFamily {
 public:
  ProductFamily(PFrameFamily first, PFrameFamily second);

  const ProductSpace& space() const { return space_; }
  const PFrameFamily& first() const { return first_; }
  const PFrameFamily& second() const { return second_; }
  double p() const { return first_.p(); }
  std::size_t size() const { return first_.size(); }
  /// Concatenated coefficient vectors t_i (+) s_i.
  std::vector<Vector> member_coeffs() const;

 private:
  PFrameFamily first_;
  PFrameFamily second_;
  ProductSpace space_;
};

/// Throws InputError on mismatched p, order, or cardinality.
ProductFamily cartesian_product(const PFrameFamily& first, const PFrameFamily& second);

double frame_sum(const ProductFamily& family, const Vector& z);

/// Optimizer over the unit sphere of U_X (+) U_Y, independent of the
/// component bounds.
FrameBounds optimal_bounds(const ProductFamily& family, const OptimizerConfig& config = {});

}  // namespace pframe
