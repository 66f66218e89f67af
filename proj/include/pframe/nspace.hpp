#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pframe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kRankTolerance = 1e-10;

/// Volume of the parallelotope spanned by `vectors`: sqrt(det G) with G the
/// Gram matrix. Rank-deficient lists (smallest singular value at or below
/// kRankTolerance times the largest) give exactly 0.
double gram_volume(std::span<const Vector> vectors);

/// Rejects vectors of the wrong length or with non-finite entries.
void require_vector(const Vector& x, Eigen::Index dimension, const char* what);

/// The fixed tail (a2, ..., an) filling the last n-1 slots of the n-norm.
class AnchorTuple {
 public:
  /// Throws DegenerateError when the anchors are linearly dependent.
  explicit AnchorTuple(std::vector<Vector> anchors);

  const std::vector<Vector>& anchors() const { return anchors_; }
  std::size_t size() const { return anchors_.size(); }
  double volume() const { return volume_; }

 private:
  std::vector<Vector> anchors_;
  double volume_;
};

/// Finite-dimensional linear n-normed space R^d with the Gram-volume n-norm
/// and a fixed anchor tuple. The anchored map x -> ||x, a2, ..., an|| is a
/// seminorm whose kernel is span(anchors); U is its orthogonal complement.
class NSpace {
 public:
  /// The order n is anchors.size() + 1 and must satisfy 2 <= n <= dimension.
  NSpace(int dimension, std::vector<Vector> anchors);

  int dimension() const { return dimension_; }
  int order() const { return static_cast<int>(anchors_.size()) + 1; }
  const AnchorTuple& anchors() const { return anchors_; }
  double anchor_volume() const { return anchors_.volume(); }

  /// Orthonormal basis of U as columns (dimension x complement_dim).
  const Matrix& complement_basis() const { return complement_basis_; }
  int complement_dim() const { return static_cast<int>(complement_basis_.cols()); }

  /// The n-norm of exactly `order()` vectors.
  double n_norm(std::span<const Vector> xs) const;

  /// ||x, a2, ..., an|| evaluated through the Gram volume.
  double anchored_seminorm(const Vector& x) const;

  /// The same quantity through the factorization ||P_U x|| * volume(anchors).
  double anchored_seminorm_projected(const Vector& x) const;

  Vector project_complement(const Vector& x) const;

  /// Coordinates of P_U x in the complement basis, and the inverse map.
  Vector to_complement(const Vector& x) const;
  Vector from_complement(const Vector& c) const;

  bool operator==(const NSpace& other) const;

 private:
  int dimension_;
  AnchorTuple anchors_;
  Matrix complement_basis_;
};

}  // namespace pframe
