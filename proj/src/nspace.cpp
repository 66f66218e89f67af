#include "pframe/nspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pframe/errors.hpp"

namespace pframe {

namespace {

Matrix as_columns(std::span<const Vector> vectors, Eigen::Index dimension) {
  Matrix m(dimension, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  return m;
}

}  // namespace

void require_vector(const Vector& x, Eigen::Index dimension, const char* what) {
  if (x.size() != dimension) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(dimension) +
                     ", got " + std::to_string(x.size()));
  }
  if (!x.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

double gram_volume(std::span<const Vector> vectors) {
  if (vectors.empty()) return 1.0;
  const Eigen::Index d = vectors.front().size();
  for (const auto& v : vectors) require_vector(v, d, "gram_volume");
  if (static_cast<Eigen::Index>(vectors.size()) > d) {
    throw InputError("gram_volume: more vectors than the ambient dimension");
  }
  // sqrt(det(M^T M)) as the product of the singular values of M.
  Eigen::JacobiSVD<Matrix> svd(as_columns(vectors, d));
  const auto& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[sv.size() - 1] <= kRankTolerance * sv[0]) return 0.0;
  return sv.prod();
}

AnchorTuple::AnchorTuple(std::vector<Vector> anchors) : anchors_(std::move(anchors)) {
  volume_ = gram_volume(anchors_);
  if (!(volume_ > 0.0)) throw DegenerateError("anchors are linearly dependent");
}

NSpace::NSpace(int dimension, std::vector<Vector> anchors)
    : dimension_(dimension),
      anchors_([&] {
        if (dimension < 2) throw InputError("dimension must be at least 2");
        const auto n = static_cast<int>(anchors.size()) + 1;
        if (n < 2 || n > dimension) {
          throw InputError("order must satisfy 2 <= n <= dimension");
        }
        for (const auto& a : anchors) require_vector(a, dimension, "anchor");
        return AnchorTuple(std::move(anchors));
      }()) {
  const Matrix a = as_columns(anchors_.anchors(), dimension_);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const auto rank = static_cast<Eigen::Index>(anchors_.size());
  complement_basis_ = svd.matrixU().rightCols(dimension_ - rank);
}

double NSpace::n_norm(std::span<const Vector> xs) const {
  if (static_cast<int>(xs.size()) != order()) {
    throw InputError("n_norm expects exactly " + std::to_string(order()) + " vectors");
  }
  for (const auto& x : xs) require_vector(x, dimension_, "n_norm argument");
  return gram_volume(xs);
}

double NSpace::anchored_seminorm(const Vector& x) const {
  require_vector(x, dimension_, "anchored_seminorm");
  std::vector<Vector> tuple;
  tuple.reserve(anchors_.size() + 1);
  tuple.push_back(x);
  for (const auto& a : anchors_.anchors()) tuple.push_back(a);
  return gram_volume(tuple);
}

double NSpace::anchored_seminorm_projected(const Vector& x) const {
  return to_complement(x).norm() * anchors_.volume();
}

Vector NSpace::project_complement(const Vector& x) const {
  return complement_basis_ * to_complement(x);
}

Vector NSpace::to_complement(const Vector& x) const {
  require_vector(x, dimension_, "vector");
  return complement_basis_.transpose() * x;
}

Vector NSpace::from_complement(const Vector& c) const {
  require_vector(c, complement_dim(), "complement coordinates");
  return complement_basis_ * c;
}

bool NSpace::operator==(const NSpace& other) const {
  if (dimension_ != other.dimension_ || anchors_.size() != other.anchors_.size()) return false;
  for (std::size_t j = 0; j < anchors_.size(); ++j) {
    if (anchors_.anchors()[j] != other.anchors_.anchors()[j]) return false;
  }
  return true;
}

}  // namespace pframe
