#pragma once

// Dense-vector primitives shared by every stage of the pipeline.
//
// Storage is float32 (`Vector`), every reduction accumulates in double and
// walks its inputs in index order, so results are reproducible bit for bit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lmms/error.hpp"

namespace lmms {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = VectorX<float>;

/// Norms at or below this are treated as zero.
inline constexpr double kNormEpsilon = 1e-12;

/// A vector whose norm is within this distance of 1 is already unit length
/// and is returned unchanged by l2_normalize, which makes normalization idempotent.
inline constexpr double kUnitTolerance = 1e-7;

template <typename Derived>
double l2_norm(const Eigen::MatrixBase<Derived>& v) {
  return std::sqrt(v.template cast<double>().squaredNorm());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Running componentwise mean with a double accumulator.
template <typename Scalar>
class MeanAccumulator {
 public:
  MeanAccumulator() = default;
  explicit MeanAccumulator(Eigen::Index dim) : sum_(VectorX<double>::Zero(dim)) {}

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& v) {
    if (count_ == 0 && sum_.size() == 0) sum_ = VectorX<double>::Zero(v.size());
    if (v.size() != sum_.size()) throw Error("mean: dimension mismatch");
    sum_ += v.template cast<double>();
    ++count_;
  }

  std::size_t count() const noexcept { return count_; }
  Eigen::Index dim() const noexcept { return sum_.size(); }

  VectorX<Scalar> result() const {
    if (count_ == 0) throw Error("mean: empty input");
    return (sum_ / static_cast<double>(count_)).template cast<Scalar>();
  }

 private:
  VectorX<double> sum_;
  std::size_t count_ = 0;
};

template <typename Scalar>
VectorX<Scalar> mean(std::span<const VectorX<Scalar>> vectors) {
  if (vectors.empty()) throw Error("mean: empty input");
  MeanAccumulator<Scalar> acc(vectors.front().size());
  for (const auto& v : vectors) acc.add(v);
  return acc.result();
}

template <typename Scalar>
VectorX<Scalar> mean(const std::vector<VectorX<Scalar>>& vectors) {
  return mean(std::span<const VectorX<Scalar>>(vectors));
}

template <typename Derived>
VectorX<typename Derived::Scalar> l2_normalize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const double norm = l2_norm(v);
  if (!(norm > kNormEpsilon)) throw Error("l2_normalize: zero vector");
  if (std::abs(norm - 1.0) <= kUnitTolerance) return v;
  return (v.template cast<double>() / norm).template cast<Scalar>();
}

/// Cosine similarity in double precision, clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (!(na > kNormEpsilon) || !(nb > kNormEpsilon)) throw Error("cosine: zero vector");
  const double dot = a.template cast<double>().dot(b.template cast<double>());
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

template <typename Scalar>
VectorX<Scalar> concat(std::span<const VectorX<Scalar>> parts) {
  if (parts.empty()) throw Error("concat: empty input");
  Eigen::Index dim = 0;
  for (const auto& p : parts) dim += p.size();
  VectorX<Scalar> out(dim);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.segment(offset, p.size()) = p;
    offset += p.size();
  }
  return out;
}

template <typename Scalar>
VectorX<Scalar> concat(std::initializer_list<VectorX<Scalar>> parts) {
  return concat(std::span<const VectorX<Scalar>>(parts.begin(), parts.size()));
}

template <typename Scalar>
VectorX<Scalar> concat(const std::vector<VectorX<Scalar>>& parts) {
  return concat(std::span<const VectorX<Scalar>>(parts));
}

}  // namespace lmms
