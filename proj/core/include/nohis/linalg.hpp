// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nohis {

using DenseVector = std::vector<double>;

/// Row-major collection of equal-length vectors. Row i is descriptor i.
class VectorSet {
 public:
  VectorSet() = default;
  explicit VectorSet(std::size_t dim) : dim_(dim) {}
  VectorSet(std::size_t dim, std::vector<double> data);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> v);
  void reserve(std::size_t rows) { data_.reserve(rows * dim_); }

  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const VectorSet&, const VectorSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Orthogonal symmetry x -> x - 2<x,v>v about the hyperplane v-perp.
/// An empty `v` is the identity map.
struct Reflection {
  DenseVector v;

  [[nodiscard]] bool is_identity() const noexcept { return v.empty(); }

  /// out may alias in.
  void apply(std::span<const double> in, std::span<double> out) const;
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] double norm(std::span<const double> a) noexcept;

/// Mean of all rows. Throws Errc::empty_cluster when the set is empty.
[[nodiscard]] DenseVector centroid(const VectorSet& set);
/// Mean of the selected rows.
[[nodiscard]] DenseVector centroid(const VectorSet& set, std::span<const std::size_t> members);

/// Sum of squared deviations from the centroid.
[[nodiscard]] double scatter_value(const VectorSet& set);
[[nodiscard]] double scatter_value(const VectorSet& set, std::span<const std::size_t> members,
                                   std::span<const double> center);

/// Unit eigenvector of the centred scatter matrix with the largest eigenvalue.
/// Its first component with magnitude above 1e-12 is positive.
[[nodiscard]] DenseVector leading_principal_component(const VectorSet& set);
[[nodiscard]] DenseVector leading_principal_component(const VectorSet& set,
                                                      std::span<const std::size_t> members,
                                                      std::span<const double> center);

/// Reflection that carries e1 onto the unit vector `u`.
[[nodiscard]] Reflection make_reflection(std::span<const double> u);

[[nodiscard]] DenseVector reflect(const Reflection& spec, std::span<const double> x);
[[nodiscard]] VectorSet reflect_set(const Reflection& spec, const VectorSet& set);

namespace detail {
// Dimension above which the scatter matrix is never materialised.
inline constexpr std::size_t kExplicitCovarianceMaxDim = 64;
}  // namespace detail

}  // namespace nohis
