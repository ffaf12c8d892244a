// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/tree.hpp"

namespace nohis {

struct Neighbor {
  std::uint64_t index = 0;    // global descriptor index
  std::uint32_t cluster = 0;  // leaf the descriptor lives in
  std::uint32_t image_id = 0;
  double squared_distance = std::numeric_limits<double>::infinity();

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Total order used everywhere results are ranked: distance, then index.
[[nodiscard]] inline bool ranks_before(const Neighbor& a, const Neighbor& b) noexcept {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.index < b.index;
}

/// Bounded list of the best candidates seen so far, kept sorted ascending.
/// Missing entries count as +infinity.
class NeighborList {
 public:
  explicit NeighborList(std::size_t capacity);

  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool full() const noexcept { return entries_.size() == capacity_; }
  [[nodiscard]] const std::vector<Neighbor>& entries() const noexcept { return entries_; }
  [[nodiscard]] const Neighbor& operator[](std::size_t i) const noexcept { return entries_[i]; }

  /// Distance of the k-th entry, or +infinity while the list is not full.
  [[nodiscard]] double kth_distance() const noexcept;

  /// Inserts `n` if it ranks before the current k-th entry. Returns whether it was kept.
  bool offer(const Neighbor& n);

  friend bool operator==(const NeighborList&, const NeighborList&) = default;

 private:
  std::size_t capacity_;
  std::vector<Neighbor> entries_;
};

struct SearchStats {
  std::uint64_t leaves_visited = 0;
  std::uint64_t internal_nodes_visited = 0;
  std::uint64_t distance_computations = 0;
  std::uint64_t prunes = 0;
};

struct KnnResult {
  NeighborList neighbors;
  SearchStats stats;
};

/// Squared distance from `q` to the closest point of the closed box.
[[nodiscard]] double mindist(std::span<const double> q, const Mbr& box);

/// Exact k nearest neighbours by depth-first branch and bound. The query is
/// re-expressed in each internal node's frame once; the nearer child is
/// explored first, and each child's bound is the running maximum of the
/// box distances on its path.
[[nodiscard]] KnnResult knn_search(const NohisTree& tree, std::span<const double> q, std::size_t k);

/// All descriptors within distance `radius` of `q`, ranked.
[[nodiscard]] std::vector<Neighbor> range_search(const NohisTree& tree, std::span<const double> q,
                                                 double radius, SearchStats* stats = nullptr);

/// Linear scan over the original coordinates. `cluster` is left 0.
[[nodiscard]] NeighborList brute_force_knn(const Dataset& data, std::span<const double> q, std::size_t k);

/// What a search would see on its way down to one leaf.
struct PathProbe {
  std::vector<std::uint32_t> nodes;  // root .. leaf
  std::vector<double> bounds;        // bound passed to each node; bounds[0] == 0
  DenseVector leaf_query;            // query in the leaf's frame
};

[[nodiscard]] PathProbe probe_path(const NohisTree& tree, std::span<const double> q, std::uint32_t cluster_id);

/// Equality of two exact k-NN answers up to ties: distances agree position
/// by position within `rel_tol`, and indices agree for every entry strictly
/// closer than the k-th distance.
[[nodiscard]] bool equivalent_results(std::span<const Neighbor> a, std::span<const Neighbor> b,
                                      double rel_tol = 1e-9);

/// Search callback shape used by the retrieval pipeline and the benchmark.
using KnnFunction = std::function<NeighborList(std::span<const double>, std::size_t)>;

}  // namespace nohis
