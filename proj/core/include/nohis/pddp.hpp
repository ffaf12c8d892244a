// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nohis/linalg.hpp"

namespace nohis {

/// Outcome of bisecting one cluster by the hyperplane through its centroid
/// orthogonal to its leading principal direction.
struct SplitOutcome {
  std::vector<std::size_t> right;  // U^T d - pivot >= 0
  std::vector<std::size_t> left;   // U^T d - pivot < 0
  DenseVector direction;
  DenseVector centroid;
  double pivot = 0;  // U^T w
};

/// Splits the rows listed in `members`. Throws Errc::degenerate_cluster for
/// zero scatter and Errc::unbalanced_split if one side comes out empty.
[[nodiscard]] SplitOutcome split_cluster(const VectorSet& data, std::span<const std::size_t> members);

struct PddpOptions {
  std::size_t c_max = 0;  // 0: choose max(1, m / 500)
  std::size_t min_leaf = 32;
};

[[nodiscard]] std::size_t default_cluster_count(std::size_t descriptor_count) noexcept;

struct ClusterNode {
  std::uint64_t sequence = 0;  // creation order
  std::size_t member_count = 0;
  std::vector<std::size_t> members;  // leaves only; released once a node is split
  DenseVector centroid;
  double scatter = 0;
  std::optional<DenseVector> direction;  // set once split
  double pivot = 0;
  std::int32_t right = -1;
  std::int32_t left = -1;

  [[nodiscard]] bool is_leaf() const noexcept { return right < 0; }
};

/// Binary cluster hierarchy produced by pddp_build. Node 0 is the root.
struct ClusterHierarchy {
  std::vector<ClusterNode> nodes;
  /// Scatter of each split node, in split order.
  std::vector<double> split_log;

  [[nodiscard]] std::size_t leaf_count() const noexcept;
  /// Leaf node ids in pre-order (right child before left).
  [[nodiscard]] std::vector<std::size_t> leaves_preorder() const;
};

/// Called after each split, before the children are queued. The hook may
/// rewrite the coordinates of the split node's members in `data`; the
/// children's statistics are computed afterwards from the rewritten rows.
using SplitHook = std::function<void(const ClusterNode& parent, const SplitOutcome& outcome)>;

/// Repeatedly splits the splittable leaf of largest scatter until c_max
/// leaves exist or no leaf can be split. `data` is taken by reference so a
/// hook can re-express member coordinates in a node-local frame.
[[nodiscard]] ClusterHierarchy pddp_build(VectorSet& data, const PddpOptions& options,
                                          const SplitHook& hook = {});

}  // namespace nohis
