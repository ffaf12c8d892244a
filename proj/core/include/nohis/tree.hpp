// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/linalg.hpp"
#include "nohis/pddp.hpp"

namespace nohis {

/// Axis-aligned box given by per-dimension minima `lo` (S) and maxima `hi` (T).
struct Mbr {
  DenseVector lo;
  DenseVector hi;

  [[nodiscard]] bool contains(std::span<const double> x) const noexcept;
  friend bool operator==(const Mbr&, const Mbr&) = default;
};

[[nodiscard]] Mbr mbr_of(const VectorSet& set);
[[nodiscard]] Mbr mbr_of(const VectorSet& set, std::span<const std::size_t> rows);

/// Volume of the intersection of two boxes (0 when they only touch).
[[nodiscard]] double overlap_volume(const Mbr& a, const Mbr& b) noexcept;

struct TreeNode {
  bool leaf = false;

  // Internal nodes: the reflection shared by both children's frame and the
  // children's boxes expressed in that frame.
  Reflection reflection;
  Mbr right_box;
  Mbr left_box;
  std::uint32_t right = 0;
  std::uint32_t left = 0;

  // Leaves: rows [begin, begin + count) of the tree's leaf storage.
  std::uint32_t cluster_id = 0;
  std::size_t begin = 0;
  std::size_t count = 0;
};

/// Per internal node: the split statistics in that node's local frame.
struct SplitTrace {
  std::uint32_t node = 0;
  DenseVector direction;
  DenseVector centroid;
  double pivot = 0;
};

/// Immutable binary index. Nodes are stored in pre-order, right child first;
/// node 0 is the root. Leaf coordinates are expressed in the cumulative frame
/// of the reflections on the root-to-leaf path, so leaf distances are
/// computed against the equally transformed query directly.
class NohisTree {
 public:
  NohisTree() = default;

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t descriptor_count() const noexcept { return coords_.size(); }
  [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_count_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  /// True for the overlapping baseline: no reflections, boxes in the input basis.
  [[nodiscard]] bool axis_aligned() const noexcept { return axis_aligned_; }

  [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const TreeNode& node(std::size_t id) const noexcept { return nodes_[id]; }

  [[nodiscard]] const VectorSet& leaf_coords() const noexcept { return coords_; }
  [[nodiscard]] std::span<const std::uint64_t> global_indices() const noexcept { return global_indices_; }
  [[nodiscard]] std::span<const std::uint32_t> image_ids() const noexcept { return image_ids_; }

  /// Node ids from the root down to the leaf with this cluster id.
  [[nodiscard]] std::vector<std::uint32_t> path_to_leaf(std::uint32_t cluster_id) const;
  /// Node id of each leaf, indexed by cluster id.
  [[nodiscard]] std::vector<std::uint32_t> leaf_nodes() const;

  friend NohisTree build_nohis(const Dataset&, const PddpOptions&, std::vector<SplitTrace>*);
  friend NohisTree build_pddp_baseline(const Dataset&, const PddpOptions&, std::vector<SplitTrace>*);
  friend NohisTree deserialize(std::istream&);

 private:
  std::size_t dim_ = 0;
  std::size_t leaf_count_ = 0;
  bool axis_aligned_ = false;
  std::size_t depth_ = 0;
  std::vector<TreeNode> nodes_;
  VectorSet coords_;
  std::vector<std::uint64_t> global_indices_;
  std::vector<std::uint32_t> image_ids_;

  [[nodiscard]] std::size_t compute_depth() const;
  static NohisTree build_impl(const Dataset& data, const PddpOptions& options, bool reflected,
                              std::vector<SplitTrace>* trace);
  static NohisTree assemble(const Dataset& data, const VectorSet& frame_coords,
                            const ClusterHierarchy& hierarchy, std::vector<Reflection> reflections,
                            std::vector<Mbr> right_boxes, std::vector<Mbr> left_boxes, bool axis_aligned,
                            std::vector<SplitTrace>* trace);
};

/// PDDP hierarchy with each split re-expressed in a frame whose first axis is
/// the split direction, giving sibling boxes separated along that axis.
[[nodiscard]] NohisTree build_nohis(const Dataset& data, const PddpOptions& options,
                                    std::vector<SplitTrace>* trace = nullptr);

/// Same PDDP hierarchy without reflections; sibling boxes may overlap.
[[nodiscard]] NohisTree build_pddp_baseline(const Dataset& data, const PddpOptions& options,
                                            std::vector<SplitTrace>* trace = nullptr);

// Index file: little-endian, magic "NOHI", version 1.
inline constexpr std::uint16_t kIndexVersion = 1;
inline constexpr std::uint16_t kIndexFlagAxisAligned = 0x1;

void serialize(const NohisTree& tree, std::ostream& sink);
[[nodiscard]] NohisTree deserialize(std::istream& source);

void save_index(const NohisTree& tree, const std::filesystem::path& path);
/// `expected_dim` of 0 accepts any dimension.
[[nodiscard]] NohisTree load_index(const std::filesystem::path& path, std::size_t expected_dim = 0);

}  // namespace nohis
