// SPDX-License-Identifier: Apache-2.0
#include "nohis/tree.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "binary_io.hpp"
#include "nohis/error.hpp"

namespace nohis {

bool Mbr::contains(std::span<const double> x) const noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

Mbr mbr_of(const VectorSet& set) {
  std::vector<std::size_t> rows(set.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return mbr_of(set, rows);
}

Mbr mbr_of(const VectorSet& set, std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(Errc::empty_cluster, "empty cluster");
  const auto first = set[rows.front()];
  Mbr box{DenseVector(first.begin(), first.end()), DenseVector(first.begin(), first.end())};
  for (std::size_t r : rows.subspan(1)) {
    const auto x = set[r];
    for (std::size_t i = 0; i < x.size(); ++i) {
      box.lo[i] = std::min(box.lo[i], x[i]);
      box.hi[i] = std::max(box.hi[i], x[i]);
    }
  }
  return box;
}

double overlap_volume(const Mbr& a, const Mbr& b) noexcept {
  double volume = 1.0;
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    const double extent = std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]);
    if (extent <= 0) return 0.0;
    volume *= extent;
  }
  return volume;
}

std::size_t NohisTree::compute_depth() const {
  if (nodes_.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& n = nodes_[id];
    if (!n.leaf) {
      stack.emplace_back(n.right, d + 1);
      stack.emplace_back(n.left, d + 1);
    }
  }
  return deepest;
}

std::vector<std::uint32_t> NohisTree::leaf_nodes() const {
  std::vector<std::uint32_t> out(leaf_count_, 0);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].leaf) out[nodes_[id].cluster_id] = static_cast<std::uint32_t>(id);
  }
  return out;
}

std::vector<std::uint32_t> NohisTree::path_to_leaf(std::uint32_t cluster_id) const {
  if (cluster_id >= leaf_count_) throw Error(Errc::invalid_argument, "cluster id out of range");
  std::vector<std::uint32_t> parent(nodes_.size(), std::numeric_limits<std::uint32_t>::max());
  std::uint32_t target = 0;
  for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
    const auto& n = nodes_[id];
    if (n.leaf) {
      if (n.cluster_id == cluster_id) target = id;
    } else {
      parent[n.right] = id;
      parent[n.left] = id;
    }
  }
  std::vector<std::uint32_t> path{target};
  while (path.back() != 0) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

NohisTree NohisTree::assemble(const Dataset& data, const VectorSet& frame_coords,
                              const ClusterHierarchy& hierarchy, std::vector<Reflection> reflections,
                              std::vector<Mbr> right_boxes, std::vector<Mbr> left_boxes, bool axis_aligned,
                              std::vector<SplitTrace>* trace) {
  NohisTree tree;
  tree.dim_ = data.dim();
  tree.axis_aligned_ = axis_aligned;
  tree.coords_ = VectorSet(data.dim());
  tree.coords_.reserve(data.size());
  tree.global_indices_.reserve(data.size());
  tree.image_ids_.reserve(data.size());

  // Pre-order emission, right child first.
  auto emit = [&](auto&& self, std::size_t hid) -> std::uint32_t {
    const auto id = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    const ClusterNode& cn = hierarchy.nodes[hid];
    if (cn.is_leaf()) {
      TreeNode& leaf = tree.nodes_[id];
      leaf.leaf = true;
      leaf.cluster_id = static_cast<std::uint32_t>(tree.leaf_count_++);
      leaf.begin = tree.coords_.size();
      leaf.count = cn.members.size();
      for (std::size_t row : cn.members) {
        tree.coords_.push_back(frame_coords[row]);
        tree.global_indices_.push_back(data.global_indices[row]);
        tree.image_ids_.push_back(data.image_ids[row]);
      }
      return id;
    }
    if (trace != nullptr) {
      // Statistics are reported in the frame the split was computed in.
      trace->push_back({id, *cn.direction, cn.centroid, cn.pivot});
    }
    const auto right = self(self, static_cast<std::size_t>(cn.right));
    const auto left = self(self, static_cast<std::size_t>(cn.left));
    TreeNode& node = tree.nodes_[id];
    node.reflection = std::move(reflections[hid]);
    node.right_box = std::move(right_boxes[hid]);
    node.left_box = std::move(left_boxes[hid]);
    node.right = right;
    node.left = left;
    return id;
  };
  emit(emit, 0);
  tree.depth_ = tree.compute_depth();
  return tree;
}

NohisTree build_nohis(const Dataset& data, const PddpOptions& options, std::vector<SplitTrace>* trace) {
  return NohisTree::build_impl(data, options, true, trace);
}

NohisTree build_pddp_baseline(const Dataset& data, const PddpOptions& options,
                              std::vector<SplitTrace>* trace) {
  return NohisTree::build_impl(data, options, false, trace);
}

NohisTree NohisTree::build_impl(const Dataset& data, const PddpOptions& options, bool reflected,
                                std::vector<SplitTrace>* trace) {
  if (data.size() == 0) throw Error(Errc::empty_cluster, "empty cluster");
  data.validate();

  VectorSet work = data.vectors;
  std::vector<Reflection> reflections;
  std::vector<Mbr> right_boxes;
  std::vector<Mbr> left_boxes;

  auto hook = [&](const ClusterNode& parent, const SplitOutcome& outcome) {
    const auto id = static_cast<std::size_t>(parent.sequence);
    if (reflections.size() <= id) {
      reflections.resize(id + 1);
      right_boxes.resize(id + 1);
      left_boxes.resize(id + 1);
    }
    if (reflected) {
      Reflection r = make_reflection(outcome.direction);
      for (std::size_t row : outcome.right) r.apply(work[row], work.row(row));
      for (std::size_t row : outcome.left) r.apply(work[row], work.row(row));
      reflections[id] = std::move(r);
    }
    right_boxes[id] = mbr_of(work, outcome.right);
    left_boxes[id] = mbr_of(work, outcome.left);
  };

  const ClusterHierarchy hierarchy = pddp_build(work, options, hook);
  reflections.resize(hierarchy.nodes.size());
  right_boxes.resize(hierarchy.nodes.size());
  left_boxes.resize(hierarchy.nodes.size());
  return assemble(data, work, hierarchy, std::move(reflections), std::move(right_boxes),
                  std::move(left_boxes), !reflected, trace);
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr char kIndexMagic[5] = "NOHI";
constexpr std::uint8_t kInternalTag = 0;
constexpr std::uint8_t kLeafTag = 1;

void write_node(const NohisTree& tree, std::uint32_t id, std::ostream& out) {
  const TreeNode& n = tree.node(id);
  const auto& coords = tree.leaf_coords();
  if (n.leaf) {
    io::put_uint<std::uint8_t>(out, kLeafTag);
    io::put_uint<std::uint32_t>(out, n.cluster_id);
    io::put_uint<std::uint64_t>(out, n.count);
    for (std::size_t row = n.begin; row < n.begin + n.count; ++row) {
      io::put_uint<std::uint64_t>(out, tree.global_indices()[row]);
      io::put_uint<std::uint32_t>(out, tree.image_ids()[row]);
      io::put_f64s(out, coords[row]);
    }
    return;
  }
  io::put_uint<std::uint8_t>(out, kInternalTag);
  io::put_uint<std::uint8_t>(out, n.reflection.is_identity() ? 1 : 0);
  if (n.reflection.is_identity()) {
    for (std::size_t i = 0; i < tree.dim(); ++i) io::put_f64(out, 0.0);
  } else {
    io::put_f64s(out, n.reflection.v);
  }
  io::put_f64s(out, n.right_box.lo);
  io::put_f64s(out, n.right_box.hi);
  io::put_f64s(out, n.left_box.lo);
  io::put_f64s(out, n.left_box.hi);
  write_node(tree, n.right, out);
  write_node(tree, n.left, out);
}

}  // namespace

void serialize(const NohisTree& tree, std::ostream& sink) {
  sink.write(kIndexMagic, 4);
  io::put_uint<std::uint16_t>(sink, kIndexVersion);
  io::put_uint<std::uint16_t>(sink, tree.axis_aligned() ? kIndexFlagAxisAligned : 0);
  io::put_uint<std::uint32_t>(sink, static_cast<std::uint32_t>(tree.dim()));
  io::put_uint<std::uint64_t>(sink, tree.descriptor_count());
  io::put_uint<std::uint64_t>(sink, tree.node_count());
  if (tree.node_count() > 0) write_node(tree, 0, sink);
  if (!sink) throw Error(Errc::io, "failed to write index stream");
}

NohisTree deserialize(std::istream& source) {
  io::expect_magic(source, kIndexMagic);
  const auto version = io::get_uint<std::uint16_t>(source, "version");
  if (version != kIndexVersion) {
    throw Error(Errc::version_mismatch, "unsupported index version " + std::to_string(version));
  }
  const auto flags = io::get_uint<std::uint16_t>(source, "flags");
  const auto dim = io::get_uint<std::uint32_t>(source, "dimension");
  if (dim == 0) throw Error(Errc::dimension_mismatch, "index dimension is zero");
  const auto descriptor_count = io::get_uint<std::uint64_t>(source, "descriptor count");
  const auto node_count = io::get_uint<std::uint64_t>(source, "node count");
  if (node_count == 0 || descriptor_count == 0) throw Error(Errc::corrupt_stream, "empty index");

  NohisTree tree;
  tree.dim_ = dim;
  tree.axis_aligned_ = (flags & kIndexFlagAxisAligned) != 0;
  tree.coords_ = VectorSet(dim);

  auto read_box = [&](Mbr& box) {
    box.lo.resize(dim);
    box.hi.resize(dim);
    io::get_f64s(source, box.lo, "bounding box");
    io::get_f64s(source, box.hi, "bounding box");
  };
  DenseVector row(dim);

  auto read_node = [&](auto&& self) -> std::uint32_t {
    if (tree.nodes_.size() >= node_count) throw Error(Errc::corrupt_stream, "more nodes than declared");
    const auto id = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    const auto tag = io::get_uint<std::uint8_t>(source, "node tag");
    if (tag == kLeafTag) {
      TreeNode leaf;
      leaf.leaf = true;
      leaf.cluster_id = io::get_uint<std::uint32_t>(source, "cluster id");
      leaf.count = io::get_uint<std::uint64_t>(source, "leaf size");
      leaf.begin = tree.coords_.size();
      if (leaf.count == 0 || leaf.begin + leaf.count > descriptor_count) {
        throw Error(Errc::corrupt_stream, "leaf size inconsistent with descriptor count");
      }
      for (std::size_t i = 0; i < leaf.count; ++i) {
        tree.global_indices_.push_back(io::get_uint<std::uint64_t>(source, "global index"));
        tree.image_ids_.push_back(io::get_uint<std::uint32_t>(source, "image id"));
        io::get_f64s(source, row, "leaf coordinates");
        tree.coords_.push_back(row);
      }
      ++tree.leaf_count_;
      tree.nodes_[id] = std::move(leaf);
      return id;
    }
    if (tag != kInternalTag) throw Error(Errc::corrupt_stream, "unknown node tag");
    TreeNode node;
    const auto identity = io::get_uint<std::uint8_t>(source, "identity flag");
    DenseVector v(dim);
    io::get_f64s(source, v, "reflection vector");
    if (identity == 0) node.reflection.v = std::move(v);
    read_box(node.right_box);
    read_box(node.left_box);
    node.right = self(self);
    node.left = self(self);
    tree.nodes_[id] = std::move(node);
    return id;
  };
  read_node(read_node);

  if (tree.nodes_.size() != node_count || tree.coords_.size() != descriptor_count) {
    throw Error(Errc::corrupt_stream, "node or descriptor count does not match header");
  }
  std::vector<bool> seen(tree.leaf_count_, false);
  for (const auto& n : tree.nodes_) {
    if (!n.leaf) continue;
    if (n.cluster_id >= tree.leaf_count_ || seen[n.cluster_id]) {
      throw Error(Errc::corrupt_stream, "leaf cluster ids are not a permutation");
    }
    seen[n.cluster_id] = true;
  }
  tree.depth_ = tree.compute_depth();
  return tree;
}

void save_index(const NohisTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  serialize(tree, out);
}

NohisTree load_index(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  NohisTree tree = deserialize(in);
  if (expected_dim != 0 && tree.dim() != expected_dim) {
    throw Error(Errc::dimension_mismatch, "index dimension " + std::to_string(tree.dim()) +
                                              " does not match expected " + std::to_string(expected_dim));
  }
  return tree;
}

}  // namespace nohis
