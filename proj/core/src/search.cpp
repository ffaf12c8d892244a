// SPDX-License-Identifier: Apache-2.0
#include "nohis/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nohis/error.hpp"

namespace nohis {

NeighborList::NeighborList(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
  entries_.reserve(capacity);
}

double NeighborList::kth_distance() const noexcept {
  return full() ? entries_.back().squared_distance : std::numeric_limits<double>::infinity();
}

bool NeighborList::offer(const Neighbor& n) {
  if (full() && !ranks_before(n, entries_.back())) return false;
  if (full()) entries_.pop_back();
  // Insertion sort step: shift larger entries right.
  const auto pos = std::upper_bound(entries_.begin(), entries_.end(), n, ranks_before);
  entries_.insert(pos, n);
  return true;
}

double mindist(std::span<const double> q, const Mbr& box) {
  if (q.size() != box.lo.size()) throw Error(Errc::dimension_mismatch, "dimension mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double d = 0;
    if (q[i] < box.lo[i]) {
      d = box.lo[i] - q[i];
    } else if (q[i] > box.hi[i]) {
      d = q[i] - box.hi[i];
    }
    acc += d * d;
  }
  return acc;
}

namespace {

void check_query(const NohisTree& tree, std::span<const double> q) {
  if (tree.node_count() == 0) throw Error(Errc::empty_cluster, "empty tree");
  if (q.size() != tree.dim()) {
    throw Error(Errc::dimension_mismatch, "query dimension " + std::to_string(q.size()) +
                                              " does not match index dimension " + std::to_string(tree.dim()));
  }
}

// Shared descent. `Threshold` yields the current pruning threshold,
// `Admit` says whether a bound is still worth exploring against it, and
// `OnPoint` consumes leaf candidates.
template <typename Threshold, typename Admit, typename OnPoint>
class Descent {
 public:
  Descent(const NohisTree& tree, std::span<const double> q, SearchStats& stats, Threshold threshold,
          Admit admit, OnPoint on_point)
      : tree_(tree),
        dim_(tree.dim()),
        frames_((tree.depth() + 1) * tree.dim()),
        stats_(stats),
        threshold_(threshold),
        admit_(admit),
        on_point_(on_point) {
    std::copy(q.begin(), q.end(), frames_.begin());
  }

  void run() { visit(0, 0, 0.0); }

 private:
  void visit(std::uint32_t id, std::size_t level, double max_dist) {
    const TreeNode& node = tree_.node(id);
    const std::span<const double> q{frames_.data() + level * dim_, dim_};
    if (node.leaf) {
      ++stats_.leaves_visited;
      const auto& coords = tree_.leaf_coords();
      const auto indices = tree_.global_indices();
      const auto images = tree_.image_ids();
      for (std::size_t row = node.begin; row < node.begin + node.count; ++row) {
        ++stats_.distance_computations;
        on_point_(Neighbor{indices[row], node.cluster_id, images[row], squared_distance(q, coords[row])});
      }
      return;
    }

    ++stats_.internal_nodes_visited;
    const std::span<double> local{frames_.data() + (level + 1) * dim_, dim_};
    node.reflection.apply(q, local);
    const double to_right = mindist(local, node.right_box);
    const double to_left = mindist(local, node.left_box);

    struct Child {
      std::uint32_t id;
      double bound;
    };
    Child first{node.right, to_right};
    Child second{node.left, to_left};
    if (to_left < to_right) std::swap(first, second);

    for (Child c : {first, second}) {
      const double bound = std::max(max_dist, c.bound);
      if (admit_(bound, threshold_())) {
        visit(c.id, level + 1, bound);
      } else {
        ++stats_.prunes;
      }
    }
  }

  const NohisTree& tree_;
  std::size_t dim_;
  std::vector<double> frames_;
  SearchStats& stats_;
  Threshold threshold_;
  Admit admit_;
  OnPoint on_point_;
};

template <typename Threshold, typename Admit, typename OnPoint>
Descent(const NohisTree&, std::span<const double>, SearchStats&, Threshold, Admit, OnPoint)
    -> Descent<Threshold, Admit, OnPoint>;

}  // namespace

KnnResult knn_search(const NohisTree& tree, std::span<const double> q, std::size_t k) {
  check_query(tree, q);
  KnnResult result{NeighborList(k), {}};
  NeighborList& list = result.neighbors;
  Descent descent(
      tree, q, result.stats, [&list] { return list.kth_distance(); },
      [](double bound, double kth) { return bound < kth; },
      [&list](const Neighbor& n) {
        if (n.squared_distance <= list.kth_distance()) list.offer(n);
      });
  descent.run();
  return result;
}

std::vector<Neighbor> range_search(const NohisTree& tree, std::span<const double> q, double radius,
                                   SearchStats* stats) {
  check_query(tree, q);
  if (!(radius >= 0)) throw Error(Errc::invalid_argument, "radius must be nonnegative");
  // Compared as sqrt(d2) <= radius so that radius = sqrt(kth distance) always
  // admits the k-th neighbour; radius * radius may round below it.
  SearchStats local;
  std::vector<Neighbor> out;
  Descent descent(
      tree, q, stats != nullptr ? *stats : local, [radius] { return radius; },
      [](double bound, double r) { return std::sqrt(bound) <= r; },
      [&out, radius](const Neighbor& n) {
        if (std::sqrt(n.squared_distance) <= radius) out.push_back(n);
      });
  descent.run();
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

NeighborList brute_force_knn(const Dataset& data, std::span<const double> q, std::size_t k) {
  if (data.size() == 0) throw Error(Errc::empty_cluster, "empty data");
  if (q.size() != data.dim()) throw Error(Errc::dimension_mismatch, "dimension mismatch");
  NeighborList list(k);
  for (std::size_t row = 0; row < data.size(); ++row) {
    const double d = squared_distance(q, data.vectors[row]);
    if (d > list.kth_distance()) continue;
    list.offer(Neighbor{data.global_indices[row], 0, data.image_ids[row], d});
  }
  return list;
}

bool equivalent_results(std::span<const Neighbor> a, std::span<const Neighbor> b, double rel_tol) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  auto close = [rel_tol](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i].squared_distance, b[i].squared_distance)) return false;
  }
  const double kth = std::max(a.back().squared_distance, b.back().squared_distance);
  auto strict_indices = [&](std::span<const Neighbor> list) {
    std::vector<std::uint64_t> ids;
    for (const auto& n : list) {
      if (!close(n.squared_distance, kth)) ids.push_back(n.index);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  return strict_indices(a) == strict_indices(b);
}

PathProbe probe_path(const NohisTree& tree, std::span<const double> q, std::uint32_t cluster_id) {
  check_query(tree, q);
  PathProbe probe;
  probe.nodes = tree.path_to_leaf(cluster_id);
  probe.leaf_query.assign(q.begin(), q.end());
  double bound = 0.0;
  probe.bounds.push_back(bound);
  for (std::size_t i = 0; i + 1 < probe.nodes.size(); ++i) {
    const TreeNode& node = tree.node(probe.nodes[i]);
    node.reflection.apply(probe.leaf_query, probe.leaf_query);
    const bool right = probe.nodes[i + 1] == node.right;
    bound = std::max(bound, mindist(probe.leaf_query, right ? node.right_box : node.left_box));
    probe.bounds.push_back(bound);
  }
  return probe;
}

}  // namespace nohis
