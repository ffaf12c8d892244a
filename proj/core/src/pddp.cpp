// SPDX-License-Identifier: Apache-2.0
#include "nohis/pddp.hpp"

#include <numeric>
#include <queue>

#include "nohis/error.hpp"

namespace nohis {

namespace {

constexpr double kMinScatter = 1e-12;

struct QueueEntry {
  double scatter;
  std::uint64_t sequence;
  std::size_t node;
};

// Max-heap on scatter; older nodes first among equal scatters.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const noexcept {
    if (a.scatter != b.scatter) return a.scatter < b.scatter;
    return a.sequence > b.sequence;
  }
};

bool splittable(const ClusterNode& node, std::size_t min_leaf) noexcept {
  return node.member_count >= 2 && node.member_count >= 2 * min_leaf && node.scatter >= kMinScatter;
}

}  // namespace

SplitOutcome split_cluster(const VectorSet& data, std::span<const std::size_t> members) {
  SplitOutcome out;
  out.centroid = centroid(data, members);
  if (!(scatter_value(data, members, out.centroid) > 0)) {
    throw Error(Errc::degenerate_cluster, "degenerate cluster");
  }
  out.direction = leading_principal_component(data, members, out.centroid);
  out.pivot = dot(out.direction, out.centroid);
  for (std::size_t idx : members) {
    const double g = dot(out.direction, data[idx]) - out.pivot;
    (g >= 0 ? out.right : out.left).push_back(idx);
  }
  if (out.right.empty() || out.left.empty()) {
    throw Error(Errc::unbalanced_split, "unbalanced degenerate split");
  }
  return out;
}

std::size_t default_cluster_count(std::size_t descriptor_count) noexcept {
  return std::max<std::size_t>(1, descriptor_count / 500);
}

std::size_t ClusterHierarchy::leaf_count() const noexcept {
  std::size_t count = 0;
  for (const auto& n : nodes) count += n.is_leaf() ? 1 : 0;
  return count;
}

std::vector<std::size_t> ClusterHierarchy::leaves_preorder() const {
  std::vector<std::size_t> out;
  if (nodes.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    const auto& n = nodes[id];
    if (n.is_leaf()) {
      out.push_back(id);
    } else {
      stack.push_back(static_cast<std::size_t>(n.left));
      stack.push_back(static_cast<std::size_t>(n.right));
    }
  }
  return out;
}

ClusterHierarchy pddp_build(VectorSet& data, const PddpOptions& options, const SplitHook& hook) {
  if (data.empty()) throw Error(Errc::empty_cluster, "empty cluster");
  const std::size_t c_max = options.c_max == 0 ? default_cluster_count(data.size()) : options.c_max;
  const std::size_t min_leaf = std::max<std::size_t>(1, options.min_leaf);

  ClusterHierarchy h;
  std::uint64_t next_sequence = 0;
  auto make_node = [&](std::vector<std::size_t> members) {
    ClusterNode node;
    node.sequence = next_sequence++;
    node.member_count = members.size();
    node.centroid = centroid(data, members);
    node.scatter = scatter_value(data, members, node.centroid);
    node.members = std::move(members);
    h.nodes.push_back(std::move(node));
    return h.nodes.size() - 1;
  };

  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  make_node(std::move(all));

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
  auto enqueue = [&](std::size_t id) {
    const auto& n = h.nodes[id];
    if (splittable(n, min_leaf)) queue.push({n.scatter, n.sequence, id});
  };
  enqueue(0);

  std::size_t leaves = 1;
  while (leaves < c_max && !queue.empty()) {
    const std::size_t id = queue.top().node;
    queue.pop();

    SplitOutcome outcome;
    try {
      outcome = split_cluster(data, h.nodes[id].members);
    } catch (const Error& e) {
      // Near-duplicate members can defeat the split numerically; keep as a leaf.
      if (e.code() == Errc::unbalanced_split || e.code() == Errc::degenerate_cluster) continue;
      throw;
    }
    if (hook) hook(h.nodes[id], outcome);

    {
      auto& parent = h.nodes[id];
      h.split_log.push_back(parent.scatter);
      parent.direction = outcome.direction;
      parent.pivot = outcome.pivot;
      parent.members.clear();
      parent.members.shrink_to_fit();
    }
    const std::size_t right = make_node(std::move(outcome.right));
    const std::size_t left = make_node(std::move(outcome.left));
    h.nodes[id].right = static_cast<std::int32_t>(right);
    h.nodes[id].left = static_cast<std::int32_t>(left);
    ++leaves;
    enqueue(right);
    enqueue(left);
  }
  return h;
}

}  // namespace nohis
