// SPDX-License-Identifier: Apache-2.0
#include "nohis/retrieval.hpp"

#include <algorithm>
#include <map>

#include "nohis/error.hpp"

namespace nohis {

double vote_weight(VoteKernel kernel, double squared_distance) noexcept {
  return kernel == VoteKernel::count ? 1.0 : 1.0 / (1.0 + squared_distance);
}

ImageRanking rank_images(std::span<const NeighborList> matches, VoteKernel kernel, std::size_t top) {
  std::map<std::uint32_t, RankedImage> votes;
  std::map<std::uint32_t, double> nearest;
  for (const auto& list : matches) {
    // One vote per (query descriptor, image): the image's closest neighbour.
    nearest.clear();
    for (const auto& n : list.entries()) {
      auto [it, fresh] = nearest.try_emplace(n.image_id, n.squared_distance);
      if (!fresh) it->second = std::min(it->second, n.squared_distance);
    }
    for (const auto& [id, d2] : nearest) {
      auto& entry = votes[id];
      entry.image_id = id;
      entry.score += vote_weight(kernel, d2);
      ++entry.supporting_matches;
    }
  }
  ImageRanking ranking;
  ranking.entries.reserve(votes.size());
  for (const auto& [id, entry] : votes) ranking.entries.push_back(entry);
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedImage& a, const RankedImage& b) { return a.score > b.score; });
  if (top > 0 && ranking.entries.size() > top) ranking.entries.resize(top);
  return ranking;
}

ImageRanking query_by_image(const KnnFunction& search, const GrayImage& img, const QueryOptions& options) {
  const auto descriptors = describe_image(img, options.harris);
  if (descriptors.empty()) throw Error(Errc::featureless_query, "featureless query");
  std::vector<NeighborList> matches;
  matches.reserve(descriptors.size());
  for (const auto& d : descriptors) matches.push_back(search(d, options.k));
  return rank_images(matches, options.kernel, options.top);
}

ImageRanking query_by_image(const NohisTree& tree, const GrayImage& img, const QueryOptions& options) {
  if (tree.dim() != kDescriptorDim) {
    throw Error(Errc::dimension_mismatch, "index dimension does not match image descriptors");
  }
  return query_by_image(tree_searcher(tree), img, options);
}

NeighborList query_by_vector(const NohisTree& tree, std::span<const double> q, std::size_t k) {
  return knn_search(tree, q, k).neighbors;
}

KnnFunction tree_searcher(const NohisTree& tree) {
  return [&tree](std::span<const double> q, std::size_t k) { return knn_search(tree, q, k).neighbors; };
}

KnnFunction scan_searcher(const Dataset& data) {
  return [&data](std::span<const double> q, std::size_t k) { return brute_force_knn(data, q, k); };
}

}  // namespace nohis
