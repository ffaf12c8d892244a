// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/descriptors.hpp"
#include "nohis/search.hpp"
#include "nohis/tree.hpp"

namespace nohis {

enum class VoteKernel {
  inverse_distance,  // a match adds 1 / (1 + d^2)
  count,             // a match adds 1
};

struct RankedImage {
  std::uint32_t image_id = 0;
  double score = 0;
  std::size_t supporting_matches = 0;
};

/// Images ordered by descending score, ties by ascending id.
struct ImageRanking {
  std::vector<RankedImage> entries;
};

struct QueryOptions {
  std::size_t k = 20;
  std::size_t top = 10;
  VoteKernel kernel = VoteKernel::inverse_distance;
  HarrisParams harris;
};

[[nodiscard]] double vote_weight(VoteKernel kernel, double squared_distance) noexcept;

/// Aggregates per-descriptor neighbour lists into an image ranking. Each
/// list votes at most once per image, with that image's nearest entry.
[[nodiscard]] ImageRanking rank_images(std::span<const NeighborList> matches, VoteKernel kernel, std::size_t top);

/// Extracts the query's descriptors, searches each, and ranks images.
/// Throws Errc::featureless_query when nothing is detected.
[[nodiscard]] ImageRanking query_by_image(const KnnFunction& search, const GrayImage& img,
                                          const QueryOptions& options);
[[nodiscard]] ImageRanking query_by_image(const NohisTree& tree, const GrayImage& img, const QueryOptions& options);

[[nodiscard]] NeighborList query_by_vector(const NohisTree& tree, std::span<const double> q, std::size_t k);

[[nodiscard]] KnnFunction tree_searcher(const NohisTree& tree);
[[nodiscard]] KnnFunction scan_searcher(const Dataset& data);

}  // namespace nohis
