// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "nohis/linalg.hpp"

namespace nohis {

/// Descriptor vectors with the bookkeeping every index entry carries:
/// a global descriptor index and the id of the source image.
struct Dataset {
  VectorSet vectors;
  std::vector<std::uint64_t> global_indices;
  std::vector<std::uint32_t> image_ids;

  /// Global index i and image id 0 for every row.
  [[nodiscard]] static Dataset from_vectors(VectorSet vectors);

  [[nodiscard]] std::size_t size() const noexcept { return vectors.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return vectors.dim(); }

  /// Throws Errc::invalid_argument on misaligned id arrays or non-finite values.
  void validate() const;
};

}  // namespace nohis
