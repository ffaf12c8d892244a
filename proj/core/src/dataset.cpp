// SPDX-License-Identifier: Apache-2.0
#include "nohis/dataset.hpp"

#include <cmath>
#include <numeric>

#include "nohis/error.hpp"

namespace nohis {

Dataset Dataset::from_vectors(VectorSet vectors) {
  Dataset d;
  d.global_indices.resize(vectors.size());
  std::iota(d.global_indices.begin(), d.global_indices.end(), std::uint64_t{0});
  d.image_ids.assign(vectors.size(), 0);
  d.vectors = std::move(vectors);
  return d;
}

void Dataset::validate() const {
  if (global_indices.size() != vectors.size() || image_ids.size() != vectors.size()) {
    throw Error(Errc::invalid_argument, "descriptor ids are not aligned with the vectors");
  }
  for (double c : vectors.data()) {
    if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "non-finite descriptor component");
  }
}

}  // namespace nohis
