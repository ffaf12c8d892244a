// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/linalg.hpp"
#include "nohis/synth.hpp"
#include "oracles.hpp"

namespace fixtures {

inline nohis::VectorSet to_set(const oracle::Points& pts) {
  nohis::VectorSet set(pts.front().size());
  for (const auto& p : pts) set.push_back(p);
  return set;
}

inline oracle::Points to_points(const nohis::VectorSet& set) {
  oracle::Points pts;
  for (std::size_t i = 0; i < set.size(); ++i) pts.emplace_back(set[i].begin(), set[i].end());
  return pts;
}

inline nohis::Dataset mixture_dataset(std::size_t count, std::size_t dim, std::size_t components,
                                      std::uint64_t seed, double spread = 1.0) {
  nohis::synth::MixtureSpec spec;
  spec.dim = dim;
  spec.components = components;
  spec.spread = spread;
  spec.seed = seed;
  return nohis::synth::sample(nohis::synth::make_mixture(spec), count, seed + 1000);
}

inline nohis::Dataset mixture_queries(std::size_t count, std::size_t dim, std::size_t components,
                                      std::uint64_t seed, double spread = 1.0) {
  nohis::synth::MixtureSpec spec;
  spec.dim = dim;
  spec.components = components;
  spec.spread = spread;
  spec.seed = seed;
  return nohis::synth::sample(nohis::synth::make_mixture(spec), count, seed + 7777);
}

}  // namespace fixtures
