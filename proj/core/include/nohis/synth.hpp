// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/image.hpp"

namespace nohis::synth {

/// Gaussian mixture with randomly oriented, elongated components.
struct GaussianMixture {
  std::size_t dim = 0;
  std::vector<DenseVector> centers;
  std::vector<std::vector<double>> shapes;  // dim x dim, row-major, per component
};

struct MixtureSpec {
  std::size_t dim = 12;
  std::size_t components = 50;
  double spread = 1.0;    // typical per-axis standard deviation
  double extent = 20.0;   // centers uniform in [0, extent]^dim
  std::uint64_t seed = 1;
};

[[nodiscard]] GaussianMixture make_mixture(const MixtureSpec& spec);

/// Draws `count` points; image_id holds the generating component.
[[nodiscard]] Dataset sample(const GaussianMixture& mixture, std::size_t count, std::uint64_t seed);

/// Seeded grayscale picture of overlapping textured shapes on a gradient.
[[nodiscard]] GrayImage textured_shapes(std::size_t width, std::size_t height, std::uint64_t seed);

}  // namespace nohis::synth
