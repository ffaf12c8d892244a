// SPDX-License-Identifier: Apache-2.0
#include "nohis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nohis/error.hpp"

namespace nohis::synth {

GaussianMixture make_mixture(const MixtureSpec& spec) {
  if (spec.dim == 0 || spec.components == 0) throw Error(Errc::invalid_argument, "empty mixture");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> where(0.0, spec.extent);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::lognormal_distribution<double> stretch(0.0, 0.75);

  GaussianMixture m;
  m.dim = spec.dim;
  const double scale = spec.spread / std::sqrt(static_cast<double>(spec.dim));
  for (std::size_t c = 0; c < spec.components; ++c) {
    DenseVector center(spec.dim);
    for (double& x : center) x = where(rng);
    // Random matrix with column-wise stretch factors: elongated, rotated ellipsoids.
    std::vector<double> shape(spec.dim * spec.dim);
    std::vector<double> axis(spec.dim);
    for (double& a : axis) a = stretch(rng);
    for (std::size_t i = 0; i < spec.dim; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) shape[i * spec.dim + j] = scale * axis[j] * gauss(rng);
    }
    m.centers.push_back(std::move(center));
    m.shapes.push_back(std::move(shape));
  }
  return m;
}

Dataset sample(const GaussianMixture& mixture, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, mixture.centers.size() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = mixture.dim;

  Dataset d;
  d.vectors = VectorSet(n);
  d.vectors.reserve(count);
  DenseVector z(n), x(n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t c = pick(rng);
    for (double& v : z) v = gauss(rng);
    const auto& shape = mixture.shapes[c];
    for (std::size_t r = 0; r < n; ++r) {
      double acc = mixture.centers[c][r];
      for (std::size_t j = 0; j < n; ++j) acc += shape[r * n + j] * z[j];
      x[r] = acc;
    }
    d.vectors.push_back(x);
    d.global_indices.push_back(i);
    d.image_ids.push_back(static_cast<std::uint32_t>(c));
  }
  return d;
}

GrayImage textured_shapes(std::size_t width, std::size_t height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);

  GrayImage img(width, height);
  const double gx = unit(rng) - 0.5, gy = unit(rng) - 0.5;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      img.at(x, y) = 0.5 + 0.2 * (gx * static_cast<double>(x) / w + gy * static_cast<double>(y) / h);
    }
  }

  const int shapes = 6 + static_cast<int>(unit(rng) * 6);
  for (int s = 0; s < shapes; ++s) {
    const int kind = static_cast<int>(unit(rng) * 3);
    const double cx = w * (0.15 + 0.7 * unit(rng));
    const double cy = h * (0.15 + 0.7 * unit(rng));
    const double size = std::min(w, h) * (0.08 + 0.15 * unit(rng));
    const double angle = unit(rng) * 3.141592653589793;
    const double base = unit(rng);
    const double freq = 0.2 + 0.6 * unit(rng);
    const double amp = 0.1 + 0.25 * unit(rng);
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
        const double u = ca * dx + sa * dy, v = -sa * dx + ca * dy;
        bool inside = false;
        switch (kind) {
          case 0: inside = std::abs(u) < size && std::abs(v) < 0.6 * size; break;
          case 1: inside = u * u + v * v < size * size; break;
          default: inside = v > -0.5 * size && v < size - 1.7 * std::abs(u); break;
        }
        if (inside) {
          const double texture = amp * std::sin(freq * u) * std::cos(0.7 * freq * v);
          img.at(x, y) = std::clamp(base + texture, 0.0, 1.0);
        }
      }
    }
  }
  return img;
}

}  // namespace nohis::synth
