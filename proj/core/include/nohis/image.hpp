// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nohis {

/// Row-major grayscale raster with intensities in [0, 1].
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

  [[nodiscard]] double at(std::size_t x, std::size_t y) const noexcept { return pixels[y * width + x]; }
  [[nodiscard]] double& at(std::size_t x, std::size_t y) noexcept { return pixels[y * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Decodes PGM (P2/P5) or PNG (8-bit gray/RGB; other PNG layouts are
/// converted) from memory. RGB is reduced with 0.299/0.587/0.114 weights.
[[nodiscard]] GrayImage decode_image(std::span<const std::uint8_t> bytes);
[[nodiscard]] GrayImage load_image(const std::filesystem::path& path);

/// Binary PGM, maxval 255, intensities rounded to the nearest level.
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

[[nodiscard]] bool is_supported_image(const std::filesystem::path& path);

}  // namespace nohis
