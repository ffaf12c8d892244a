// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nohis/dataset.hpp"
#include "nohis/image.hpp"
#include "nohis/linalg.hpp"

namespace nohis {

inline constexpr std::size_t kDescriptorDim = 12;

struct InterestPoint {
  double x = 0;
  double y = 0;
  double scale = 0;  // derivation sigma, pixels
  double response = 0;
};

struct HarrisParams {
  double kappa = 0.04;
  std::vector<double> scales = {1.6, 1.6 * 1.35, 1.6 * 1.35 * 1.35, 1.6 * 1.35 * 1.35 * 1.35,
                                1.6 * 1.35 * 1.35 * 1.35 * 1.35};
  double integration_ratio = 1.5;
  double relative_threshold = 1e-4;
  /// Points whose descriptor patch (radius_factor * scale) would leave the image are dropped.
  double radius_factor = 6.0;
  std::size_t max_points = 300;
};

/// Scale-normalised Harris measure det(M) - kappa * trace(M)^2 at one scale.
[[nodiscard]] GrayImage harris_response(const GrayImage& img, double sigma, const HarrisParams& params);

/// Multi-scale Harris points: local maxima over the 3x3x3 space-scale
/// neighbourhood, above the per-scale relative threshold, strongest first.
[[nodiscard]] std::vector<InterestPoint> harris_multiscale(const GrayImage& img, const HarrisParams& params);

/// (p, q) orders of the six order-3 moments, in output order.
inline constexpr std::array<std::pair<int, int>, 6> kZernikeOrders = {
    {{0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {3, 3}}};

/// The six complex Zernike moments of the disk of radius radius_factor * scale.
[[nodiscard]] std::array<std::complex<double>, 6> zernike_moments(const GrayImage& img, const InterestPoint& p,
                                                                  double radius_factor);

/// Moments flattened to 12 reals, (re, im) per moment.
[[nodiscard]] DenseVector zernike_descriptor(const GrayImage& img, const InterestPoint& p, double radius_factor);

struct DescriptorRecord {
  DenseVector vector;
  std::uint32_t image_id = 0;
  std::uint64_t global_index = 0;
};

struct ExtractionParams {
  HarrisParams harris;
  std::size_t jobs = 1;
};

struct ExtractionFailure {
  std::uint32_t image_id = 0;
  std::string message;
};

struct ExtractionResult {
  std::vector<DescriptorRecord> records;
  std::vector<std::pair<std::uint32_t, std::size_t>> per_image_counts;
  std::vector<ExtractionFailure> failures;
};

/// Descriptors of one image, strongest interest point first.
[[nodiscard]] std::vector<DenseVector> describe_image(const GrayImage& img, const HarrisParams& params);

/// Per-image extraction; a failing image is reported and skipped. Global
/// indices run in image order, then response order.
[[nodiscard]] ExtractionResult extract_descriptors(
    const std::vector<std::pair<std::uint32_t, GrayImage>>& images, const ExtractionParams& params);

[[nodiscard]] Dataset to_dataset(const std::vector<DescriptorRecord>& records, std::size_t dim = kDescriptorDim);

// Descriptor file: little-endian, magic "NOHV", version 1.
inline constexpr std::uint16_t kDescriptorFileVersion = 1;

void write_descriptors(const Dataset& data, std::ostream& sink);
[[nodiscard]] Dataset read_descriptors(std::istream& source);
void save_descriptors(const Dataset& data, const std::filesystem::path& path);
[[nodiscard]] Dataset load_descriptors(const std::filesystem::path& path);

}  // namespace nohis
