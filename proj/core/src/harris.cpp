// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <tuple>

#include "nohis/descriptors.hpp"
#include "nohis/error.hpp"

namespace nohis {

namespace {

constexpr std::size_t kMinImageSide = 16;

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Sampled first derivative of the Gaussian, scaled so that it returns the
// exact slope of a linear ramp.
std::vector<double> gaussian_derivative_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double moment = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = -i * std::exp(-0.5 * i * i / (sigma * sigma));
    moment -= i * k[i + radius];
  }
  for (double& v : k) v /= moment;
  return k;
}

// Correlates rows with `kx`, then columns with `ky`, replicating borders.
std::vector<double> separable(const std::vector<double>& src, std::size_t w, std::size_t h,
                              const std::vector<double>& kx, const std::vector<double>& ky) {
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  const int iw = static_cast<int>(w);
  const int ih = static_cast<int>(h);
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < ih; ++y) {
    for (int x = 0; x < iw; ++x) {
      double acc = 0;
      for (int i = -rx; i <= rx; ++i) {
        const int xx = std::clamp(x - i, 0, iw - 1);
        acc += kx[i + rx] * src[y * w + xx];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < ih; ++y) {
    for (int x = 0; x < iw; ++x) {
      double acc = 0;
      for (int i = -ry; i <= ry; ++i) {
        const int yy = std::clamp(y - i, 0, ih - 1);
        acc += ky[i + ry] * tmp[yy * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

std::vector<double> blur(const std::vector<double>& src, std::size_t w, std::size_t h, double sigma) {
  const auto k = gaussian_kernel(sigma);
  return separable(src, w, h, k, k);
}

}  // namespace

GrayImage harris_response(const GrayImage& img, double sigma, const HarrisParams& params) {
  const std::size_t w = img.width;
  const std::size_t h = img.height;
  const auto g = gaussian_kernel(sigma);
  const auto dg = gaussian_derivative_kernel(sigma);
  const auto gx = separable(img.pixels, w, h, dg, g);
  const auto gy = separable(img.pixels, w, h, g, dg);

  // Gradients scaled by sigma, so the matrix carries the sigma_d^2 weight.
  const double s2 = sigma * sigma;
  std::vector<double> xx(w * h), yy(w * h), xy(w * h);
  for (std::size_t i = 0; i < w * h; ++i) {
    xx[i] = s2 * gx[i] * gx[i];
    yy[i] = s2 * gy[i] * gy[i];
    xy[i] = s2 * gx[i] * gy[i];
  }
  const double integration = params.integration_ratio * sigma;
  xx = blur(xx, w, h, integration);
  yy = blur(yy, w, h, integration);
  xy = blur(xy, w, h, integration);

  GrayImage response(w, h);
  for (std::size_t i = 0; i < w * h; ++i) {
    const double det = xx[i] * yy[i] - xy[i] * xy[i];
    const double tr = xx[i] + yy[i];
    response.pixels[i] = det - params.kappa * tr * tr;
  }
  return response;
}

std::vector<InterestPoint> harris_multiscale(const GrayImage& img, const HarrisParams& params) {
  if (img.width < kMinImageSide || img.height < kMinImageSide) {
    throw Error(Errc::invalid_argument, "image smaller than 16x16");
  }
  const std::size_t w = img.width;
  const std::size_t h = img.height;
  const std::size_t levels = params.scales.size();

  std::vector<GrayImage> maps;
  std::vector<double> thresholds;
  maps.reserve(levels);
  for (double sigma : params.scales) {
    maps.push_back(harris_response(img, sigma, params));
    const double peak = *std::max_element(maps.back().pixels.begin(), maps.back().pixels.end());
    thresholds.push_back(peak > 0 ? params.relative_threshold * peak : std::numeric_limits<double>::infinity());
  }

  std::vector<InterestPoint> points;
  for (std::size_t s = 0; s < levels; ++s) {
    const double sigma = params.scales[s];
    const double patch = params.radius_factor * sigma;
    for (std::size_t y = 1; y + 1 < h; ++y) {
      for (std::size_t x = 1; x + 1 < w; ++x) {
        const double r = maps[s].at(x, y);
        if (!(r > thresholds[s]) || !(r > 0)) continue;
        const double fx = static_cast<double>(x), fy = static_cast<double>(y);
        if (fx - patch < 0 || fx + patch > static_cast<double>(w - 1) || fy - patch < 0 ||
            fy + patch > static_cast<double>(h - 1)) {
          continue;
        }
        // Strict against neighbours earlier in (scale, y, x) order, non-strict
        // against later ones, so plateaus yield exactly one point.
        bool is_max = true;
        for (int ds = -1; ds <= 1 && is_max; ++ds) {
          if ((ds < 0 && s == 0) || (ds > 0 && s + 1 == levels)) continue;
          const GrayImage& m = maps[s + ds];
          for (int dy = -1; dy <= 1 && is_max; ++dy) {
            for (int dx = -1; dx <= 1 && is_max; ++dx) {
              if (ds == 0 && dy == 0 && dx == 0) continue;
              const double other = m.at(x + dx, y + dy);
              const bool earlier = std::tie(ds, dy, dx) < std::tuple(0, 0, 0);
              is_max = earlier ? r > other : r >= other;
            }
          }
        }
        if (is_max) points.push_back({fx, fy, sigma, r});
      }
    }
  }

  std::stable_sort(points.begin(), points.end(), [](const InterestPoint& a, const InterestPoint& b) {
    return a.response > b.response;
  });
  if (points.size() > params.max_points) points.resize(params.max_points);
  return points;
}

}  // namespace nohis
