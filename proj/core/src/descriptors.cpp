// SPDX-License-Identifier: Apache-2.0
#include "nohis/descriptors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

#include "binary_io.hpp"
#include "nohis/error.hpp"

namespace nohis {

namespace {

double radial(int p, int q, double rho) {
  const double r2 = rho * rho;
  switch (p * 10 + q) {
    case 0: return 1.0;
    case 11: return rho;
    case 20: return 2.0 * r2 - 1.0;
    case 22: return r2;
    case 31: return (3.0 * r2 - 2.0) * rho;
    case 33: return r2 * rho;
    default: throw Error(Errc::invalid_argument, "unsupported Zernike order");
  }
}

}  // namespace

std::array<std::complex<double>, 6> zernike_moments(const GrayImage& img, const InterestPoint& p,
                                                    double radius_factor) {
  const double r = radius_factor * p.scale;
  if (!(r > 0)) throw Error(Errc::invalid_argument, "patch radius must be positive");
  if (p.x - r < 0 || p.y - r < 0 || p.x + r > static_cast<double>(img.width) - 1 ||
      p.y + r > static_cast<double>(img.height) - 1) {
    throw Error(Errc::patch_out_of_bounds, "patch out of bounds");
  }

  std::array<std::complex<double>, 6> z{};
  const auto x0 = static_cast<std::size_t>(std::ceil(p.x - r));
  const auto x1 = static_cast<std::size_t>(std::floor(p.x + r));
  const auto y0 = static_cast<std::size_t>(std::ceil(p.y - r));
  const auto y1 = static_cast<std::size_t>(std::floor(p.y + r));
  for (std::size_t y = y0; y <= y1; ++y) {
    const double v = (static_cast<double>(y) - p.y) / r;
    for (std::size_t x = x0; x <= x1; ++x) {
      const double u = (static_cast<double>(x) - p.x) / r;
      const double rho2 = u * u + v * v;
      if (rho2 > 1.0) continue;
      const double f = img.at(x, y);
      if (f == 0.0) continue;
      const double rho = std::sqrt(rho2);
      const double theta = std::atan2(v, u);
      for (std::size_t k = 0; k < kZernikeOrders.size(); ++k) {
        const auto [order, rep] = kZernikeOrders[k];
        // Conjugate basis function R_pq(rho) e^{-i q theta}.
        z[k] += f * radial(order, rep, rho) * std::polar(1.0, -rep * theta);
      }
    }
  }
  const double area = 1.0 / (r * r);
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] *= (kZernikeOrders[k].first + 1) / std::numbers::pi * area;
  }
  return z;
}

DenseVector zernike_descriptor(const GrayImage& img, const InterestPoint& p, double radius_factor) {
  const auto z = zernike_moments(img, p, radius_factor);
  DenseVector out;
  out.reserve(kDescriptorDim);
  for (const auto& c : z) {
    out.push_back(c.real());
    out.push_back(c.imag());
  }
  return out;
}

std::vector<DenseVector> describe_image(const GrayImage& img, const HarrisParams& params) {
  std::vector<DenseVector> out;
  for (const auto& p : harris_multiscale(img, params)) {
    out.push_back(zernike_descriptor(img, p, params.radius_factor));
  }
  return out;
}

ExtractionResult extract_descriptors(const std::vector<std::pair<std::uint32_t, GrayImage>>& images,
                                     const ExtractionParams& params) {
  struct Slot {
    std::vector<DenseVector> vectors;
    std::string error;
    bool failed = false;
  };
  std::vector<Slot> slots(images.size());
  auto work = [&](std::size_t i) {
    try {
      slots[i].vectors = describe_image(images[i].second, params.harris);
    } catch (const std::exception& e) {
      slots[i].failed = true;
      slots[i].error = e.what();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(params.jobs, images.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < images.size(); ++i) work(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < images.size(); i += jobs) work(i);
      });
    }
  }

  ExtractionResult result;
  std::uint64_t next = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::uint32_t id = images[i].first;
    if (slots[i].failed) {
      result.failures.push_back({id, slots[i].error});
      continue;
    }
    result.per_image_counts.emplace_back(id, slots[i].vectors.size());
    for (auto& v : slots[i].vectors) result.records.push_back({std::move(v), id, next++});
  }
  return result;
}

Dataset to_dataset(const std::vector<DescriptorRecord>& records, std::size_t dim) {
  Dataset d;
  d.vectors = VectorSet(dim);
  d.vectors.reserve(records.size());
  for (const auto& r : records) {
    d.vectors.push_back(r.vector);
    d.global_indices.push_back(r.global_index);
    d.image_ids.push_back(r.image_id);
  }
  return d;
}

namespace {
constexpr char kDescriptorMagic[5] = "NOHV";
}  // namespace

void write_descriptors(const Dataset& data, std::ostream& sink) {
  data.validate();
  sink.write(kDescriptorMagic, 4);
  io::put_uint<std::uint16_t>(sink, kDescriptorFileVersion);
  io::put_uint<std::uint32_t>(sink, static_cast<std::uint32_t>(data.dim() == 0 ? kDescriptorDim : data.dim()));
  io::put_uint<std::uint64_t>(sink, data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    io::put_uint<std::uint32_t>(sink, data.image_ids[i]);
    io::put_uint<std::uint64_t>(sink, data.global_indices[i]);
    io::put_f64s(sink, data.vectors[i]);
  }
  if (!sink) throw Error(Errc::io, "failed to write descriptor stream");
}

Dataset read_descriptors(std::istream& source) {
  io::expect_magic(source, kDescriptorMagic);
  const auto version = io::get_uint<std::uint16_t>(source, "version");
  if (version != kDescriptorFileVersion) {
    throw Error(Errc::version_mismatch, "unsupported descriptor file version " + std::to_string(version));
  }
  const auto dim = io::get_uint<std::uint32_t>(source, "dimension");
  if (dim == 0) throw Error(Errc::dimension_mismatch, "descriptor dimension is zero");
  const auto count = io::get_uint<std::uint64_t>(source, "count");

  Dataset d;
  d.vectors = VectorSet(dim);
  DenseVector row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    d.image_ids.push_back(io::get_uint<std::uint32_t>(source, "image id"));
    d.global_indices.push_back(io::get_uint<std::uint64_t>(source, "global index"));
    io::get_f64s(source, row, "descriptor");
    d.vectors.push_back(row);
  }
  d.validate();
  return d;
}

void save_descriptors(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  write_descriptors(data, out);
}

Dataset load_descriptors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  return read_descriptors(in);
}

}  // namespace nohis
