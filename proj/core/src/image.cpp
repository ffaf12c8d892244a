// SPDX-License-Identifier: Apache-2.0
#include "nohis/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "nohis/error.hpp"

namespace nohis {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

GrayImage make_image(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw Error(Errc::corrupt_stream, "zero-area image");
  return GrayImage(width, height);
}

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t header_value() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(Errc::corrupt_stream, "malformed PGM header");
    }
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1u << 30)) throw Error(Errc::corrupt_stream, "PGM header value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(Errc::corrupt_stream, "malformed PGM header");
    }
    ++pos_;
  }

  [[nodiscard]] std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  const bool ascii = bytes[1] == '2';
  PgmReader reader(bytes);
  const std::size_t width = reader.header_value();
  const std::size_t height = reader.header_value();
  const std::size_t maxval = reader.header_value();
  if (maxval == 0 || maxval > 65535) throw Error(Errc::corrupt_stream, "PGM maxval out of range");
  GrayImage img = make_image(width, height);
  const double scale = 1.0 / static_cast<double>(maxval);
  const std::size_t n = width * height;

  if (ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = reader.header_value();
      if (v > maxval) throw Error(Errc::corrupt_stream, "PGM sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) * scale;
    }
    return img;
  }

  reader.skip_single_space();
  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  const auto data = reader.rest();
  if (data.size() < n * sample_bytes) throw Error(Errc::corrupt_stream, "truncated PGM raster");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t v = sample_bytes == 1 ? data[i] : (std::size_t{data[2 * i]} << 8) | data[2 * i + 1];
    if (v > maxval) throw Error(Errc::corrupt_stream, "PGM sample exceeds maxval");
    img.pixels[i] = static_cast<double>(v) * scale;
  }
  return img;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()) == 0) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(Errc::corrupt_stream, "PNG decode failed: " + msg);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  if (png.width == 0 || png.height == 0) {
    png_image_free(&png);
    throw Error(Errc::corrupt_stream, "zero-area image");
  }
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(Errc::corrupt_stream, "PNG decode failed: " + msg);
  }
  GrayImage img = make_image(png.width, png.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint8_t* px = buffer.data() + i * channels;
    const double v = color ? 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2] : px[0];
    img.pixels[i] = std::clamp(v / 255.0, 0.0, 1.0);
  }
  return img;
}

}  // namespace

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(Errc::corrupt_stream, "corrupt stream: empty input");
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return decode_pgm(bytes);
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
    return decode_png(bytes);
  }
  throw Error(Errc::unsupported_format, "unsupported image format");
}

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<char> raster(image.pixels.size());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    const double v = std::clamp(image.pixels[i], 0.0, 1.0);
    raster[i] = static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

bool is_supported_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

}  // namespace nohis
