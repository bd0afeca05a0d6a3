#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "patchfinder/errors.hpp"

namespace patchfinder {

struct ImageDims {
  int width = 1;
  int height = 1;

  bool valid() const { return width >= 1 && height >= 1; }
  long long area() const { return static_cast<long long>(width) * height; }
  bool operator==(const ImageDims&) const = default;
};

// 8-bit interleaved raster, 1 (gray) or 3 (BGR) channels, rows packed.
class RasterImage {
 public:
  RasterImage() = default;

  RasterImage(int width, int height, int channels, std::uint8_t fill = 255)
      : dims_{width, height}, channels_(channels) {
    if (!dims_.valid()) throw GeometryError("raster dimensions must be positive");
    if (channels != 1 && channels != 3) throw FormatError("raster must have 1 or 3 channels");
    pixels_.assign(static_cast<std::size_t>(dims_.area()) * channels_, fill);
  }

  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> pixels)
      : RasterImage(width, height, channels) {
    if (pixels.size() != pixels_.size()) throw FormatError("pixel buffer size mismatch");
    pixels_ = std::move(pixels);
  }

  ImageDims dims() const { return dims_; }
  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  int channels() const { return channels_; }
  bool empty() const { return pixels_.empty(); }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::size_t row_bytes() const { return static_cast<std::size_t>(dims_.width) * channels_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[static_cast<std::size_t>(y) * row_bytes() + static_cast<std::size_t>(x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels_[static_cast<std::size_t>(y) * row_bytes() + static_cast<std::size_t>(x) * channels_ + c];
  }

  bool operator==(const RasterImage&) const = default;

 private:
  ImageDims dims_{0, 0};
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

inline std::string sha256_hex(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  return to_hex(std::span<const std::uint8_t>(digest.data(), len));
}

// Content fingerprint of a raster: SHA-256 over a small header (w, h, c)
// followed by the pixel bytes. Stable across processes and platforms.
inline std::string fingerprint(const RasterImage& image) {
  std::vector<std::uint8_t> buf;
  buf.reserve(12 + image.pixels().size());
  auto put32 = [&buf](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put32(static_cast<std::uint32_t>(image.width()));
  put32(static_cast<std::uint32_t>(image.height()));
  put32(static_cast<std::uint32_t>(image.channels()));
  buf.insert(buf.end(), image.pixels().begin(), image.pixels().end());
  return sha256_hex(buf);
}

}  // namespace patchfinder
