#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "patchfinder/errors.hpp"
#include "patchfinder/raster.hpp"

namespace patchfinder {

// Brightening Gaussian noise: each channel value v in [0, 1] becomes
// clamp(v + |g|, 0, 1), g ~ N(0, sigma), drawn in row-major order from a
// mt19937_64 seeded with `seed`. Dark ink fades toward white; white stays white.
inline RasterImage inject_noise(const RasterImage& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be a finite value >= 0");
  if (image.empty()) throw FormatError("cannot add noise to an empty image");
  RasterImage out = image;
  if (sigma == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& px : out.pixels()) {
    const double v = std::clamp(px / 255.0 + std::fabs(gauss(rng)), 0.0, 1.0);
    px = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

}  // namespace patchfinder
