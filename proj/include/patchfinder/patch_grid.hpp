#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchfinder/errors.hpp"
#include "patchfinder/raster.hpp"

namespace patchfinder {

enum class AspectMode { Square, ImageProportional, FullWidthStrip };

inline std::string_view to_string(AspectMode mode) {
  switch (mode) {
    case AspectMode::Square: return "square";
    case AspectMode::ImageProportional: return "image-proportional";
    case AspectMode::FullWidthStrip: return "full-width-strip";
  }
  return "square";
}

inline AspectMode parse_aspect_mode(std::string_view text) {
  if (text == "square") return AspectMode::Square;
  if (text == "image-proportional" || text == "image_proportional") return AspectMode::ImageProportional;
  if (text == "full-width-strip" || text == "full_width_strip" || text == "strip") return AspectMode::FullWidthStrip;
  throw ConfigError("unknown aspect_mode '" + std::string(text) + "'");
}

struct GridSpec {
  double area_fraction = 0.25;
  AspectMode aspect_mode = AspectMode::Square;
  double overlap = 0.5;

  bool valid() const {
    return area_fraction > 0.0 && area_fraction <= 1.0 && overlap >= 0.0 && overlap < 1.0;
  }
  void validate() const {
    if (!(area_fraction > 0.0 && area_fraction <= 1.0))
      throw ConfigError("area_fraction must lie in (0, 1]");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("overlap must lie in [0, 1)");
  }
  bool operator==(const GridSpec&) const = default;
};

struct PatchRect {
  int index = 0;
  int x0 = 0;
  int y0 = 0;
  int w = 1;
  int h = 1;

  bool fits(ImageDims dims) const {
    return x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 && x0 + w <= dims.width && y0 + h <= dims.height;
  }
  bool contains(int x, int y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
  bool operator==(const PatchRect&) const = default;
};

struct PatchGrid {
  ImageDims dims;
  GridSpec spec;
  std::vector<PatchRect> patches;

  std::size_t size() const { return patches.size(); }
  bool operator==(const PatchGrid&) const = default;
};

namespace detail {

// round-half-up
inline int round_px(double v) { return static_cast<int>(std::floor(v + 0.5)); }

inline int clamp_extent(int v, int limit) { return std::clamp(v, 1, limit); }

// Offsets k*stride that keep the patch strictly short of the edge, then one
// final offset flush with the edge.
inline std::vector<int> axis_offsets(int image_extent, int patch_extent, double overlap) {
  const int stride = std::max(1, static_cast<int>(std::floor(patch_extent * (1.0 - overlap))));
  const int last = image_extent - patch_extent;
  std::vector<int> offsets;
  for (int off = 0; off < last; off += stride) offsets.push_back(off);
  offsets.push_back(last);
  return offsets;
}

}  // namespace detail

inline std::pair<int, int> patch_dims(ImageDims dims, const GridSpec& spec) {
  spec.validate();
  const double s = spec.area_fraction;
  if (s >= 1.0) return {dims.width, dims.height};
  const double W = dims.width;
  const double H = dims.height;
  int w = 1;
  int h = 1;
  switch (spec.aspect_mode) {
    case AspectMode::Square: {
      // clamped to the short side, so a square patch may cover less than s
      const int side = std::min(detail::round_px(std::sqrt(s * W * H)), std::min(dims.width, dims.height));
      w = h = side;
      break;
    }
    case AspectMode::ImageProportional:
      w = detail::round_px(W * std::sqrt(s));
      h = detail::round_px(H * std::sqrt(s));
      break;
    case AspectMode::FullWidthStrip:
      w = dims.width;
      h = detail::round_px(s * H);
      break;
  }
  return {detail::clamp_extent(w, dims.width), detail::clamp_extent(h, dims.height)};
}

// The single-patch grid. Any spec with area_fraction 1.0 collapses to it,
// since aspect mode and overlap have no effect on a whole-image patch.
inline constexpr GridSpec kWholeImageSpec{1.0, AspectMode::Square, 0.0};

inline PatchGrid build_grid(ImageDims dims, const GridSpec& spec) {
  if (!dims.valid()) throw GeometryError("image dimensions must be positive");
  const auto [w, h] = patch_dims(dims, spec);
  const auto xs = detail::axis_offsets(dims.width, w, spec.overlap);
  const auto ys = detail::axis_offsets(dims.height, h, spec.overlap);

  PatchGrid grid{dims, spec.area_fraction >= 1.0 ? kWholeImageSpec : spec, {}};
  grid.patches.reserve(xs.size() * ys.size());
  int index = 0;
  for (int y : ys)
    for (int x : xs) grid.patches.push_back(PatchRect{index++, x, y, w, h});
  return grid;
}

inline RasterImage crop(const RasterImage& image, const PatchRect& rect) {
  if (image.empty() || !rect.fits(image.dims())) {
    throw GeometryError("patch rect (" + std::to_string(rect.x0) + "," + std::to_string(rect.y0) + "," +
                        std::to_string(rect.w) + "x" + std::to_string(rect.h) + ") outside image " +
                        std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  RasterImage out(rect.w, rect.h, image.channels());
  const std::size_t row = static_cast<std::size_t>(rect.w) * image.channels();
  const auto src = image.pixels();
  auto dst = out.pixels();
  for (int r = 0; r < rect.h; ++r) {
    const std::size_t src_off =
        static_cast<std::size_t>(rect.y0 + r) * image.row_bytes() + static_cast<std::size_t>(rect.x0) * image.channels();
    std::memcpy(dst.data() + static_cast<std::size_t>(r) * row, src.data() + src_off, row);
  }
  return out;
}

}  // namespace patchfinder
