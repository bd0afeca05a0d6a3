#include <gtest/gtest.h>

#include <random>
#include <set>

#include "patchfinder/patch_grid.hpp"

namespace pf = patchfinder;

namespace {

std::set<int> offsets(const pf::PatchGrid& g, bool x) {
  std::set<int> out;
  for (const auto& p : g.patches) out.insert(x ? p.x0 : p.y0);
  return out;
}

pf::RasterImage checkerboard(int w, int h) {
  pf::RasterImage img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = ((x + y) % 2) ? 255 : 0;
  return img;
}

}  // namespace

TEST(PatchDims, SquareQuarter) {
  EXPECT_EQ(pf::patch_dims({1000, 1000}, {0.25, pf::AspectMode::Square, 0.5}), std::make_pair(500, 500));
}

TEST(PatchDims, StripFifth) {
  EXPECT_EQ(pf::patch_dims({1000, 2000}, {0.20, pf::AspectMode::FullWidthStrip, 0.5}), std::make_pair(1000, 400));
}

TEST(PatchDims, WholeImage) {
  EXPECT_EQ(pf::patch_dims({1000, 1000}, {1.0, pf::AspectMode::Square, 0.5}), std::make_pair(1000, 1000));
  EXPECT_EQ(pf::patch_dims({640, 480}, {1.0, pf::AspectMode::Square, 0.3}), std::make_pair(640, 480));
}

TEST(PatchDims, ImageProportionalAndClamping) {
  // sqrt(0.25) = 0.5 on both axes
  EXPECT_EQ(pf::patch_dims({800, 600}, {0.25, pf::AspectMode::ImageProportional, 0.0}), std::make_pair(400, 300));
  // square side clamps to the short edge
  EXPECT_EQ(pf::patch_dims({100, 1000}, {0.5, pf::AspectMode::Square, 0.0}), std::make_pair(100, 100));
  // tiny fractions never go below one pixel
  EXPECT_EQ(pf::patch_dims({3, 3}, {1e-6, pf::AspectMode::Square, 0.0}), std::make_pair(1, 1));
}

TEST(PatchDims, RoundsHalfUp) {
  // sqrt(0.25 * 5 * 5) = 2.5 -> 3
  EXPECT_EQ(pf::patch_dims({5, 5}, {0.25, pf::AspectMode::Square, 0.0}).first, 3);
}

TEST(PatchDims, RejectsBadSpec) {
  EXPECT_THROW(pf::patch_dims({10, 10}, {0.0, pf::AspectMode::Square, 0.5}), pf::ConfigError);
  EXPECT_THROW(pf::patch_dims({10, 10}, {0.5, pf::AspectMode::Square, 1.0}), pf::ConfigError);
}

TEST(BuildGrid, SquareQuarterHalfOverlap) {
  const auto g = pf::build_grid({1000, 1000}, {0.25, pf::AspectMode::Square, 0.5});
  ASSERT_EQ(g.size(), 9u);
  EXPECT_EQ(offsets(g, true), (std::set<int>{0, 250, 500}));
  EXPECT_EQ(offsets(g, false), (std::set<int>{0, 250, 500}));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.patches[i].index, static_cast<int>(i));
}

TEST(BuildGrid, StripMode) {
  const auto g = pf::build_grid({1000, 2000}, {0.20, pf::AspectMode::FullWidthStrip, 0.5});
  ASSERT_EQ(g.size(), 9u);
  std::set<int> expected;
  for (int y = 0; y <= 1600; y += 200) expected.insert(y);
  EXPECT_EQ(offsets(g, false), expected);
  EXPECT_EQ(offsets(g, true), (std::set<int>{0}));
}

TEST(BuildGrid, WholeImageIsOnePatch) {
  for (auto mode : {pf::AspectMode::Square, pf::AspectMode::ImageProportional, pf::AspectMode::FullWidthStrip}) {
    const auto g = pf::build_grid({321, 777}, {1.0, mode, 0.9});
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.patches[0], (pf::PatchRect{0, 0, 0, 321, 777}));
    EXPECT_EQ(g.spec, pf::kWholeImageSpec);
  }
}

TEST(BuildGrid, LastOffsetClampedNotDuplicated) {
  // 10 px wide, 4 px patches, stride 2: 0,2,4 then clamp to 6
  const auto xs = pf::detail::axis_offsets(10, 4, 0.5);
  EXPECT_EQ(xs, (std::vector<int>{0, 2, 4, 6}));
  // extent 3, stride 1 (floor 1.5): last offset 7 reached exactly once
  EXPECT_EQ(pf::detail::axis_offsets(10, 3, 0.5), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(BuildGrid, RowMajorOrder) {
  const auto g = pf::build_grid({300, 200}, {0.1, pf::AspectMode::Square, 0.25});
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto& a = g.patches[i - 1];
    const auto& b = g.patches[i];
    EXPECT_TRUE(a.y0 < b.y0 || (a.y0 == b.y0 && a.x0 < b.x0));
  }
}

TEST(BuildGridProperty, CoverageBoundsOverlapDeterminism) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(1, 300);
  std::uniform_real_distribution<double> frac(0.001, 1.0);
  std::uniform_real_distribution<double> ov(0.0, 0.95);
  std::uniform_int_distribution<int> mode(0, 2);
  for (int iter = 0; iter < 200; ++iter) {
    const pf::ImageDims dims{dim(rng), dim(rng)};
    const pf::GridSpec spec{frac(rng), static_cast<pf::AspectMode>(mode(rng)), ov(rng)};
    const auto g = pf::build_grid(dims, spec);
    ASSERT_EQ(g, pf::build_grid(dims, spec));

    std::vector<int> hits(static_cast<std::size_t>(dims.area()), 0);
    for (const auto& p : g.patches) {
      ASSERT_TRUE(p.fits(dims));
      for (int y = p.y0; y < p.y0 + p.h; ++y)
        for (int x = p.x0; x < p.x0 + p.w; ++x) ++hits[static_cast<std::size_t>(y) * dims.width + x];
    }
    for (int h : hits) ASSERT_GE(h, 1);

    // neighbours along x share at least floor(overlap * w) columns
    for (std::size_t i = 1; i < g.size(); ++i) {
      const auto& a = g.patches[i - 1];
      const auto& b = g.patches[i];
      if (a.y0 != b.y0) continue;
      const int shared = a.x0 + a.w - b.x0;
      ASSERT_GE(shared, static_cast<int>(std::floor(spec.overlap * a.w)));
    }
  }
}

TEST(BuildGridProperty, CountMonotoneInFraction) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dim(16, 2000);
  for (int iter = 0; iter < 100; ++iter) {
    const pf::ImageDims dims{dim(rng), dim(rng)};
    const double overlap = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    const auto mode = static_cast<pf::AspectMode>(iter % 3);
    std::size_t prev = SIZE_MAX;
    for (double s = 0.01; s <= 1.0 + 1e-9; s += 0.01) {
      const auto n = pf::build_grid(dims, {std::min(s, 1.0), mode, overlap}).size();
      ASSERT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Crop, WholeImageIsIdentity) {
  const auto img = checkerboard(4, 4);
  EXPECT_EQ(pf::crop(img, {0, 0, 0, 4, 4}), img);
}

TEST(Crop, Idempotent) {
  const auto img = checkerboard(9, 7);
  const auto once = pf::crop(img, {0, 2, 1, 5, 4});
  EXPECT_EQ(pf::crop(once, {0, 0, 0, 5, 4}), once);
}

TEST(Crop, CheckerboardCorner) {
  const auto img = checkerboard(4, 4);
  const auto c = pf::crop(img, {0, 0, 0, 2, 2});
  ASSERT_EQ(c.width(), 2);
  EXPECT_EQ(c.at(0, 0), 0);
  EXPECT_EQ(c.at(1, 0), 255);
  EXPECT_EQ(c.at(0, 1), 255);
  EXPECT_EQ(c.at(1, 1), 0);
}

TEST(Crop, ColorChannelsPreserved) {
  pf::RasterImage img(3, 2, 3, 0);
  img.at(2, 1, 0) = 10;
  img.at(2, 1, 1) = 20;
  img.at(2, 1, 2) = 30;
  const auto c = pf::crop(img, {0, 1, 1, 2, 1});
  EXPECT_EQ(c.at(1, 0, 0), 10);
  EXPECT_EQ(c.at(1, 0, 1), 20);
  EXPECT_EQ(c.at(1, 0, 2), 30);
}

TEST(Crop, OutOfBoundsIsGeometryError) {
  const auto img = checkerboard(4, 4);
  EXPECT_THROW(pf::crop(img, {0, 3, 0, 2, 2}), pf::GeometryError);
  EXPECT_THROW(pf::crop(img, {0, -1, 0, 2, 2}), pf::GeometryError);
  EXPECT_THROW(pf::crop(img, {0, 0, 0, 0, 2}), pf::GeometryError);
}
