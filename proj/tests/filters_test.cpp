#include <gtest/gtest.h>

#include <random>

#include "patchfinder/filters.hpp"

namespace pf = patchfinder;

TEST(ApplyFilters, NonNumericFails) {
  const auto r = pf::apply_filters("N/A", pf::default_chain(pf::FieldKind::Numeric));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.rule, "non_numeric");
  EXPECT_EQ(r.detail, "non-numeric");
}

TEST(ApplyFilters, NumericPasses) { EXPECT_TRUE(pf::apply_filters("4521", pf::default_chain(pf::FieldKind::Numeric)).passed); }

TEST(ApplyFilters, DmsLatitudePasses) {
  EXPECT_TRUE(pf::apply_filters("39°53'49.15\"", pf::default_chain(pf::FieldKind::Latitude)).passed);
  EXPECT_TRUE(pf::apply_filters("39°53’ 49.15”", pf::default_chain(pf::FieldKind::Latitude)).passed);
  EXPECT_TRUE(pf::apply_filters("52.25967", pf::default_chain(pf::FieldKind::Latitude)).passed);
}

TEST(ApplyFilters, ShortCircuitsOnFirstFailure) {
  EXPECT_EQ(pf::apply_filters("   ", pf::default_chain(pf::FieldKind::Numeric)).rule, "nonempty");
  EXPECT_EQ(pf::apply_filters("north", pf::default_chain(pf::FieldKind::Latitude)).rule, "dms_format");
}

TEST(ApplyFilters, RangeGuardsLatitudeAndLongitude) {
  EXPECT_EQ(pf::apply_filters("95.5", pf::default_chain(pf::FieldKind::Latitude)).rule, "range");
  EXPECT_TRUE(pf::apply_filters("-104.8", pf::default_chain(pf::FieldKind::Longitude)).passed);
  EXPECT_EQ(pf::apply_filters("181°0'0\"", pf::default_chain(pf::FieldKind::Longitude)).rule, "range");
}

TEST(ApplyFilters, DepthAcceptsUnitRejectsNegative) {
  EXPECT_TRUE(pf::apply_filters("1,234 ft", pf::default_chain(pf::FieldKind::Depth)).passed);
  EXPECT_EQ(pf::apply_filters("-20", pf::default_chain(pf::FieldKind::Depth)).rule, "range");
}

TEST(ApplyFilters, OnlyLengthUnitsCountAsNumeric) {
  const auto chain = pf::default_chain(pf::FieldKind::Numeric);
  for (const char* ok : {"4521", "4521 ft", "4521ft.", "1380 m", "12.5 Meters", "-3"})
    EXPECT_TRUE(pf::apply_filters(ok, chain).passed) << ok;
  for (const char* bad : {"12a", "12 apples", "3000 ft?", "1.2.3", "approx. 3000"})
    EXPECT_FALSE(pf::apply_filters(bad, chain).passed) << bad;
}

TEST(ApplyFilters, UnknownRuleIsConfigError) {
  pf::FilterChain chain{pf::FieldKind::Numeric, {{"bogus", {}, {}}}};
  EXPECT_THROW(pf::apply_filters("1", chain), pf::ConfigError);
}

TEST(ParseDms, ExampleWithDecimalSeconds) {
  // 60 + 12/60 + 59.32/3600 = 60.2164777...
  EXPECT_NEAR(pf::parse_dms("60°12'59.32\""), 60.21647777777777778, 1e-12);
  EXPECT_NEAR(pf::parse_dms("60°12'59.32″."), 60.21647777777777778, 1e-12);
  EXPECT_NEAR(pf::parse_dms("60°12'59″"), 60.0 + 12.0 / 60 + 59.0 / 3600, 1e-12);
}

TEST(ParseDms, Zero) { EXPECT_EQ(pf::parse_dms("0°0'0\""), 0.0); }

TEST(ParseDms, HemisphereSign) {
  const double v = pf::parse_dms("39°53'49.15\"");
  EXPECT_DOUBLE_EQ(pf::parse_dms("39°53'49.15\" S"), -v);
  EXPECT_DOUBLE_EQ(pf::parse_dms("W 39°53'49.15\""), -v);
  EXPECT_DOUBLE_EQ(pf::parse_dms("39°53'49.15\"N"), v);
  EXPECT_DOUBLE_EQ(pf::parse_dms("-39°53'49.15\""), -v);
}

TEST(ParseDms, Errors) {
  EXPECT_THROW(pf::parse_dms("39°60'0\""), pf::ParseError);
  EXPECT_THROW(pf::parse_dms("39°10'60\""), pf::ParseError);
  EXPECT_THROW(pf::parse_dms("39.5"), pf::ParseError);
  EXPECT_THROW(pf::parse_dms("abc"), pf::ParseError);
  EXPECT_THROW(pf::parse_dms("-39°10'5\" S"), pf::ParseError);
}

TEST(FormatDms, Canonical) {
  EXPECT_EQ(pf::format_dms(pf::parse_dms("60°12'59.32\"")), "60°12'59.32\"");
  EXPECT_EQ(pf::format_dms(-0.5), "-0°30'0\"");
  EXPECT_EQ(pf::format_dms(0.0), "0°0'0\"");
  // seconds rounding carries into minutes and degrees
  EXPECT_EQ(pf::format_dms(59.99999999), "60°0'0\"");
}

TEST(DmsProperty, DecimalRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> deg(-90.0, 90.0);
  for (int i = 0; i < 2000; ++i) {
    const double d = deg(rng);
    ASSERT_NEAR(pf::parse_dms(pf::format_dms(d)), d, 1e-6) << d;
  }
}

TEST(DmsProperty, CanonicalStringRoundTrip) {
  std::mt19937 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const int d = static_cast<int>(rng() % 180);
    const int m = static_cast<int>(rng() % 60);
    const int s = static_cast<int>(rng() % 60);
    const int frac = static_cast<int>(rng() % 100);
    std::string text = std::to_string(d) + "°" + std::to_string(m) + "'" + std::to_string(s);
    if (frac % 10 != 0) text += "." + std::string(frac < 10 ? "0" : "") + std::to_string(frac);
    text += "\"";
    ASSERT_EQ(pf::format_dms(pf::parse_dms(text)), text);
  }
}

TEST(Normalize, DepthWithSeparatorAndUnit) {
  const auto n = pf::normalize(" 1,234 ft ", pf::FieldKind::Depth);
  EXPECT_EQ(n.canonical_text, "1234 ft");
  EXPECT_EQ(n.numeric_value, 1234.0);
}

TEST(Normalize, DecimalLatitude) {
  const auto n = pf::normalize("52.25967", pf::FieldKind::Latitude);
  EXPECT_EQ(n.numeric_value, 52.25967);
  EXPECT_EQ(n.canonical_text, "52.25967");
}

TEST(Normalize, QuoteUnification) {
  EXPECT_EQ(pf::normalize("39°53’ 49.15”", pf::FieldKind::Latitude).canonical_text, "39°53'49.15\"");
  EXPECT_EQ(pf::normalize("39º53′49.15″", pf::FieldKind::Latitude).canonical_text, "39°53'49.15\"");
}

TEST(Normalize, ErrorsAndRanges) {
  EXPECT_THROW(pf::normalize("ninety", pf::FieldKind::Latitude), pf::NormalizationError);
  EXPECT_THROW(pf::normalize("91.0", pf::FieldKind::Latitude), pf::NormalizationError);
  EXPECT_NO_THROW(pf::normalize("179.0", pf::FieldKind::Longitude));
  EXPECT_THROW(pf::normalize("abc", pf::FieldKind::Depth), pf::NormalizationError);
}

TEST(NormalizeProperty, Idempotent) {
  const std::vector<std::pair<std::string, pf::FieldKind>> inputs{
      {" 1,234 ft ", pf::FieldKind::Depth},      {"12,500", pf::FieldKind::Numeric},
      {"+7.50", pf::FieldKind::Numeric},         {"39°53’ 49.15” S", pf::FieldKind::Latitude},
      {"52.25967 N", pf::FieldKind::Latitude},   {"W 104°49'26\"", pf::FieldKind::Longitude},
      {"  Total   Assets ", pf::FieldKind::FreeText}, {".5 m", pf::FieldKind::Depth}};
  for (const auto& [text, kind] : inputs) {
    const auto once = pf::normalize(text, kind);
    EXPECT_EQ(pf::normalize(once.canonical_text, kind), once) << text;
  }
}

TEST(AnswersMatch, CoordinateTolerance) {
  EXPECT_TRUE(pf::answers_match("39°53’ 49.15”", "39°53'49.15\"", pf::FieldKind::Latitude));
  EXPECT_TRUE(pf::answers_match("60.2164777", "60°12'59.32\"", pf::FieldKind::Latitude));
  EXPECT_FALSE(pf::answers_match("60.2165", "60°12'59.32\"", pf::FieldKind::Latitude));
  EXPECT_FALSE(pf::answers_match("garbage", "60.2", pf::FieldKind::Latitude));
}

TEST(AnswersMatch, DepthUnits) {
  EXPECT_TRUE(pf::answers_match("1234 FT", "1,234 ft", pf::FieldKind::Depth));
  EXPECT_TRUE(pf::answers_match("1234", "1234 ft", pf::FieldKind::Depth));
  EXPECT_FALSE(pf::answers_match("1234 m", "1234 ft", pf::FieldKind::Depth));
  EXPECT_FALSE(pf::answers_match("1235", "1234", pf::FieldKind::Depth));
  EXPECT_TRUE(pf::answers_match("1234.0", "1234", pf::FieldKind::Numeric));
}
