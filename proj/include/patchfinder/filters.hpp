#pragma once

#include <algorithm>
#include <iterator>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchfinder/confidence.hpp"
#include "patchfinder/errors.hpp"

namespace patchfinder {

enum class FieldKind { Numeric, Latitude, Longitude, Depth, FreeText };

inline std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Numeric: return "numeric";
    case FieldKind::Latitude: return "latitude";
    case FieldKind::Longitude: return "longitude";
    case FieldKind::Depth: return "depth";
    case FieldKind::FreeText: return "free-text";
  }
  return "free-text";
}

inline FieldKind parse_field_kind(std::string_view text) {
  if (text == "numeric") return FieldKind::Numeric;
  if (text == "latitude") return FieldKind::Latitude;
  if (text == "longitude") return FieldKind::Longitude;
  if (text == "depth" || text == "tvd") return FieldKind::Depth;
  if (text == "free-text" || text == "free_text" || text == "text") return FieldKind::FreeText;
  throw ConfigError("unknown field kind '" + std::string(text) + "'");
}

inline bool is_coordinate(FieldKind kind) { return kind == FieldKind::Latitude || kind == FieldKind::Longitude; }

// ---------------------------------------------------------------------------
// Text cleanup

namespace detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string strip_thousands(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && i + 1 < s.size() && is_digit(s[i - 1]) && is_digit(s[i + 1])) continue;
    out.push_back(s[i]);
  }
  return out;
}

inline std::string remove_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = true;
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace detail

// Maps typographic quote, prime and degree variants onto ' " and °.
inline std::string unify_glyphs(std::string_view text) {
  std::string s(text);
  for (std::string_view single : {"’", "‘", "′", "´", "`"}) detail::replace_all(s, single, "'");
  for (std::string_view dbl : {"”", "“", "″"}) detail::replace_all(s, dbl, "\"");
  for (std::string_view deg : {"º", "˚"}) detail::replace_all(s, deg, "°");
  detail::replace_all(s, "''", "\"");
  return s;
}

// ---------------------------------------------------------------------------
// Numbers with an optional unit token ("1234 ft", "-3.5")

struct NumberWithUnit {
  double value = 0.0;
  std::string number_text;  // canonical digits, no '+' and no separators
  std::string unit;         // lowercased, empty when absent
};

// Lowercased, trailing dots removed.
inline bool is_length_unit(std::string_view unit) {
  static constexpr std::string_view kUnits[] = {"ft",    "feet",  "foot",   "usft", "m",      "meter", "meters",
                                                "metre", "metres", "km",    "mi",   "in",     "inch",  "inches",
                                                "yd",    "yds",   "md",     "tvd",  "ftkb",   "mkb"};
  return std::find(std::begin(kUnits), std::end(kUnits), unit) != std::end(kUnits);
}

inline std::optional<NumberWithUnit> parse_number_with_unit(std::string_view text) {
  static const std::regex kPattern(R"(^([+-]?)(\d+(?:\.\d*)?|\.\d+)\s*([A-Za-z][A-Za-z.]*)?\.?$)");
  const std::string cleaned = detail::strip_thousands(trim(unify_glyphs(text)));
  std::smatch m;
  if (!std::regex_match(cleaned, m, kPattern)) return std::nullopt;
  std::string digits = m[2].str();
  if (digits.back() == '.') digits.pop_back();
  if (digits.front() == '.') digits.insert(digits.begin(), '0');
  NumberWithUnit out;
  out.number_text = (m[1].str() == "-" ? "-" : "") + digits;
  out.value = std::strtod(out.number_text.c_str(), nullptr);
  if (m[3].matched) {
    out.unit = detail::lower(m[3].str());
    while (!out.unit.empty() && out.unit.back() == '.') out.unit.pop_back();
    if (!is_length_unit(out.unit)) return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degrees / minutes / seconds

struct DmsParts {
  bool negative = false;
  long degrees = 0;
  long minutes = 0;
  std::string seconds_text;  // as written, "" when seconds were omitted
  double seconds = 0.0;

  double decimal() const {
    const double v = static_cast<double>(degrees) + static_cast<double>(minutes) / 60.0 + seconds / 3600.0;
    return negative ? -v : v;
  }
};

namespace detail {

inline DmsParts parse_dms_parts(std::string_view text) {
  static const std::regex kPattern(
      "^([+-])?([NSEWnsew])?(\\d+)°(\\d+)'(?:(\\d+(?:\\.\\d+)?)\")?([NSEWnsew])?\\.?$");
  const std::string cleaned = remove_spaces(unify_glyphs(text));
  std::smatch m;
  if (!std::regex_match(cleaned, m, kPattern)) throw ParseError("not a DMS coordinate: '" + std::string(text) + "'");
  if (m[2].matched && m[6].matched) throw ParseError("two hemisphere letters in '" + std::string(text) + "'");
  const bool hemisphere = m[2].matched || m[6].matched;
  if (m[1].matched && hemisphere) throw ParseError("both sign and hemisphere in '" + std::string(text) + "'");

  DmsParts parts;
  parts.degrees = std::stol(m[3].str());
  parts.minutes = std::stol(m[4].str());
  if (m[5].matched) {
    parts.seconds_text = m[5].str();
    parts.seconds = std::strtod(parts.seconds_text.c_str(), nullptr);
  }
  if (parts.minutes >= 60) throw ParseError("minutes must be below 60 in '" + std::string(text) + "'");
  if (parts.seconds >= 60.0) throw ParseError("seconds must be below 60 in '" + std::string(text) + "'");
  char hemi = 0;
  if (m[2].matched) hemi = static_cast<char>(std::toupper(m[2].str()[0]));
  if (m[6].matched) hemi = static_cast<char>(std::toupper(m[6].str()[0]));
  parts.negative = m[1].str() == "-" || hemi == 'S' || hemi == 'W';
  return parts;
}

inline std::string render_dms(const DmsParts& p) {
  std::string out = p.negative ? "-" : "";
  out += std::to_string(p.degrees) + "°" + std::to_string(p.minutes) + "'";
  if (!p.seconds_text.empty()) out += p.seconds_text + "\"";
  return out;
}

}  // namespace detail

// Decimal degrees from D°M'S(.s)" text with optional sign or hemisphere.
inline double parse_dms(std::string_view text) { return detail::parse_dms_parts(text).decimal(); }

// Canonical DMS rendering: seconds rounded to `decimals` places, trailing
// zeros dropped, negative values carry a leading '-'.
inline std::string format_dms(double degrees, int decimals = 4) {
  if (!std::isfinite(degrees)) throw Error("format_dms: non-finite value");
  decimals = std::clamp(decimals, 0, 6);
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const bool negative = degrees < 0.0;
  const auto total = static_cast<std::int64_t>(std::llround(std::fabs(degrees) * 3600.0 * static_cast<double>(scale)));
  const std::int64_t per_degree = 3600 * scale;
  const std::int64_t per_minute = 60 * scale;
  const std::int64_t d = total / per_degree;
  const std::int64_t m = (total % per_degree) / per_minute;
  const std::int64_t sec_units = total % per_minute;

  std::string sec = std::to_string(sec_units / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(sec_units % scale);
    frac.insert(frac.begin(), static_cast<std::size_t>(decimals) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) sec += "." + frac;
  }
  std::string out = (negative && total != 0) ? "-" : "";
  out += std::to_string(d) + "°" + std::to_string(m) + "'" + sec + "\"";
  return out;
}

// A latitude/longitude given either as DMS or as decimal degrees.
struct Coordinate {
  double degrees = 0.0;
  bool was_dms = false;
  std::string canonical;
};

inline std::optional<Coordinate> parse_coordinate(std::string_view text) {
  try {
    const auto parts = detail::parse_dms_parts(text);
    return Coordinate{parts.decimal(), true, detail::render_dms(parts)};
  } catch (const ParseError&) {
  }
  static const std::regex kDecimal(R"(^([+-])?([NSEWnsew])?(\d+(?:\.\d+)?|\.\d+)(?:°)?([NSEWnsew])?$)");
  const std::string cleaned = detail::remove_spaces(unify_glyphs(text));
  std::smatch m;
  if (!std::regex_match(cleaned, m, kDecimal)) return std::nullopt;
  if (m[2].matched && m[4].matched) return std::nullopt;
  const bool hemisphere = m[2].matched || m[4].matched;
  if (m[1].matched && hemisphere) return std::nullopt;
  char hemi = 0;
  if (m[2].matched) hemi = static_cast<char>(std::toupper(m[2].str()[0]));
  if (m[4].matched) hemi = static_cast<char>(std::toupper(m[4].str()[0]));
  const bool negative = m[1].str() == "-" || hemi == 'S' || hemi == 'W';
  std::string digits = m[3].str();
  if (digits.front() == '.') digits.insert(digits.begin(), '0');
  Coordinate c;
  c.canonical = (negative ? "-" : "") + digits;
  c.degrees = std::strtod(c.canonical.c_str(), nullptr);
  return c;
}

// ---------------------------------------------------------------------------
// Filter chains

struct FilterRule {
  std::string name;  // nonempty | non_numeric | dms_format | range
  std::optional<double> min;
  std::optional<double> max;

  bool operator==(const FilterRule&) const = default;
};

struct FilterChain {
  FieldKind kind = FieldKind::FreeText;
  std::vector<FilterRule> rules;
};

struct FilterOutcome {
  bool passed = true;
  std::string rule;    // first failing rule, empty on pass
  std::string detail;  // human-readable reason

  static FilterOutcome pass() { return {}; }
  static FilterOutcome fail(std::string rule, std::string detail) { return {false, std::move(rule), std::move(detail)}; }
};

inline bool is_known_rule(std::string_view name) {
  return name == "nonempty" || name == "non_numeric" || name == "dms_format" || name == "range";
}

inline FilterRule make_range_rule(FieldKind kind) {
  switch (kind) {
    case FieldKind::Latitude: return {"range", -90.0, 90.0};
    case FieldKind::Longitude: return {"range", -180.0, 180.0};
    case FieldKind::Depth: return {"range", 0.0, std::nullopt};
    default: return {"range", std::nullopt, std::nullopt};
  }
}

inline FilterChain default_chain(FieldKind kind) {
  FilterChain chain{kind, {{"nonempty", {}, {}}}};
  switch (kind) {
    case FieldKind::Numeric: chain.rules.push_back({"non_numeric", {}, {}}); break;
    case FieldKind::Depth:
      chain.rules.push_back({"non_numeric", {}, {}});
      chain.rules.push_back(make_range_rule(kind));
      break;
    case FieldKind::Latitude:
    case FieldKind::Longitude:
      chain.rules.push_back({"dms_format", {}, {}});
      chain.rules.push_back(make_range_rule(kind));
      break;
    case FieldKind::FreeText: break;
  }
  return chain;
}

inline FilterOutcome apply_rule(std::string_view answer, const FilterRule& rule, FieldKind kind) {
  if (rule.name == "nonempty") {
    if (trim(answer).empty()) return FilterOutcome::fail(rule.name, "empty answer");
    return FilterOutcome::pass();
  }
  if (rule.name == "non_numeric") {
    if (!parse_number_with_unit(answer)) return FilterOutcome::fail(rule.name, "non-numeric");
    return FilterOutcome::pass();
  }
  if (rule.name == "dms_format") {
    if (!parse_coordinate(answer)) return FilterOutcome::fail(rule.name, "not a coordinate");
    return FilterOutcome::pass();
  }
  if (rule.name == "range") {
    std::optional<double> value;
    if (is_coordinate(kind)) {
      if (auto c = parse_coordinate(answer)) value = c->degrees;
    } else if (auto n = parse_number_with_unit(answer)) {
      value = n->value;
    }
    if (!value) return FilterOutcome::fail(rule.name, "no value to range-check");
    if ((rule.min && *value < *rule.min) || (rule.max && *value > *rule.max))
      return FilterOutcome::fail(rule.name, "out of range");
    return FilterOutcome::pass();
  }
  throw ConfigError("unknown filter rule '" + rule.name + "'");
}

// Short-circuits on the first failing rule.
inline FilterOutcome apply_filters(std::string_view answer, const FilterChain& chain) {
  for (const auto& rule : chain.rules) {
    auto outcome = apply_rule(answer, rule, chain.kind);
    if (!outcome.passed) return outcome;
  }
  return FilterOutcome::pass();
}

// ---------------------------------------------------------------------------
// Normalization and answer comparison

struct NormalizedValue {
  FieldKind kind = FieldKind::FreeText;
  std::string canonical_text;
  std::optional<double> numeric_value;
  std::string unit;

  bool operator==(const NormalizedValue&) const = default;
};

inline NormalizedValue normalize(std::string_view answer, FieldKind kind) {
  NormalizedValue out{kind, {}, std::nullopt, {}};
  switch (kind) {
    case FieldKind::Latitude:
    case FieldKind::Longitude: {
      const auto c = parse_coordinate(answer);
      if (!c) throw NormalizationError("cannot parse coordinate '" + std::string(answer) + "'");
      const double limit = kind == FieldKind::Latitude ? 90.0 : 180.0;
      if (std::fabs(c->degrees) > limit) throw NormalizationError("coordinate out of range: '" + std::string(answer) + "'");
      out.canonical_text = c->canonical;
      out.numeric_value = c->degrees;
      return out;
    }
    case FieldKind::Numeric:
    case FieldKind::Depth: {
      const auto n = parse_number_with_unit(answer);
      if (!n) throw NormalizationError("cannot parse number '" + std::string(answer) + "'");
      out.canonical_text = n->unit.empty() ? n->number_text : n->number_text + " " + n->unit;
      out.numeric_value = n->value;
      out.unit = n->unit;
      return out;
    }
    case FieldKind::FreeText:
      out.canonical_text = detail::collapse_spaces(unify_glyphs(answer));
      return out;
  }
  return out;
}

inline constexpr double kCoordinateTolerance = 1e-6;

// Evaluation match rule. Coordinates: |a-b| <= 1e-6 degrees. Numbers: exact
// value equality, units compared case-insensitively only when both sides
// carry one. Free text: canonical text equality. Unparseable prediction is a
// mismatch.
inline bool answers_match(std::string_view predicted, std::string_view truth, FieldKind kind) {
  NormalizedValue p;
  NormalizedValue t;
  try {
    p = normalize(predicted, kind);
    t = normalize(truth, kind);
  } catch (const NormalizationError&) {
    return false;
  }
  switch (kind) {
    case FieldKind::Latitude:
    case FieldKind::Longitude: return std::fabs(*p.numeric_value - *t.numeric_value) <= kCoordinateTolerance + 1e-12;
    case FieldKind::Numeric:
    case FieldKind::Depth:
      if (*p.numeric_value != *t.numeric_value) return false;
      return p.unit.empty() || t.unit.empty() || p.unit == t.unit;
    case FieldKind::FreeText: return p.canonical_text == t.canonical_text;
  }
  return false;
}

}  // namespace patchfinder
