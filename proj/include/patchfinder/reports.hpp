#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchfinder/evaluation.hpp"
#include "patchfinder/selection.hpp"
#include "patchfinder/size_optimizer.hpp"

namespace patchfinder {

// pc values in text tables: 12 significant digits, empty when missing.
inline std::string format_pc(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

inline std::string format_fraction(double s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", s);
  return buf;
}

namespace detail {

inline nlohmann::json optional_number(std::optional<double> v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Trace document: grid geometry plus one record per patch.
inline nlohmann::json selection_to_json(const SelectionResult& r) {
  nlohmann::json patches = nlohmann::json::array();
  for (const auto& p : r.trace) {
    const auto& rect = r.grid.patches.at(static_cast<std::size_t>(p.patch_index));
    patches.push_back({{"index", p.patch_index},
                       {"x0", rect.x0},
                       {"y0", rect.y0},
                       {"w", rect.w},
                       {"h", rect.h},
                       {"pc", detail::optional_number(p.pc)},
                       {"answer", p.answer_text},
                       {"filtered", p.filtered},
                       {"reason", p.filter_reason ? nlohmann::json(*p.filter_reason) : nlohmann::json(nullptr)},
                       {"fingerprint", p.fingerprint}});
  }
  return {{"grid",
           {{"width", r.grid.dims.width},
            {"height", r.grid.dims.height},
            {"area_fraction", r.grid.spec.area_fraction},
            {"aspect_mode", to_string(r.grid.spec.aspect_mode)},
            {"overlap", r.grid.spec.overlap},
            {"n_patches", r.grid.patches.size()}}},
          {"winner", r.winner ? nlohmann::json(r.winner->patch_index) : nlohmann::json(nullptr)},
          {"answer", r.winner ? nlohmann::json(r.winner->answer_text) : nlohmann::json(nullptr)},
          {"pc", r.winner ? detail::optional_number(r.winner->pc) : nlohmann::json(nullptr)},
          {"aborted_reason", r.aborted_reason ? nlohmann::json(*r.aborted_reason) : nlohmann::json(nullptr)},
          {"patches", std::move(patches)}};
}

// Heatmap table from a trace document: one row per patch.
inline std::string heatmap_csv(const nlohmann::json& trace) {
  if (!trace.contains("patches") || !trace["patches"].is_array() || trace["patches"].empty())
    throw ConfigError("trace has no patches");
  std::ostringstream out;
  out << "index,x0,y0,w,h,pc,filtered,reason\n";
  for (const auto& p : trace["patches"]) {
    const std::optional<double> pc = p["pc"].is_number() ? std::optional<double>(p["pc"].get<double>()) : std::nullopt;
    out << p.at("index").get<int>() << ',' << p.at("x0").get<int>() << ',' << p.at("y0").get<int>() << ','
        << p.at("w").get<int>() << ',' << p.at("h").get<int>() << ',' << format_pc(pc) << ','
        << (p.at("filtered").get<bool>() ? 1 : 0) << ','
        << detail::csv_field(p["reason"].is_string() ? p["reason"].get<std::string>() : std::string()) << '\n';
  }
  return out.str();
}

inline std::string heatmap_csv(const SelectionResult& r) { return heatmap_csv(selection_to_json(r)); }

// One JSON object per line, in manifest order.
inline std::string predictions_jsonl(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    nlohmann::json j{{"document_id", p.document_id},
                     {"field", p.field},
                     {"group", p.group},
                     {"answer", p.answer},
                     {"pc", detail::optional_number(p.pc)},
                     {"status", p.status},
                     {"verdict", p.correct ? nlohmann::json(*p.correct ? "correct" : "incorrect") : nlohmann::json(nullptr)}};
    if (p.detail) j["detail"] = *p.detail;
    out += j.dump() + "\n";
  }
  return out;
}

inline nlohmann::json tally_json(const Tally& t) {
  return {{"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}};
}

inline nlohmann::json eval_report_json(const EvalReport& r, const std::vector<Prediction>& preds) {
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [k, t] : r.per_field) fields[k] = tally_json(t);
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [k, t] : r.per_group) groups[k] = tally_json(t);
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& p : preds) {
    if (!p.correct) continue;
    verdicts.push_back({{"document_id", p.document_id},
                        {"field", p.field},
                        {"correct", *p.correct},
                        {"pc", detail::optional_number(p.pc)}});
  }
  return {{"overall", tally_json(r.overall)},
          {"per_field", std::move(fields)},
          {"per_group", std::move(groups)},
          {"pc_units", "nats"},
          {"match_rules",
           {{"coordinates", "numeric, |a-b| <= 1e-6 degrees"},
            {"numeric", "exact value; units case-insensitive when both present"},
            {"free-text", "canonical text equality"}}},
          {"verdicts", std::move(verdicts)}};
}

inline std::string sweep_summary_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "area_fraction,mean_pc,std_pc,n,failed\n";
  for (const auto& row : r.rows)
    out << format_fraction(row.fraction) << ',' << format_pc(row.mean_pc) << ',' << format_pc(row.std_pc) << ','
        << row.n << ',' << row.failed << '\n';
  return out.str();
}

inline std::string sweep_groups_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "group,area_fraction,mean_pc,std_pc,n,failed\n";
  for (const auto& [group, rows] : r.group_rows)
    for (const auto& row : rows)
      out << detail::csv_field(group) << ',' << format_fraction(row.fraction) << ',' << format_pc(row.mean_pc) << ','
          << format_pc(row.std_pc) << ',' << row.n << ',' << row.failed << '\n';
  return out.str();
}

inline std::string sweep_raw_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "area_fraction,document_id,field,group,pc\n";
  for (const auto& p : r.points)
    out << format_fraction(p.fraction) << ',' << detail::csv_field(p.document_id) << ',' << detail::csv_field(p.field)
        << ',' << detail::csv_field(p.group) << ',' << format_pc(p.pc) << '\n';
  return out.str();
}

}  // namespace patchfinder
