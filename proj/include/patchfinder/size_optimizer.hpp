#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchfinder/errors.hpp"
#include "patchfinder/selection.hpp"

namespace patchfinder {

struct SweepConfig {
  std::vector<double> candidate_fractions{0.02, 0.05, 0.10, 0.15, 0.167, 0.20, 0.23, 0.25, 0.30, 0.40, 0.50};
  double plateau_delta = 0.05;  // nats
  double max_std = 0.5;         // nats
  AspectMode aspect_mode = AspectMode::Square;
  double overlap = 0.5;

  void validate() const {
    if (candidate_fractions.empty()) throw ConfigError("sweep needs at least one candidate fraction");
    for (std::size_t i = 0; i < candidate_fractions.size(); ++i) {
      const double s = candidate_fractions[i];
      if (!(s > 0.0 && s <= 1.0)) throw ConfigError("candidate fractions must lie in (0, 1]");
      if (i > 0 && !(s > candidate_fractions[i - 1])) throw ConfigError("candidate fractions must be strictly increasing");
    }
    if (plateau_delta < 0.0 || max_std < 0.0) throw ConfigError("plateau_delta and max_std must be >= 0");
    GridSpec{0.5, aspect_mode, overlap}.validate();
  }
};

// One (document, field) unit of the development set.
struct DevItem {
  std::string document_id;
  std::string group;
  const RasterImage* image = nullptr;
  ExtractionTask task;
};

struct SizeStats {
  double fraction = 0.0;
  double mean_pc = std::numeric_limits<double>::quiet_NaN();
  double std_pc = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;       // items that produced a winner
  std::size_t failed = 0;  // items with no valid patch

  bool has_data() const { return n > 0; }
};

struct SweepPoint {
  double fraction = 0.0;
  std::string document_id;
  std::string field;
  std::string group;
  std::optional<double> pc;  // empty when no patch survived filtering
};

struct SweepReport {
  std::vector<SizeStats> rows;  // one per candidate, ascending fraction
  std::map<std::string, std::vector<SizeStats>> group_rows;
  std::vector<SweepPoint> points;
  double chosen_fraction = 0.0;
};

// Population mean and standard deviation.
inline SizeStats summarize(double fraction, const std::vector<double>& pcs, std::size_t failed) {
  SizeStats s;
  s.fraction = fraction;
  s.n = pcs.size();
  s.failed = failed;
  if (pcs.empty()) return s;
  double sum = 0.0;
  for (double v : pcs) sum += v;
  s.mean_pc = sum / static_cast<double>(pcs.size());
  double ss = 0.0;
  for (double v : pcs) ss += (v - s.mean_pc) * (v - s.mean_pc);
  s.std_pc = std::sqrt(ss / static_cast<double>(pcs.size()));
  return s;
}

// Largest size whose mean is within plateau_delta of the best mean and whose
// spread is at most max_std. With no such size, the best mean wins (larger
// size on ties). Rows without data never qualify; if no row has data the
// candidate closest to 0.25 is returned.
inline double choose_size(const std::vector<SizeStats>& rows, double plateau_delta, double max_std) {
  if (rows.empty()) throw ConfigError("choose_size: empty report");
  constexpr double kSlack = 1e-12;
  const SizeStats* best = nullptr;
  for (const auto& r : rows) {
    if (!r.has_data()) continue;
    if (!best || r.mean_pc > best->mean_pc || (r.mean_pc == best->mean_pc && r.fraction > best->fraction)) best = &r;
  }
  if (!best) {
    return std::min_element(rows.begin(), rows.end(), [](const SizeStats& a, const SizeStats& b) {
             return std::fabs(a.fraction - 0.25) < std::fabs(b.fraction - 0.25);
           })->fraction;
  }
  std::optional<double> chosen;
  for (const auto& r : rows) {
    if (!r.has_data()) continue;
    if (r.mean_pc + kSlack >= best->mean_pc - plateau_delta && r.std_pc <= max_std + kSlack) {
      if (!chosen || r.fraction > *chosen) chosen = r.fraction;
    }
  }
  return chosen.value_or(best->fraction);
}

inline double choose_size(const SweepReport& report, double plateau_delta, double max_std) {
  return choose_size(report.rows, plateau_delta, max_std);
}

// Runs PatchFinder over the dev set at every candidate size and records the
// winner patch's pc per item. Sizes run in order; items run one after another
// and patches fan out inside each run.
inline SweepReport sweep(const SweepConfig& config, const std::vector<DevItem>& dev_set, const Backend& backend) {
  config.validate();
  if (dev_set.empty()) throw ConfigError("sweep: development set is empty");

  SweepReport report;
  for (double s : config.candidate_fractions) {
    const GridSpec spec{s, config.aspect_mode, config.overlap};
    std::vector<double> pooled;
    std::size_t pooled_failed = 0;
    std::map<std::string, std::pair<std::vector<double>, std::size_t>> by_group;

    for (const auto& item : dev_set) {
      if (!item.image) throw ConfigError("dev item '" + item.document_id + "' has no image");
      const auto result = run_patchfinder(*item.image, item.task, spec, backend);
      SweepPoint point{s, item.document_id, item.task.field_name, item.group, std::nullopt};
      auto& group = by_group[item.group];
      if (result.winner) {
        point.pc = *result.winner->pc;
        pooled.push_back(*point.pc);
        group.first.push_back(*point.pc);
      } else {
        ++pooled_failed;
        ++group.second;
      }
      report.points.push_back(std::move(point));
    }
    report.rows.push_back(summarize(s, pooled, pooled_failed));
    for (const auto& [name, data] : by_group) report.group_rows[name].push_back(summarize(s, data.first, data.second));
  }
  report.chosen_fraction = choose_size(report, config.plateau_delta, config.max_std);
  return report;
}

}  // namespace patchfinder
