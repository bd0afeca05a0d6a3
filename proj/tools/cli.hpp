#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "patchfinder/patchfinder.hpp"

namespace patchfinder::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2, kNoValidPatch = 3 };

struct GridFlags {
  std::optional<double> area_fraction;
  std::optional<std::string> aspect_mode;
  std::optional<double> overlap;
  std::optional<int> parallelism;
};

inline void add_grid_flags(CLI::App* cmd, GridFlags& f) {
  cmd->add_option("--area-fraction,-s", f.area_fraction, "patch area as a fraction of the image, (0, 1]");
  cmd->add_option("--aspect-mode", f.aspect_mode, "square | image-proportional | full-width-strip");
  cmd->add_option("--overlap", f.overlap, "fraction of patch extent shared by neighbours, [0, 1)");
  cmd->add_option("--parallelism", f.parallelism, "max concurrent backend requests");
}

// Flags win over file values.
inline void apply_grid_flags(RunConfig& cfg, const GridFlags& f) {
  if (f.area_fraction) cfg.grid.area_fraction = *f.area_fraction;
  if (f.aspect_mode) cfg.grid.aspect_mode = parse_aspect_mode(*f.aspect_mode);
  if (f.overlap) cfg.grid.overlap = *f.overlap;
  if (f.parallelism) {
    if (*f.parallelism < 1) throw ConfigError("--parallelism must be >= 1");
    cfg.backend.remote.parallelism = *f.parallelism;
  }
  cfg.grid.validate();
  cfg.sweep.aspect_mode = cfg.grid.aspect_mode;
  cfg.sweep.overlap = cfg.grid.overlap;
}

inline RunConfig load_config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

inline std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> ids;
  std::stringstream ss(csv);
  for (std::string id; std::getline(ss, id, ',');)
    if (!trim(id).empty()) ids.emplace_back(trim(id));
  return ids;
}

// Loads every (document, field) of a manifest into memory for a sweep.
struct LoadedDevSet {
  std::vector<RasterImage> images;
  std::vector<DevItem> items;
};

inline LoadedDevSet load_dev_set(const DatasetManifest& m, const RunConfig& cfg) {
  validate_manifest(m, cfg);
  LoadedDevSet set;
  set.images.reserve(m.documents.size());
  for (const auto& d : m.documents) set.images.push_back(load_image(d.image));
  for (std::size_t i = 0; i < m.documents.size(); ++i) {
    const auto& d = m.documents[i];
    for (const auto& f : d.fields) set.items.push_back(DevItem{d.document_id, d.group, &set.images[i], make_task(d, f, cfg)});
  }
  return set;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"patchfinder: confidence-driven patch extraction from document images"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config,-c", config_path, "run config (JSON)");

  // extract
  auto* extract = app.add_subcommand("extract", "extract one field from one image");
  std::string image_path, field_name, field_kind = "free-text", prompt_name, trace_path;
  GridFlags grid_flags;
  extract->add_option("--image,-i", image_path, "input image (PNG/JPEG/TIFF)")->required();
  extract->add_option("--field,-f", field_name, "field name")->required();
  extract->add_option("--kind,-k", field_kind, "numeric | latitude | longitude | depth | free-text");
  extract->add_option("--prompt,-p", prompt_name, "prompt template name");
  extract->add_option("--trace,-t", trace_path, "write the per-patch trace (JSON) here");
  add_grid_flags(extract, grid_flags);

  // batch
  auto* batch = app.add_subcommand("batch", "run a manifest and score it against ground truth");
  std::string manifest_path, predictions_path = "predictions.jsonl", report_path = "report.json", ids_csv;
  batch->add_option("--manifest,-m", manifest_path, "dataset manifest (JSON)")->required();
  batch->add_option("--out,-o", predictions_path, "predictions file (JSON lines)");
  batch->add_option("--report,-r", report_path, "evaluation report (JSON)");
  batch->add_option("--ids", ids_csv, "comma-separated document ids to keep");
  add_grid_flags(batch, grid_flags);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "patch size sweep over a development manifest");
  std::string out_dir = "sweep";
  std::vector<double> candidates;
  std::optional<double> plateau_delta, max_std;
  sweep_cmd->add_option("--manifest,-m", manifest_path, "development manifest (JSON)")->required();
  sweep_cmd->add_option("--out-dir,-o", out_dir, "directory for sweep tables");
  sweep_cmd->add_option("--candidates", candidates, "candidate area fractions")->delimiter(',');
  sweep_cmd->add_option("--plateau-delta", plateau_delta, "nats below the best mean still on the plateau");
  sweep_cmd->add_option("--max-std", max_std, "largest pc standard deviation allowed on the plateau");
  sweep_cmd->add_option("--ids", ids_csv, "comma-separated document ids to keep");
  add_grid_flags(sweep_cmd, grid_flags);

  // noise
  auto* noise_cmd = app.add_subcommand("noise", "add brightening Gaussian noise to an image");
  std::string noise_out;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  noise_cmd->add_option("--image,-i", image_path, "input image")->required();
  noise_cmd->add_option("--out,-o", noise_out, "output image")->required();
  noise_cmd->add_option("--sigma", sigma, "noise standard deviation on the [0,1] scale");
  noise_cmd->add_option("--seed", seed, "RNG seed");

  // heatmap
  auto* heatmap_cmd = app.add_subcommand("heatmap", "turn a trace file into a per-patch pc table");
  std::string heatmap_out = "heatmap.csv";
  heatmap_cmd->add_option("--trace,-t", trace_path, "trace JSON from `extract --trace`")->required();
  heatmap_cmd->add_option("--out,-o", heatmap_out, "output CSV");

  // health
  auto* health_cmd = app.add_subcommand("health", "probe the configured backend");

  // serve-mock
  auto* serve_cmd = app.add_subcommand("serve-mock", "serve a mock script over the scoring wire protocol");
  std::string script_path, host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--script", script_path, "mock script (JSON)")->required();
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*noise_cmd) {
      RunConfig cfg = load_config_or_default(config_path);
      const auto img = load_image(image_path);
      save_image(inject_noise(img, sigma.value_or(cfg.noise.sigma), seed.value_or(cfg.noise.seed)), noise_out);
      return kOk;
    }
    if (*heatmap_cmd) {
      std::ifstream in(trace_path);
      if (!in) throw ConfigError("cannot open trace " + trace_path);
      nlohmann::json trace;
      try {
        in >> trace;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed trace: ") + e.what());
      }
      write_file(heatmap_out, heatmap_csv(trace));
      return kOk;
    }
    if (*serve_cmd) {
      MockBackend backend(MockScript::load(script_path));
      httplib::Server server;
      install_wire_routes(server, backend);
      err << "serving mock on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
      return kOk;
    }

    RunConfig cfg = load_config_or_default(config_path);
    apply_grid_flags(cfg, grid_flags);
    auto backend = make_backend(cfg.backend);

    if (*health_cmd) {
      const auto h = backend->healthcheck();
      out << (h.ok ? "ok" : "unavailable: " + h.detail) << "\n";
      return h.ok ? kOk : kRuntime;
    }

    if (*extract) {
      if (!std::filesystem::exists(image_path)) throw ConfigError("image not found: " + image_path);
      const auto img = load_image(image_path);
      DocumentRecord doc{std::filesystem::path(image_path).stem().string(), image_path, "default", {}};
      FieldRecord field{field_name, parse_field_kind(field_kind), prompt_name, std::nullopt};
      if (!prompt_name.empty()) cfg.prompt(prompt_name);
      const auto result = run_patchfinder(img, make_task(doc, field, cfg), cfg.grid, *backend);
      if (!trace_path.empty()) write_file(trace_path, selection_to_json(result).dump(2) + "\n");
      if (!result.winner) {
        err << "no valid patch: " << result.aborted_reason.value_or("") << "\n";
        return kNoValidPatch;
      }
      out << result.winner->answer_text << "\n";
      err << "patch " << result.winner->patch_index << " of " << result.grid.size() << ", pc "
          << format_pc(result.winner->pc) << " nats\n";
      return kOk;
    }

    DatasetManifest manifest = load_manifest(manifest_path);
    if (!ids_csv.empty()) manifest = split_manifest(manifest, split_ids(ids_csv));

    if (*batch) {
      const auto result = run_batch(manifest, cfg, cfg.grid, *backend);
      write_file(predictions_path, predictions_jsonl(result.predictions));
      if (result.report) {
        write_file(report_path, eval_report_json(*result.report, result.predictions).dump(2) + "\n");
        out << "accuracy " << result.report->overall.correct << "/" << result.report->overall.total << " = "
            << result.report->overall.accuracy() << "\n";
      } else {
        out << "predictions written; no ground truth, no accuracy\n";
      }
      return kOk;
    }

    if (*sweep_cmd) {
      if (!candidates.empty()) cfg.sweep.candidate_fractions = candidates;
      if (plateau_delta) cfg.sweep.plateau_delta = *plateau_delta;
      if (max_std) cfg.sweep.max_std = *max_std;
      const auto dev = load_dev_set(manifest, cfg);
      const auto report = sweep(cfg.sweep, dev.items, *backend);
      const std::filesystem::path dir(out_dir);
      write_file(dir / "sweep_summary.csv", sweep_summary_csv(report));
      write_file(dir / "sweep_groups.csv", sweep_groups_csv(report));
      write_file(dir / "sweep_raw.csv", sweep_raw_csv(report));
      out << "chosen area_fraction " << format_fraction(report.chosen_fraction) << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace patchfinder::cli
