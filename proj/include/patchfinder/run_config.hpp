#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "patchfinder/filters.hpp"
#include "patchfinder/mock_backend.hpp"
#include "patchfinder/patch_grid.hpp"
#include "patchfinder/prompts.hpp"
#include "patchfinder/remote_backend.hpp"
#include "patchfinder/size_optimizer.hpp"

namespace patchfinder {

enum class BackendKind { Mock, Remote };

struct BackendConfig {
  BackendKind kind = BackendKind::Remote;
  std::filesystem::path mock_script;
  RemoteOptions remote;
  int max_tokens = 64;
};

struct NoiseConfig {
  double sigma = 0.2;
  std::uint64_t seed = 0;
};

// Everything a run needs besides the manifest. Loaded from JSON; relative
// paths resolve against the config file's directory.
struct RunConfig {
  GridSpec grid;
  BackendConfig backend;
  bool include_stop_token = false;
  std::map<std::string, PromptTemplate, std::less<>> prompts = builtin_prompts();
  std::map<std::string, std::vector<FilterRule>, std::less<>> field_filters;
  SweepConfig sweep;
  NoiseConfig noise;

  const PromptTemplate& prompt(std::string_view name) const {
    auto it = prompts.find(name);
    if (it == prompts.end()) throw ConfigError("unknown prompt template '" + std::string(name) + "'");
    return it->second;
  }

  FilterChain chain_for(std::string_view field_name, FieldKind kind) const {
    if (auto it = field_filters.find(field_name); it != field_filters.end()) return FilterChain{kind, it->second};
    return default_chain(kind);
  }
};

inline FilterRule parse_filter_rule(const nlohmann::json& j, FieldKind kind) {
  FilterRule rule;
  if (j.is_string()) {
    rule.name = j.get<std::string>();
    if (rule.name == "range") rule = make_range_rule(kind);
  } else if (j.is_object()) {
    rule.name = j.at("rule").get<std::string>();
    if (rule.name == "range" && !j.contains("min") && !j.contains("max")) rule = make_range_rule(kind);
    if (j.contains("min")) rule.min = j["min"].get<double>();
    if (j.contains("max")) rule.max = j["max"].get<double>();
  } else {
    throw ConfigError("filter rule must be a name or an object");
  }
  if (!is_known_rule(rule.name)) throw ConfigError("unknown filter rule '" + rule.name + "'");
  return rule;
}

namespace detail {

inline std::chrono::milliseconds seconds_to_ms(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("durations must be finite and >= 0");
  return std::chrono::milliseconds(static_cast<long long>(std::llround(s * 1000.0)));
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  RunConfig cfg;
  try {
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      cfg.grid.area_fraction = g.value("area_fraction", cfg.grid.area_fraction);
      if (g.contains("aspect_mode")) cfg.grid.aspect_mode = parse_aspect_mode(g["aspect_mode"].get<std::string>());
      cfg.grid.overlap = g.value("overlap", cfg.grid.overlap);
      cfg.grid.validate();
    }
    if (doc.contains("backend")) {
      const auto& b = doc["backend"];
      const auto kind = b.value("kind", std::string("remote"));
      if (kind == "mock") {
        cfg.backend.kind = BackendKind::Mock;
      } else if (kind == "remote") {
        cfg.backend.kind = BackendKind::Remote;
      } else {
        throw ConfigError("backend.kind must be 'mock' or 'remote'");
      }
      if (b.contains("mock_script")) {
        std::filesystem::path p = b["mock_script"].get<std::string>();
        cfg.backend.mock_script = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
      auto& r = cfg.backend.remote;
      r.base_url = b.value("base_url", r.base_url);
      r.score_path = b.value("score_path", r.score_path);
      r.health_path = b.value("health_path", r.health_path);
      if (b.contains("timeout_s")) r.timeout = detail::seconds_to_ms(b["timeout_s"].get<double>());
      r.retries = b.value("retries", r.retries);
      if (b.contains("backoff_s")) {
        r.backoff.clear();
        for (const auto& v : b["backoff_s"]) r.backoff.push_back(detail::seconds_to_ms(v.get<double>()));
      }
      r.parallelism = b.value("parallelism", r.parallelism);
      cfg.backend.max_tokens = b.value("max_tokens", cfg.backend.max_tokens);
      if (r.parallelism < 1) throw ConfigError("backend.parallelism must be >= 1");
      if (r.retries < 0) throw ConfigError("backend.retries must be >= 0");
      if (cfg.backend.max_tokens < 1) throw ConfigError("backend.max_tokens must be >= 1");
    }
    cfg.include_stop_token = doc.value("include_stop_token", false);
    if (doc.contains("prompts")) {
      for (const auto& [name, text] : doc["prompts"].items())
        cfg.prompts[name] = PromptTemplate{name, text.get<std::string>()};
    }
    if (doc.contains("filters")) {
      for (const auto& [field, spec] : doc["filters"].items()) {
        const FieldKind kind = spec.is_object() && spec.contains("kind")
                                   ? parse_field_kind(spec["kind"].get<std::string>())
                                   : FieldKind::FreeText;
        const auto& rules = spec.is_object() ? spec.at("rules") : spec;
        std::vector<FilterRule> chain;
        for (const auto& r : rules) chain.push_back(parse_filter_rule(r, kind));
        cfg.field_filters[field] = std::move(chain);
      }
    }
    if (doc.contains("sweep")) {
      const auto& s = doc["sweep"];
      if (s.contains("candidate_fractions"))
        cfg.sweep.candidate_fractions = s["candidate_fractions"].get<std::vector<double>>();
      cfg.sweep.plateau_delta = s.value("plateau_delta", cfg.sweep.plateau_delta);
      cfg.sweep.max_std = s.value("max_std", cfg.sweep.max_std);
    }
    cfg.sweep.aspect_mode = cfg.grid.aspect_mode;
    cfg.sweep.overlap = cfg.grid.overlap;
    cfg.sweep.validate();
    if (doc.contains("noise")) {
      cfg.noise.sigma = doc["noise"].value("sigma", cfg.noise.sigma);
      cfg.noise.seed = doc["noise"].value("seed", cfg.noise.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

inline std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
  if (cfg.kind == BackendKind::Mock) {
    if (cfg.mock_script.empty()) throw ConfigError("mock backend needs backend.mock_script");
    return std::make_unique<MockBackend>(MockScript::load(cfg.mock_script),
                                         MockOptions{cfg.remote.parallelism, std::nullopt, {}});
  }
  RemoteOptions opts = cfg.remote;
  opts.apply_env();
  return std::make_unique<RemoteBackend>(std::move(opts));
}

}  // namespace patchfinder
