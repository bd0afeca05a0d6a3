#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "patchfinder/backend.hpp"

namespace patchfinder {

inline std::string prompt_hash(std::string_view prompt) {
  return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(prompt.data()), prompt.size()));
}

// Scripted responses keyed by patch content fingerprint or patch index, each
// optionally narrowed to one prompt. Lookup order: fingerprint+prompt,
// fingerprint, index+prompt, index, default.
class MockScript {
 public:
  MockScript() = default;
  explicit MockScript(InferenceResponse default_response) : default_(std::move(default_response)) {}

  void set_default(InferenceResponse r) { default_ = std::move(r); }
  const InferenceResponse& default_response() const { return default_; }

  void add_fingerprint(std::string fingerprint, InferenceResponse r, std::optional<std::string> prompt_digest = {}) {
    insert(by_fingerprint_, Key<std::string>{std::move(fingerprint), prompt_digest.value_or("")}, std::move(r));
  }
  void add_index(int patch_index, InferenceResponse r, std::optional<std::string> prompt_digest = {}) {
    insert(by_index_, Key<int>{patch_index, prompt_digest.value_or("")}, std::move(r));
  }

  std::size_t size() const { return by_fingerprint_.size() + by_index_.size(); }

  const InferenceResponse& lookup(const std::string& fingerprint, std::optional<int> patch_index,
                                  const std::string& prompt_digest) const {
    if (auto it = by_fingerprint_.find({fingerprint, prompt_digest}); it != by_fingerprint_.end()) return it->second;
    if (auto it = by_fingerprint_.find({fingerprint, ""}); it != by_fingerprint_.end()) return it->second;
    if (patch_index) {
      if (auto it = by_index_.find({*patch_index, prompt_digest}); it != by_index_.end()) return it->second;
      if (auto it = by_index_.find({*patch_index, ""}); it != by_index_.end()) return it->second;
    }
    return default_;
  }

  // {"default": <response>, "entries": [{"fingerprint"|"patch_index", "prompt"|"prompt_hash"?, "response"}]}
  // where <response> is the wire response document.
  static MockScript from_json(const nlohmann::json& doc) {
    MockScript script;
    try {
      if (doc.contains("default")) script.set_default(response_from_json(doc["default"]));
      for (const auto& e : doc.value("entries", nlohmann::json::array())) {
        std::optional<std::string> digest;
        if (e.contains("prompt")) digest = prompt_hash(e["prompt"].get<std::string>());
        if (e.contains("prompt_hash")) digest = e["prompt_hash"].get<std::string>();
        auto resp = response_from_json(e.at("response"));
        if (e.contains("fingerprint")) {
          script.add_fingerprint(e["fingerprint"].get<std::string>(), std::move(resp), digest);
        } else if (e.contains("patch_index")) {
          script.add_index(e["patch_index"].get<int>(), std::move(resp), digest);
        } else {
          throw ConfigError("mock entry needs a fingerprint or patch_index");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed mock script: ") + e.what());
    } catch (const ProtocolError& e) {
      throw ConfigError(std::string("malformed mock response: ") + e.what());
    }
    return script;
  }

  static MockScript load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock script " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("mock script " + path.string() + ": " + e.what());
    }
    return from_json(doc);
  }

  nlohmann::json to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [k, r] : by_fingerprint_) {
      nlohmann::json e{{"fingerprint", k.key}, {"response", response_to_json(r)}};
      if (!k.prompt.empty()) e["prompt_hash"] = k.prompt;
      entries.push_back(std::move(e));
    }
    for (const auto& [k, r] : by_index_) {
      nlohmann::json e{{"patch_index", k.key}, {"response", response_to_json(r)}};
      if (!k.prompt.empty()) e["prompt_hash"] = k.prompt;
      entries.push_back(std::move(e));
    }
    return {{"default", response_to_json(default_)}, {"entries", std::move(entries)}};
  }

 private:
  template <typename T>
  struct Key {
    T key;
    std::string prompt;
    auto operator<=>(const Key&) const = default;
  };

  template <typename Map, typename K>
  static void insert(Map& map, K key, InferenceResponse r) {
    auto [it, inserted] = map.emplace(std::move(key), r);
    if (!inserted && !(it->second == r)) throw ConfigError("conflicting mock entries for the same key");
  }

  InferenceResponse default_;
  std::map<Key<std::string>, InferenceResponse> by_fingerprint_;
  std::map<Key<int>, InferenceResponse> by_index_;
};

struct MockOptions {
  int parallelism = 4;
  // When set, each call sleeps a pseudo-random duration derived from the
  // request fingerprint and this seed, scrambling completion order.
  std::optional<std::uint64_t> jitter_seed;
  std::chrono::microseconds max_jitter{2000};
};

// Deterministic scripted backend. Immutable after construction.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockScript script, MockOptions options = {})
      : script_(std::move(script)), options_(options) {}

  InferenceResponse score_patch(const InferenceRequest& req) const override {
    validate_request(req);
    const std::string fp = fingerprint(req.image);
    if (options_.jitter_seed && options_.max_jitter.count() > 0) {
      std::this_thread::sleep_for(std::chrono::microseconds(jitter_for(fp)));
    }
    auto resp = script_.lookup(fp, req.patch_index, prompt_hash(req.prompt));
    if (static_cast<int>(resp.sequence.tokens.size()) > req.max_tokens) {
      resp.sequence.tokens.resize(static_cast<std::size_t>(req.max_tokens));
      resp.sequence.finish_reason = FinishReason::Length;
    }
    return resp;
  }

  HealthStatus healthcheck() const override { return HealthStatus::healthy(); }
  int parallelism() const override { return options_.parallelism; }
  const MockScript& script() const { return script_; }

 private:
  std::int64_t jitter_for(const std::string& fp) const {
    // splitmix64 over the first 16 hex digits mixed with the seed
    std::uint64_t z = std::stoull(fp.substr(0, 16), nullptr, 16) ^ *options_.jitter_seed;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<std::int64_t>(z % static_cast<std::uint64_t>(options_.max_jitter.count()));
  }

  MockScript script_;
  MockOptions options_;
};

// Response helper: one token per chunk, each carrying `logprob`.
inline InferenceResponse scripted_response(const std::vector<std::pair<std::string, double>>& tokens,
                                           FinishReason finish = FinishReason::Stop) {
  InferenceResponse r;
  r.sequence.finish_reason = finish;
  std::int64_t id = 1;
  for (const auto& [text, lp] : tokens) r.sequence.tokens.push_back(TokenScore{id++, text, lp, false});
  return r;
}

}  // namespace patchfinder
