#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "patchfinder/backend.hpp"

namespace patchfinder {

struct RemoteOptions {
  std::string base_url = "http://127.0.0.1:8080";
  std::string score_path = "/v1/patch/score";
  std::string health_path = "/health";
  std::string bearer_token;
  std::chrono::milliseconds timeout{120'000};
  int retries = 2;
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(1000), std::chrono::milliseconds(4000)};
  int parallelism = 4;

  // PATCHFINDER_BACKEND_URL and PATCHFINDER_BACKEND_TOKEN override the
  // corresponding fields when set.
  void apply_env() {
    if (const char* url = std::getenv("PATCHFINDER_BACKEND_URL"); url && *url) base_url = url;
    if (const char* tok = std::getenv("PATCHFINDER_BACKEND_TOKEN"); tok && *tok) bearer_token = tok;
  }
};

// HTTP client for the scoring wire protocol. Each call opens its own
// connection, so the client is freely shareable across threads; a counting
// semaphore caps requests in flight at `parallelism`.
class RemoteBackend final : public Backend {
 public:
  static constexpr std::ptrdiff_t kMaxParallelism = 256;

  explicit RemoteBackend(RemoteOptions options)
      : options_(std::move(options)),
        slots_(std::make_unique<std::counting_semaphore<kMaxParallelism>>(
            std::clamp<std::ptrdiff_t>(options_.parallelism, 1, kMaxParallelism))) {
    if (options_.retries < 0) throw ConfigError("retries must be >= 0");
    if (options_.timeout.count() <= 0) throw ConfigError("timeout must be positive");
  }

  InferenceResponse score_patch(const InferenceRequest& req) const override {
    validate_request(req);
    const std::string body = request_to_json(req).dump();
    for (int attempt = 0;; ++attempt) {
      try {
        return post_once(body);
      } catch (const TransportError&) {
        if (attempt >= options_.retries) throw;
        std::this_thread::sleep_for(backoff_for(attempt));
      }
    }
  }

  HealthStatus healthcheck() const override {
    auto cli = make_client();
    auto res = cli.Get(options_.health_path, headers());
    if (!res) return HealthStatus::unavailable("transport: " + httplib::to_string(res.error()));
    if (res->status != 200)
      return HealthStatus::unavailable("protocol: " + options_.health_path + " answered HTTP " + std::to_string(res->status));
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("status", std::string()) != "ok")
      return HealthStatus::unavailable("protocol: unexpected health body");
    return HealthStatus::healthy();
  }

  int parallelism() const override { return std::max(1, options_.parallelism); }
  const RemoteOptions& options() const { return options_; }

 private:
  class SlotGuard {
   public:
    explicit SlotGuard(std::counting_semaphore<kMaxParallelism>& s) : s_(s) { s_.acquire(); }
    ~SlotGuard() { s_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

   private:
    std::counting_semaphore<kMaxParallelism>& s_;
  };

  httplib::Client make_client() const {
    httplib::Client cli(options_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!options_.bearer_token.empty()) h.emplace("Authorization", "Bearer " + options_.bearer_token);
    return h;
  }

  std::chrono::milliseconds backoff_for(int attempt) const {
    if (options_.backoff.empty()) return std::chrono::milliseconds(0);
    return options_.backoff[std::min<std::size_t>(static_cast<std::size_t>(attempt), options_.backoff.size() - 1)];
  }

  InferenceResponse post_once(const std::string& body) const {
    SlotGuard slot(*slots_);
    auto cli = make_client();
    auto res = cli.Post(options_.score_path, headers(), body, "application/json");
    if (!res) throw TransportError("transport failure: " + httplib::to_string(res.error()));
    if (res->status >= 500 || res->status == 429 || res->status == 408)
      throw TransportError("server answered HTTP " + std::to_string(res->status));
    if (res->status == 404) throw ProtocolError("endpoint " + options_.score_path + " not found");
    if (res->status != 200) throw BackendRefusal("backend refused request: HTTP " + std::to_string(res->status));
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) throw ProtocolError("response body is not JSON");
    return response_from_json(doc);
  }

  RemoteOptions options_;
  std::unique_ptr<std::counting_semaphore<kMaxParallelism>> slots_;
};

// Serves a Backend over the wire protocol. Used by the `serve-mock`
// subcommand and by the end-to-end tests of the remote client.
inline void install_wire_routes(httplib::Server& server, const Backend& backend,
                                const std::string& score_path = "/v1/patch/score",
                                const std::string& health_path = "/health") {
  server.Get(health_path, [&backend](const httplib::Request&, httplib::Response& res) {
    const auto h = backend.healthcheck();
    res.status = h.ok ? 200 : 503;
    res.set_content(nlohmann::json{{"status", h.ok ? "ok" : "unavailable"}, {"detail", h.detail}}.dump(),
                    "application/json");
  });
  server.Post(score_path, [&backend](const httplib::Request& req, httplib::Response& res) {
    auto doc = nlohmann::json::parse(req.body, nullptr, false);
    try {
      if (doc.is_discarded()) throw ProtocolError("request body is not JSON");
      const auto inference = request_from_json(doc);
      res.set_content(response_to_json(backend.score_patch(inference)).dump(), "application/json");
    } catch (const ProtocolError& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    } catch (const Error& e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

}  // namespace patchfinder
