#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchfinder/confidence.hpp"
#include "patchfinder/errors.hpp"
#include "patchfinder/image_io.hpp"
#include "patchfinder/raster.hpp"

namespace patchfinder {

// One patch + prompt. Decoding is always greedy; the remote client sends
// temperature 0 and asks for per-token logprobs.
struct InferenceRequest {
  RasterImage image;
  std::string prompt;
  int max_tokens = 64;
  std::optional<int> patch_index;  // routing hint for scripted backends, not sent on the wire
};

struct InferenceResponse {
  ScoredSequence sequence;

  bool operator==(const InferenceResponse&) const = default;
};

struct HealthStatus {
  bool ok = false;
  std::string detail;

  static HealthStatus healthy() { return {true, "ok"}; }
  static HealthStatus unavailable(std::string why) { return {false, std::move(why)}; }
};

// Autoregressive scorer seam. Implementations must be safe to call from many
// threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  // Throws TransportError (retryable), ProtocolError or BackendRefusal.
  virtual InferenceResponse score_patch(const InferenceRequest& req) const = 0;
  virtual HealthStatus healthcheck() const = 0;
  virtual int parallelism() const { return 1; }
};

inline void validate_request(const InferenceRequest& req) {
  if (req.image.empty()) throw FormatError("request image is empty");
  if (trim(req.prompt).empty()) throw ConfigError("prompt must be nonempty");
  if (req.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
}

// ---------------------------------------------------------------------------
// Wire format
//
//   request  {image, image_format:"png", prompt, max_tokens, temperature:0, logprobs:true}
//   response {tokens:[{id, text, logprob, special?}], finish_reason}

inline const std::set<std::string, std::less<>>& default_stop_texts() {
  static const std::set<std::string, std::less<>> kStops{"</s>", "<|end|>", "<|endoftext|>", "<eos>", "<|im_end|>"};
  return kStops;
}

inline nlohmann::json request_to_json(const InferenceRequest& req) {
  return nlohmann::json{{"image", base64_encode(encode_png(req.image))},
                        {"image_format", "png"},
                        {"prompt", req.prompt},
                        {"max_tokens", req.max_tokens},
                        {"temperature", 0},
                        {"logprobs", true}};
}

// Server side of the wire format. Patch index is never carried.
inline InferenceRequest request_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("image_format", std::string("png")) != "png") throw ProtocolError("unsupported image_format");
    InferenceRequest req;
    req.image = decode_image(base64_decode(doc.at("image").get<std::string>()));
    req.prompt = doc.at("prompt").get<std::string>();
    req.max_tokens = doc.value("max_tokens", 64);
    return req;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what());
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("malformed request image: ") + e.what());
  }
}

inline FinishReason parse_finish_reason(std::string_view s) {
  if (s == "stop" || s == "eos") return FinishReason::Stop;
  if (s == "length") return FinishReason::Length;
  if (s == "error") return FinishReason::Error;
  throw ProtocolError("unknown finish_reason '" + std::string(s) + "'");
}

inline nlohmann::json response_to_json(const InferenceResponse& resp) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : resp.sequence.tokens) {
    nlohmann::json tok{{"id", t.token_id}, {"text", t.text}, {"logprob", t.logprob}};
    if (t.stop) tok["special"] = true;
    tokens.push_back(std::move(tok));
  }
  return nlohmann::json{{"tokens", std::move(tokens)}, {"finish_reason", to_string(resp.sequence.finish_reason)}};
}

// Validates shape and the logprob <= 0 invariant. A token counts as a stop
// token when flagged "special" or when its text is a known end marker.
inline InferenceResponse response_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ProtocolError("response is not an object");
  if (!doc.contains("tokens") || !doc["tokens"].is_array()) throw ProtocolError("response lacks a tokens array");
  if (!doc.contains("finish_reason") || !doc["finish_reason"].is_string())
    throw ProtocolError("response lacks finish_reason");
  InferenceResponse resp;
  resp.sequence.finish_reason = parse_finish_reason(doc["finish_reason"].get<std::string>());
  for (const auto& tok : doc["tokens"]) {
    if (!tok.is_object() || !tok.contains("text") || !tok["text"].is_string() || !tok.contains("logprob") ||
        !tok["logprob"].is_number())
      throw ProtocolError("token entry needs text and numeric logprob");
    TokenScore ts;
    ts.token_id = tok.contains("id") && tok["id"].is_number_integer() ? tok["id"].get<std::int64_t>() : -1;
    ts.text = tok["text"].get<std::string>();
    ts.logprob = tok["logprob"].get<double>();
    if (!std::isfinite(ts.logprob) || ts.logprob > 0.0)
      throw ProtocolError("token logprob must be finite and <= 0, got " + std::to_string(ts.logprob));
    ts.stop = tok.value("special", false) || default_stop_texts().count(ts.text) > 0;
    resp.sequence.tokens.push_back(std::move(ts));
  }
  return resp;
}

}  // namespace patchfinder
