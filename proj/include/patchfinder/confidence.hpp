#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchfinder/errors.hpp"

namespace patchfinder {

// One greedily decoded token. The chosen token's log-probability (nats) is
// stored as received from the backend, so no exp/log round trip happens.
struct TokenScore {
  std::int64_t token_id = 0;
  std::string text;
  double logprob = 0.0;
  bool stop = false;  // end-of-sequence / special stop token

  static TokenScore from_prob(std::int64_t id, std::string text, double prob, bool stop = false) {
    if (!(prob > 0.0 && prob <= 1.0)) throw Error("chosen_prob must lie in (0, 1]");
    return TokenScore{id, std::move(text), std::log(prob), stop};
  }

  double chosen_prob() const { return std::exp(logprob); }
  bool operator==(const TokenScore&) const = default;
};

enum class FinishReason { Stop, Length, Error };

inline std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

struct ScoredSequence {
  std::vector<TokenScore> tokens;
  FinishReason finish_reason = FinishReason::Stop;

  bool operator==(const ScoredSequence&) const = default;
};

// Per-patch outcome of one PatchFinder run. `pc` is empty only when the
// patch produced nothing to score (it is then always filtered).
struct PatchPrediction {
  int patch_index = 0;
  std::string answer_text;
  std::optional<double> pc;
  bool filtered = false;
  std::optional<std::string> filter_reason;
  std::string fingerprint;

  bool operator==(const PatchPrediction&) const = default;
};

// Patch Confidence: mean natural-log probability of the chosen tokens.
// Stop tokens are skipped unless include_stop_token is set.
inline double patch_confidence(const ScoredSequence& seq, bool include_stop_token = false) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : seq.tokens) {
    if (t.stop && !include_stop_token) continue;
    sum += t.logprob;
    ++n;
  }
  if (n == 0) throw EmptySequenceError();
  return sum / static_cast<double>(n);
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view kWs = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kWs);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWs);
  return s.substr(b, e - b + 1);
}

inline std::string decode_answer(const ScoredSequence& seq) {
  std::string out;
  for (const auto& t : seq.tokens) {
    if (!t.stop) out += t.text;
  }
  return std::string(trim(out));
}

}  // namespace patchfinder
