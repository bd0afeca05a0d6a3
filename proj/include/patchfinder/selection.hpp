#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "patchfinder/backend.hpp"
#include "patchfinder/confidence.hpp"
#include "patchfinder/filters.hpp"
#include "patchfinder/patch_grid.hpp"

namespace patchfinder {

// One field to extract: rendered prompt plus the filter chain its answers
// must pass.
struct ExtractionTask {
  std::string field_name;
  FieldKind kind = FieldKind::FreeText;
  std::string prompt;
  FilterChain chain;
  int max_tokens = 64;
  bool include_stop_token = false;
};

struct SelectionResult {
  std::optional<PatchPrediction> winner;
  std::vector<PatchPrediction> trace;  // one entry per patch, in index order
  PatchGrid grid;
  std::optional<std::string> aborted_reason;

  bool ok() const { return winner.has_value(); }
  std::string answer() const { return winner ? winner->answer_text : std::string(); }
  bool operator==(const SelectionResult&) const = default;
};

inline constexpr const char* kBackendErrorReason = "backend_error";
inline constexpr const char* kEmptySequenceReason = "empty_sequence";

// argmax pc over unfiltered entries, lowest index on ties. Expects `trace`
// sorted by patch index.
inline std::optional<PatchPrediction> select_winner(const std::vector<PatchPrediction>& trace) {
  const PatchPrediction* best = nullptr;
  for (const auto& p : trace) {
    if (p.filtered || !p.pc) continue;
    if (!best || *p.pc > *best->pc) best = &p;
  }
  if (!best) return std::nullopt;
  return *best;
}

namespace detail {

struct PatchOutcome {
  PatchPrediction prediction;
  bool transport_failed = false;
};

inline PatchOutcome score_one(const RasterImage& image, const PatchRect& rect, const ExtractionTask& task,
                              const Backend& backend) {
  PatchOutcome out;
  auto& pred = out.prediction;
  pred.patch_index = rect.index;

  InferenceRequest req{crop(image, rect), task.prompt, task.max_tokens, rect.index};
  pred.fingerprint = fingerprint(req.image);

  auto mark = [&pred](std::string reason) {
    pred.filtered = true;
    pred.filter_reason = std::move(reason);
  };

  InferenceResponse resp;
  try {
    resp = backend.score_patch(req);
  } catch (const TransportError&) {
    out.transport_failed = true;
    mark(kBackendErrorReason);
    return out;
  } catch (const ProtocolError&) {
    mark(kBackendErrorReason);
    return out;
  } catch (const BackendRefusal&) {
    mark(kBackendErrorReason);
    return out;
  }

  pred.answer_text = decode_answer(resp.sequence);
  if (resp.sequence.finish_reason == FinishReason::Error) {
    mark(kBackendErrorReason);
    return out;
  }
  try {
    pred.pc = patch_confidence(resp.sequence, task.include_stop_token);
  } catch (const EmptySequenceError&) {
    mark(kEmptySequenceReason);
    return out;
  }
  if (auto verdict = apply_filters(pred.answer_text, task.chain); !verdict.passed) mark(verdict.rule);
  return out;
}

}  // namespace detail

// Crop every patch, score it, filter, and pick the most confident survivor.
// Patches are scored concurrently up to backend.parallelism(); results are
// keyed by patch index so completion order never matters.
inline SelectionResult run_patchfinder(const RasterImage& image, const ExtractionTask& task, const GridSpec& spec,
                                       const Backend& backend) {
  if (image.empty()) throw FormatError("input image is empty");
  SelectionResult result;
  result.grid = build_grid(image.dims(), spec);
  const auto& patches = result.grid.patches;
  const std::size_t n = patches.size();

  std::vector<detail::PatchOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = detail::score_one(image, patches[i], task, backend);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, backend.parallelism())), 1, n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  bool all_transport_failed = n > 0;
  result.trace.reserve(n);
  for (auto& o : outcomes) {
    all_transport_failed = all_transport_failed && o.transport_failed;
    result.trace.push_back(std::move(o.prediction));
  }
  if (all_transport_failed) throw BackendUnavailable("backend unreachable for every patch after retries");

  std::sort(result.trace.begin(), result.trace.end(),
            [](const PatchPrediction& a, const PatchPrediction& b) { return a.patch_index < b.patch_index; });
  result.winner = select_winner(result.trace);
  if (!result.winner) {
    result.aborted_reason = "no_valid_patch: all " + std::to_string(n) + " patches filtered";
  }
  return result;
}

// Single whole-image pass, the no-patching baseline.
inline SelectionResult vanilla_run(const RasterImage& image, const ExtractionTask& task, const Backend& backend) {
  return run_patchfinder(image, task, kWholeImageSpec, backend);
}

}  // namespace patchfinder
