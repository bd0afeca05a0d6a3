#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchfinder/image_io.hpp"
#include "patchfinder/manifest.hpp"
#include "patchfinder/selection.hpp"

namespace patchfinder {

struct Prediction {
  std::string document_id;
  std::string group;
  std::string field;
  FieldKind kind = FieldKind::FreeText;
  std::string answer;
  std::optional<double> pc;
  std::string status;                  // ok | no_valid_patch | error
  std::optional<std::string> detail;   // error text or abort reason
  std::optional<std::string> ground_truth;
  std::optional<bool> correct;         // set only when ground truth exists
};

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

// Field-level micro-average over every (document, field) with ground truth.
struct EvalReport {
  Tally overall;
  std::map<std::string, Tally> per_field;
  std::map<std::string, Tally> per_group;
};

struct BatchResult {
  std::vector<Prediction> predictions;
  std::optional<EvalReport> report;  // absent when no field carries ground truth
};

inline std::optional<EvalReport> evaluate(const std::vector<Prediction>& preds) {
  EvalReport r;
  bool any = false;
  for (const auto& p : preds) {
    if (!p.correct) continue;
    any = true;
    const std::size_t hit = *p.correct ? 1 : 0;
    for (Tally* t : {&r.overall, &r.per_field[p.field], &r.per_group[p.group]}) {
      t->correct += hit;
      ++t->total;
    }
  }
  if (!any) return std::nullopt;
  return r;
}

inline Prediction predict_field(const DocumentRecord& doc, const FieldRecord& field, const RasterImage* image,
                                const RunConfig& cfg, const GridSpec& spec, const Backend& backend) {
  Prediction p{doc.document_id, doc.group, field.name, field.kind, {}, std::nullopt, "error", std::nullopt,
               field.ground_truth, std::nullopt};
  if (!image) {
    p.detail = "image unavailable";
  } else {
    try {
      const auto result = run_patchfinder(*image, make_task(doc, field, cfg), spec, backend);
      if (result.winner) {
        p.status = "ok";
        p.answer = result.winner->answer_text;
        p.pc = result.winner->pc;
      } else {
        p.status = "no_valid_patch";
        p.detail = result.aborted_reason;
      }
    } catch (const Error& e) {
      p.detail = e.what();
    }
  }
  if (field.ground_truth) p.correct = p.status == "ok" && answers_match(p.answer, *field.ground_truth, field.kind);
  return p;
}

// Per-document failures are recorded as incorrect; the batch never aborts.
inline BatchResult run_batch(const DatasetManifest& manifest, const RunConfig& cfg, const GridSpec& spec,
                             const Backend& backend) {
  validate_manifest(manifest, cfg);
  BatchResult out;
  for (const auto& doc : manifest.documents) {
    std::optional<RasterImage> image;
    std::string load_error;
    try {
      image = load_image(doc.image);
    } catch (const Error& e) {
      load_error = e.what();
    }
    for (const auto& field : doc.fields) {
      auto p = predict_field(doc, field, image ? &*image : nullptr, cfg, spec, backend);
      if (!image) p.detail = load_error;
      out.predictions.push_back(std::move(p));
    }
  }
  out.report = evaluate(out.predictions);
  return out;
}

}  // namespace patchfinder
