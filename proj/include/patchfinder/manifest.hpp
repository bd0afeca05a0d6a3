#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchfinder/errors.hpp"
#include "patchfinder/filters.hpp"
#include "patchfinder/run_config.hpp"

namespace patchfinder {

struct FieldRecord {
  std::string name;
  FieldKind kind = FieldKind::FreeText;
  std::string prompt;  // template name
  std::optional<std::string> ground_truth;
};

struct DocumentRecord {
  std::string document_id;
  std::filesystem::path image;
  std::string group;
  std::vector<FieldRecord> fields;
};

struct DatasetManifest {
  std::string group;
  std::vector<DocumentRecord> documents;
};

// {"group": "...", "documents": [{"document_id", "image", "group"?,
//   "fields": [{"name", "kind", "prompt"?, "ground_truth"?}]}]}
// Image paths resolve against `base_dir`. A field without "prompt" uses the
// template named after the field, falling back to "generic".
inline DatasetManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  DatasetManifest m;
  try {
    m.group = doc.value("group", std::string("default"));
    std::set<std::string> seen;
    for (const auto& d : doc.at("documents")) {
      DocumentRecord rec;
      rec.document_id = d.at("document_id").get<std::string>();
      if (!seen.insert(rec.document_id).second) throw ConfigError("duplicate document_id '" + rec.document_id + "'");
      std::filesystem::path img = d.at("image").get<std::string>();
      rec.image = img.is_relative() && !base_dir.empty() ? base_dir / img : img;
      rec.group = d.value("group", m.group);
      for (const auto& f : d.at("fields")) {
        FieldRecord field;
        field.name = f.at("name").get<std::string>();
        field.kind = parse_field_kind(f.value("kind", std::string("free-text")));
        field.prompt = f.value("prompt", std::string());
        if (f.contains("ground_truth") && !f["ground_truth"].is_null())
          field.ground_truth = f["ground_truth"].get<std::string>();
        rec.fields.push_back(std::move(field));
      }
      m.documents.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

inline std::string resolve_prompt_name(const FieldRecord& field, const RunConfig& cfg) {
  if (!field.prompt.empty()) return field.prompt;
  if (cfg.prompts.count(field.name)) return field.name;
  return "generic";
}

// Every field must name a template the config knows.
inline void validate_manifest(const DatasetManifest& m, const RunConfig& cfg) {
  for (const auto& d : m.documents)
    for (const auto& f : d.fields) {
      const auto name = resolve_prompt_name(f, cfg);
      if (!cfg.prompts.count(name))
        throw ConfigError("document '" + d.document_id + "' field '" + f.name + "' names unknown prompt '" + name + "'");
    }
}

inline ExtractionTask make_task(const DocumentRecord& doc, const FieldRecord& field, const RunConfig& cfg) {
  ExtractionTask task;
  task.field_name = field.name;
  task.kind = field.kind;
  task.prompt = render_prompt(cfg.prompt(resolve_prompt_name(field, cfg)), field.name, doc.document_id);
  task.chain = cfg.chain_for(field.name, field.kind);
  task.max_tokens = cfg.backend.max_tokens;
  task.include_stop_token = cfg.include_stop_token;
  return task;
}

// Keeps only the listed documents, in manifest order. Unknown ids are an error.
inline DatasetManifest split_manifest(const DatasetManifest& m, const std::vector<std::string>& ids) {
  std::set<std::string> wanted(ids.begin(), ids.end());
  DatasetManifest out{m.group, {}};
  for (const auto& d : m.documents)
    if (wanted.erase(d.document_id)) out.documents.push_back(d);
  if (!wanted.empty()) throw ConfigError("split names unknown document id '" + *wanted.begin() + "'");
  return out;
}

}  // namespace patchfinder
