#pragma once

#include <map>
#include <string>
#include <string_view>

#include "patchfinder/confidence.hpp"
#include "patchfinder/errors.hpp"

namespace patchfinder {

struct PromptTemplate {
  std::string name;
  std::string text;  // may contain {field} and {document_id}
};

inline constexpr std::string_view kLatitudeFormatPreamble =
    "You understand that latitude can come in a form of decimals, for example 52.25967 or in the form of "
    "degrees, for example 60°12'59.32\". or 60°12'59\". ";

inline constexpr std::string_view kLongitudeFormatPreamble =
    "You understand that longitude can come in a form of decimals, for example -104.82391 or in the form of "
    "degrees, for example 104°49'26.08\". or 104°49'26\". ";

// Shipped templates; run configs may add more or override these by name.
inline std::map<std::string, PromptTemplate, std::less<>> builtin_prompts() {
  std::map<std::string, PromptTemplate, std::less<>> p;
  auto add = [&p](std::string name, std::string text) { p.emplace(name, PromptTemplate{name, std::move(text)}); };
  add("latitude", std::string(kLatitudeFormatPreamble) +
                      "Extract the drilled latitude of the well described in this well completion report. "
                      "Do not extract the longitude.");
  add("longitude", std::string(kLongitudeFormatPreamble) +
                       "Extract the drilled longitude of the well described in this well completion report. "
                       "Do not extract the latitude.");
  add("tvd",
      "Extract the true vertical depth (TVD) of the well described in this well completion report. "
      "Answer with the number only.");
  add("generic", "Extract the {field} from this document. Answer with the value only.");
  return p;
}

inline std::string render_prompt(const PromptTemplate& tmpl, std::string_view field, std::string_view document_id = {}) {
  std::string out = tmpl.text;
  auto substitute = [&out](std::string_view key, std::string_view value) {
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  };
  substitute("{field}", field);
  substitute("{document_id}", document_id);
  if (trim(out).empty()) throw ConfigError("prompt template '" + tmpl.name + "' renders empty");
  return out;
}

}  // namespace patchfinder
