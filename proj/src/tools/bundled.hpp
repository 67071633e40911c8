#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "tools/tool.hpp"

namespace trellis {

struct ToolOptions {
  bool toplevel_guard = false;  // opt-in definitions are skipped otherwise
};

// Builds definitions for one language from a manifest. Entries whose
// template does not compile for the language are skipped.
DefinitionList load_tools(const nlohmann::json& manifest, std::string_view language_id, const ToolOptions& options = {});

const nlohmann::json& bundled_manifest();
DefinitionList bundled_tools(std::string_view language_id, const ToolOptions& options = {});

// Delimiter and body range (relative to the leaf) of a string literal leaf.
struct StringLiteral {
  char quote = '"';
  std::size_t body_from = 0;
  std::size_t body_to = 0;
};
StringLiteral string_literal(std::string_view leaf_text);

}  // namespace trellis
