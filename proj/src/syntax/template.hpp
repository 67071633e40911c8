#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syntax/tree.hpp"

namespace trellis {

struct Placeholder {
  std::string name;
  std::optional<std::string> kind;  // set for the `$_kind` form
};

using Bindings = std::map<std::string, NodeId>;

/// Source pattern with `$name` / `$_kind` holes, compiled against one grammar.
class Template {
 public:
  // Throws TemplateError when the rewritten source does not parse cleanly.
  static Template compile(std::string_view source, std::string_view language_id);

  const std::string& source() const { return source_; }
  const std::string& rewritten() const { return rewritten_; }
  const std::string& language_id() const { return language_id_; }
  const std::vector<Placeholder>& placeholders() const { return placeholders_; }

  // Pattern node matched against candidates, and its range in rewritten().
  const SyntaxTree& pattern() const { return pattern_; }
  NodeId pattern_root() const { return pattern_root_; }

  // Pattern leaf standing for a placeholder, by name.
  NodeId hole(const std::string& name) const;

  std::optional<Bindings> match(const SyntaxTree& tree, NodeId node) const;

 private:
  bool match_node(NodeId p, const SyntaxTree& tree, NodeId n, Bindings& out) const;
  const Placeholder* placeholder_at(NodeId pattern_leaf) const;

  std::string source_;
  std::string rewritten_;
  std::string language_id_;
  std::vector<Placeholder> placeholders_;
  SyntaxTree pattern_;
  NodeId pattern_root_ = kNoNode;
  std::map<NodeId, std::size_t> holes_;  // pattern leaf -> placeholder index
};

inline constexpr std::string_view kTemplateIdentifierPrefix = "__vi_tmpl_";

// `$name` -> `__vi_tmpl_name`, `$_kind` -> `__vi_tmpl__kind`.
std::string rewrite_placeholders(std::string_view source, std::vector<Placeholder>& placeholders);

}  // namespace trellis
