#include "syntax/template.hpp"

#include <algorithm>
#include <cctype>

#include "syntax/language.hpp"
#include "syntax/parser_base.hpp"

namespace trellis {
namespace {

std::optional<Placeholder> decode(std::string_view identifier) {
  if (!identifier.starts_with(kTemplateIdentifierPrefix)) return std::nullopt;
  std::string_view rest = identifier.substr(kTemplateIdentifierPrefix.size());
  if (rest.empty()) return std::nullopt;
  if (rest.front() == '_') {
    std::string kind(rest.substr(1));
    if (kind.empty()) return std::nullopt;
    return Placeholder{kind, kind};
  }
  return Placeholder{std::string(rest), std::nullopt};
}

// Strips string delimiters (quotes, backticks, Python prefixes).
std::string_view string_body(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  text.remove_prefix(i);
  if (text.size() < 2) return {};
  char q = text.front();
  if ((q != '"' && q != '\'' && q != '`') || text.back() != q) return {};
  return text.substr(1, text.size() - 2);
}

bool contains_errors(const SyntaxTree& tree, NodeId id) {
  bool found = false;
  tree.preorder([&](const SyntaxNode& n) { found = found || n.is_error; }, id);
  return found;
}

}  // namespace

std::string rewrite_placeholders(std::string_view source, std::vector<Placeholder>& placeholders) {
  std::string out;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] != '$') {
      out += source[i];
      continue;
    }
    std::size_t j = i + 1;
    while (j < source.size() && detail::is_ident_char(source[j]) && source[j] != '$') ++j;
    std::string name(source.substr(i + 1, j - i - 1));
    // `${` opens a template substitution and is left alone.
    if (name.empty() && j < source.size() && source[j] == '{') {
      out += '$';
      continue;
    }
    if (name.empty() || name == "_") throw Error(ErrorCode::TemplateError, "empty placeholder name");
    auto p = decode(std::string(kTemplateIdentifierPrefix) + name);
    for (const auto& existing : placeholders) {
      if (existing.name == p->name) throw Error(ErrorCode::TemplateError, "duplicate placeholder $" + name);
    }
    placeholders.push_back(*p);
    out += kTemplateIdentifierPrefix;
    out += name;
    i = j - 1;
  }
  return out;
}

Template Template::compile(std::string_view source, std::string_view language_id) {
  Template t;
  t.source_ = std::string(source);
  t.language_id_ = language(language_id).id;
  t.rewritten_ = rewrite_placeholders(source, t.placeholders_);
  IdAllocator ids;
  t.pattern_ = parse_document(t.rewritten_, t.language_id_, ids);
  if (t.pattern_.has_errors()) {
    throw Error(ErrorCode::TemplateError, "template does not parse: " + t.source_);
  }
  NodeId root = t.pattern_.root();
  for (auto kids = t.pattern_.named_children(root); kids.size() == 1; kids = t.pattern_.named_children(root)) {
    root = kids.front();
  }
  if (root == t.pattern_.root()) throw Error(ErrorCode::TemplateError, "empty template");
  t.pattern_root_ = root;

  for (NodeId leaf : t.pattern_.leaves(root)) {
    const SyntaxNode& n = t.pattern_.node(leaf);
    if (n.is_trivia) continue;
    auto p = decode(n.text);
    if (!p) p = decode(string_body(n.text));
    if (!p) continue;
    auto it = std::find_if(t.placeholders_.begin(), t.placeholders_.end(),
                           [&](const Placeholder& q) { return q.name == p->name; });
    if (it == t.placeholders_.end()) continue;
    t.holes_[leaf] = static_cast<std::size_t>(it - t.placeholders_.begin());
  }
  if (t.holes_.size() != t.placeholders_.size()) {
    throw Error(ErrorCode::TemplateError, "placeholder outside the pattern or not a single token: " + t.source_);
  }
  return t;
}

NodeId Template::hole(const std::string& name) const {
  for (const auto& [leaf, index] : holes_) {
    if (placeholders_[index].name == name) return leaf;
  }
  return kNoNode;
}

const Placeholder* Template::placeholder_at(NodeId pattern_leaf) const {
  auto it = holes_.find(pattern_leaf);
  return it == holes_.end() ? nullptr : &placeholders_[it->second];
}

std::optional<Bindings> Template::match(const SyntaxTree& tree, NodeId node) const {
  if (tree.language_id() != language_id_ || !tree.contains(node)) return std::nullopt;
  Bindings out;
  if (!match_node(pattern_root_, tree, node, out)) return std::nullopt;
  return out;
}

bool Template::match_node(NodeId p, const SyntaxTree& tree, NodeId n, Bindings& out) const {
  const SyntaxNode& pn = pattern_.node(p);
  const SyntaxNode& tn = tree.node(n);
  if (const Placeholder* hole = placeholder_at(p)) {
    if (tn.is_trivia || contains_errors(tree, n)) return false;
    if (hole->kind && tn.kind != *hole->kind) return false;
    out[hole->name] = n;
    return true;
  }
  if (pn.kind != tn.kind || pn.is_leaf != tn.is_leaf || tn.is_error) return false;
  if (pn.is_leaf) return pn.text == tn.text;
  auto pk = pattern_.named_children(p);
  auto tk = tree.named_children(n);
  if (pk.size() != tk.size()) return false;
  for (std::size_t i = 0; i < pk.size(); ++i) {
    if (!match_node(pk[i], tree, tk[i], out)) return false;
  }
  return true;
}

}  // namespace trellis
