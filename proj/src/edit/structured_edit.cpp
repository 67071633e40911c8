#include "edit/structured_edit.hpp"

#include <algorithm>

namespace trellis {
namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_blank(char c) { return c == ' ' || c == '\t'; }

bool all_space(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

const GrammarRules& rules_of(const Language& lang) {
  if (!lang.rules) throw Error(ErrorCode::NotAList, "language " + lang.id + " has no grammar rules");
  return *lang.rules;
}

const SyntaxNode& checked_node(const SyntaxTree& tree, NodeId id) {
  const SyntaxNode* n = tree.find(id);
  if (!n || !tree.is_ancestor_or_self(tree.root(), id)) {
    throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id) + " is not in the tree");
  }
  return *n;
}

// A list inside a matched node, with text access.
struct ListView {
  const SyntaxTree& tree;
  const RuleMatch& match;
  std::size_t list;
  std::string_view text;

  const ListInstance& instance() const { return match.lists[list]; }
  std::size_t size() const { return instance().elements.size(); }
  const std::string& separator() const { return instance().shape.separator; }
  bool adjacency() const { return instance().shape.adjacency(); }
  bool terminated() const { return instance().shape.trailing == ListShape::Trailing::Terminated; }

  TextRange child(std::size_t i) const { return tree.node(match.children[i]).range; }
  TextRange element(std::size_t j) const { return child(instance().elements[j]); }

  bool is_separator(std::size_t i) const {
    return i < match.children.size() && match.roles[i].separator && match.roles[i].list == static_cast<int>(list);
  }
  // Separator directly after element j, if any.
  std::optional<TextRange> separator_after(std::size_t j) const {
    std::size_t i = instance().elements[j] + 1;
    if (is_separator(i)) return child(i);
    return std::nullopt;
  }
  std::optional<TextRange> separator_before(std::size_t j) const {
    std::size_t i = instance().elements[j];
    if (i > 0 && is_separator(i - 1)) return child(i - 1);
    return std::nullopt;
  }

  // Whitespace run ending at `pos`, not crossing `floor`.
  std::string_view space_before(std::size_t pos, std::size_t floor) const {
    std::size_t k = pos;
    while (k > floor && is_space(text[k - 1])) --k;
    return text.substr(k, pos - k);
  }
  std::string_view space_after(std::size_t pos, std::size_t ceil) const {
    std::size_t k = pos;
    while (k < ceil && is_space(text[k])) ++k;
    return text.substr(pos, k - pos);
  }

  std::size_t nearest_gap(std::size_t index) const {
    return std::min(index == 0 ? 0 : index - 1, size() - 2);
  }

  // Text placed between two elements, copied from the nearest existing pair.
  std::string joint(std::size_t index) const {
    const std::size_t n = size();
    if (adjacency()) {
      if (n >= 2) {
        std::size_t j = nearest_gap(index);
        std::string_view gap = text.substr(element(j).to, element(j + 1).from - element(j).to);
        if (all_space(gap)) return std::string(gap);
      }
      TextRange e = element(0);
      std::size_t line = e.from;
      while (line > 0 && is_blank(text[line - 1])) --line;
      if (line == 0 || text[line - 1] == '\n') return "\n" + std::string(text.substr(line, e.from - line));
      return " ";
    }
    if (n >= 2) {
      std::size_t j = nearest_gap(index);
      if (auto s = separator_after(j)) {
        return std::string(space_before(s->from, element(j).to)) + separator() +
               std::string(space_after(s->to, element(j + 1).from));
      }
    }
    return separator();
  }

  // Whitespace that follows a separator before the next element.
  std::string space_after_separator(std::size_t index) const {
    if (size() < 2) return "";
    std::size_t j = nearest_gap(index);
    if (auto s = separator_after(j)) return std::string(space_after(s->to, element(j + 1).from));
    return "";
  }
};

std::size_t select_list(const RuleMatch& m, const ListSelector& select) {
  if (m.lists.empty()) throw Error(ErrorCode::NotAList, "node has no repeating rule");
  if (!select) return 0;
  std::size_t li = select(m);
  if (li >= m.lists.size()) throw Error(ErrorCode::NotAList, "selector chose a missing list");
  return li;
}

RuleMatch require_match(const SyntaxTree& tree, const Language& lang, NodeId node, ErrorCode code) {
  auto m = rules_of(lang).match(tree, node);
  if (!m) throw Error(code, "node kind " + tree.node(node).kind + " does not fit its grammar rule");
  return *m;
}

bool keeps_single_separator(const Language& lang, const std::string& kind) {
  return lang.exceptions && lang.exceptions->keep_single_trailing_separator.count(kind) != 0;
}

// First ancestor whose range is strictly larger than `id`'s.
NodeId enclosing(const SyntaxTree& tree, NodeId id) {
  const TextRange r = tree.node(id).range;
  NodeId p = tree.node(id).parent;
  while (p != kNoNode && tree.node(p).range == r) p = tree.node(p).parent;
  return p;
}

struct Candidate {
  std::string insert;
  std::optional<TextRange> payload;  // relative to the insertion start
  bool parenthesized = false;
};

// Replaces `target`'s range with the first candidate that reparses with a
// node at exactly the inserted range in the same enclosing context.
PlannedEdit probe(const SyntaxTree& tree, const Language& lang, NodeId target, const std::vector<Candidate>& candidates) {
  const TextRange r = tree.node(target).range;
  const NodeId parent = enclosing(tree, target);
  const bool had_errors = tree.has_errors();
  for (const auto& c : candidates) {
    std::vector<TextChange> changes{{r.from, r.to, c.insert}};
    std::string next = apply_changes(tree.text(), changes);
    IdAllocator ids;
    SyntaxTree reparsed = lang.parse(next, ids);
    if (!had_errors && reparsed.has_errors()) continue;
    NodeId at = node_at_range(reparsed, {r.from, r.from + c.insert.size()});
    if (at == kNoNode) continue;
    NodeId up = enclosing(reparsed, at);
    if (parent != kNoNode) {
      const TextRange pr = tree.node(parent).range;
      const TextRange expected{pr.from, pr.to - r.size() + c.insert.size()};
      if (up == kNoNode || reparsed.node(up).range != expected) continue;
    }
    if (c.payload) {
      const TextRange inner{r.from + c.payload->from, r.from + c.payload->to};
      if (node_at_range(reparsed, inner) == kNoNode) continue;
    }
    return {std::move(changes), c.parenthesized};
  }
  throw Error(ErrorCode::ReplaceFailed, "no form of the text fits at node " + std::to_string(target));
}

}  // namespace

NodeId node_at_range(const SyntaxTree& tree, TextRange range) {
  NodeId found = kNoNode;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty() && found == kNoNode) {
    NodeId id = stack.back();
    stack.pop_back();
    const SyntaxNode& n = tree.node(id);
    if (n.is_trivia || !n.range.contains(range)) continue;
    if (n.range == range) {
      found = id;
      break;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return found;
}

ListInfo GrammarAdapter::list_info(const SyntaxTree& tree, NodeId node) const {
  const SyntaxNode& n = checked_node(tree, node);
  if (n.parent == kNoNode || !language_->rules) return {};
  auto m = language_->rules->match(tree, n.parent);
  if (!m) return {};
  auto it = std::find(m->children.begin(), m->children.end(), node);
  if (it == m->children.end()) return {};
  std::size_t i = static_cast<std::size_t>(it - m->children.begin());
  if (m->roles[i].separator) return {};
  const ListInstance* li = m->list_of(i);
  if (!li) return {};
  return {true, li->shape.separator};
}

std::size_t GrammarAdapter::first_insert_position(const SyntaxTree& tree, NodeId list_node) const {
  checked_node(tree, list_node);
  RuleMatch m = require_match(tree, *language_, list_node, ErrorCode::NotAList);
  const ListInstance& li = m.lists.at(select_list(m, {}));
  if (li.after == kNpos) return tree.node(list_node).range.from;
  return tree.node(m.children[li.after]).range.to;
}

bool GrammarAdapter::parenthesizable(const SyntaxTree& tree, NodeId node) const {
  return language_->expression_kinds.count(checked_node(tree, node).kind) != 0;
}

PlannedEdit plan_insert(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view text,
                        std::size_t index, const ListSelector& select) {
  const SyntaxNode& node = checked_node(tree, target);
  RuleMatch m = require_match(tree, lang, target, ErrorCode::NotAList);
  ListView v{tree, m, select_list(m, select), tree.text()};
  const std::size_t n = v.size();
  if (index > n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(index) + " exceeds list size " + std::to_string(n));
  }
  const std::string& sep = v.separator();
  const std::string t(text);
  TextChange c;
  if (n == 0) {
    const ListInstance& li = v.instance();
    c.from = li.after == kNpos ? node.range.from : v.child(li.after).to;
    c.insert = t;
    if (v.terminated() || (!v.adjacency() && keeps_single_separator(lang, node.kind))) c.insert += sep;
  } else if (v.terminated() || (!v.adjacency() && index == n && v.separator_after(n - 1))) {
    if (index < n) {
      c.from = v.element(index).from;
      c.insert = t + sep + v.space_after_separator(index);
    } else {
      c.from = v.separator_after(n - 1)->to;
      c.insert = v.space_after_separator(index) + t + sep;
    }
  } else if (index < n) {
    c.from = v.element(index).from;
    c.insert = t + v.joint(index);
  } else {
    c.from = v.element(n - 1).to;
    c.insert = v.joint(index) + t;
  }
  c.to = c.from;
  return {{std::move(c)}, false};
}

PlannedEdit plan_delete(const SyntaxTree& tree, const Language& lang, NodeId target) {
  const SyntaxNode& node = checked_node(tree, target);
  if (node.parent == kNoNode) throw Error(ErrorCode::CannotDelete, "the root cannot be deleted");
  RuleMatch m = require_match(tree, lang, node.parent, ErrorCode::CannotDelete);
  auto it = std::find(m.children.begin(), m.children.end(), target);
  if (it == m.children.end()) throw Error(ErrorCode::CannotDelete, "trivia cannot be deleted");
  const std::size_t k = static_cast<std::size_t>(it - m.children.begin());
  const ChildRole& role = m.roles[k];
  const std::string_view text = tree.text();

  if (role.list >= 0 && !role.separator) {
    ListView v{tree, m, static_cast<std::size_t>(role.list), text};
    const auto& elems = v.instance().elements;
    const std::size_t j = static_cast<std::size_t>(std::find(elems.begin(), elems.end(), k) - elems.begin());
    const std::size_t n = v.size();
    if (n - 1 < v.instance().shape.min_elements) {
      throw Error(ErrorCode::CannotDelete, "list needs at least " + std::to_string(v.instance().shape.min_elements) +
                                               " elements");
    }
    const bool keep_single = n == 2 && !v.adjacency() && keeps_single_separator(lang, tree.node(node.parent).kind);
    const TextRange t = v.element(j);
    const auto own_sep = v.separator_after(j);
    std::vector<TextChange> changes;
    if (j + 1 < n) {
      if (keep_single && !v.separator_after(n - 1)) changes.push_back({v.element(1).to, v.element(1).to, v.separator()});
      changes.push_back({t.from, v.element(j + 1).from, ""});
    } else if (n > 1 && own_sep) {
      auto prev = v.terminated() ? v.separator_after(j - 1) : v.separator_before(j);
      changes.push_back({prev ? prev->to : v.element(j - 1).to, own_sep->to, ""});
    } else if (n > 1) {
      auto prev = v.separator_before(j);
      changes.push_back({keep_single && prev ? prev->to : v.element(j - 1).to, t.to, ""});
    } else {
      changes.push_back({t.from, own_sep ? own_sep->to : t.to, ""});
    }
    return {std::move(changes), false};
  }

  if (role.optional_first >= 0) {
    std::size_t from = tree.node(m.children[static_cast<std::size_t>(role.optional_first)]).range.from;
    const std::size_t to = tree.node(m.children[static_cast<std::size_t>(role.optional_last)]).range.to;
    std::size_t k2 = from;
    while (k2 > 0 && is_blank(text[k2 - 1])) --k2;
    if (k2 > 0 && text[k2 - 1] != '\n') from = k2;
    return {{{from, to, ""}}, false};
  }
  throw Error(ErrorCode::CannotDelete, node.kind + " is mandatory in " + tree.node(node.parent).kind);
}

PlannedEdit plan_replace(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view text) {
  checked_node(tree, target);
  std::vector<Candidate> candidates{{std::string(text), std::nullopt, false}};
  if (GrammarAdapter(lang).parenthesizable(tree, target)) {
    candidates.push_back({"(" + std::string(text) + ")", std::nullopt, true});
  }
  return probe(tree, lang, target, candidates);
}

PlannedEdit plan_wrap(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view prefix,
                      std::string_view suffix) {
  checked_node(tree, target);
  const std::string p(prefix);
  const std::string s(suffix);
  const std::string src(tree.source(target));
  std::vector<Candidate> candidates{{p + src + s, TextRange{p.size(), p.size() + src.size()}, false}};
  if (GrammarAdapter(lang).parenthesizable(tree, target)) {
    const std::size_t inner = p.size() + src.size() + 2;
    candidates.push_back({p + "(" + src + ")" + s, TextRange{p.size(), inner}, true});
    candidates.push_back({"(" + p + src + s + ")", TextRange{p.size() + 1, p.size() + 1 + src.size()}, true});
    candidates.push_back({"(" + p + "(" + src + ")" + s + ")", TextRange{p.size() + 1, inner + 1}, true});
  }
  return probe(tree, lang, target, candidates);
}

PlannedEdit plan(const SyntaxTree& tree, const Language& lang, const StructuredEditRequest& request) {
  switch (request.op) {
    case StructuredEditRequest::Op::Insert:
      return plan_insert(tree, lang, request.target, request.text, request.index);
    case StructuredEditRequest::Op::Delete:
      return plan_delete(tree, lang, request.target);
    case StructuredEditRequest::Op::ReplaceWith:
      return plan_replace(tree, lang, request.target, request.text);
    case StructuredEditRequest::Op::WrapWith:
      return plan_wrap(tree, lang, request.target, request.prefix, request.suffix);
  }
  throw Error(ErrorCode::BadRequest, "unknown structured edit");
}

}  // namespace trellis
