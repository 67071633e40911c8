#include "fragment/fragment.hpp"

#include <algorithm>

namespace trellis {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (;;) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      return lines;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

std::string_view leading_blanks(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_blank(line[i])) ++i;
  return line.substr(0, i);
}

bool blank_line(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return is_blank(c) || c == '\r'; });
}

TextRange map_range(TextRange r, std::span<const TextChange> changes) {
  for (const auto& c : changes) {
    std::size_t from = map_position(r.from, c, false);
    std::size_t to = map_position(r.to, c, true);
    r = {from, std::max(from, to)};
  }
  return r;
}

}  // namespace

TextRange fragment_range(const Fragment& fragment, const SessionState& session) {
  const SyntaxTree& tree = session.tree();
  if (fragment.nodes.empty()) throw Error(ErrorCode::FragmentOrphaned, "fragment has no nodes");
  for (NodeId id : fragment.nodes) {
    const SyntaxNode* n = tree.find(id);
    if (!n || (id != tree.root() && !tree.is_ancestor_or_self(tree.root(), id))) {
      throw Error(ErrorCode::FragmentOrphaned, "fragment node " + std::to_string(id) + " left the tree");
    }
  }
  const NodeId parent = tree.node(fragment.nodes.front()).parent;
  if (fragment.nodes.size() > 1) {
    const auto siblings = parent == kNoNode ? std::vector<NodeId>{} : tree.named_children(parent);
    auto it = std::find(siblings.begin(), siblings.end(), fragment.nodes.front());
    for (NodeId id : fragment.nodes) {
      if (it == siblings.end() || *it != id) {
        throw Error(ErrorCode::FragmentOrphaned, "fragment nodes are no longer consecutive siblings");
      }
      ++it;
    }
  }
  TextRange r{tree.node(fragment.nodes.front()).range.from, tree.node(fragment.nodes.back()).range.to};
  std::vector<TextChange> pending;
  for (const auto& p : session.pending()) pending.push_back(p.change);
  return map_range(r, pending);
}

FragmentView display_text(const Fragment& fragment, const SessionState& session) {
  FragmentView view;
  view.id = fragment.id;
  const std::string& text = session.text();
  if (fragment.id == kRootFragment && fragment.nodes.empty()) {
    view.node_range = view.range = {0, text.size()};
    view.display_text = text;
    view.line_indented.assign(split_lines(text).size(), false);
    return view;
  }
  view.node_range = fragment_range(fragment, session);
  std::size_t from = view.node_range.from;
  std::size_t to = view.node_range.to;
  if (fragment.whitespace.include_right) {
    while (to < text.size() && is_blank(text[to])) ++to;
  }
  if (fragment.whitespace.include_left) {
    std::size_t k = from;
    while (k > 0 && is_blank(text[k - 1])) --k;
    const bool indentation = k == 0 || text[k - 1] == '\n';
    if (!indentation && from - k > 1) from = k;
  }
  view.range = {from, to};
  view.leading_take = view.node_range.from - from;
  view.trailing_take = to - view.node_range.to;

  auto lines = split_lines(std::string_view(text).substr(from, to - from));
  std::optional<std::string_view> common;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank_line(lines[i])) continue;
    std::string_view lead = leading_blanks(lines[i]);
    if (!common) {
      common = lead;
    } else {
      std::size_t n = 0;
      while (n < common->size() && n < lead.size() && (*common)[n] == lead[n]) ++n;
      common = common->substr(0, n);
    }
  }
  view.indent_prefix = common ? std::string(*common) : std::string();
  view.line_indented.assign(lines.size(), false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) view.display_text += '\n';
    std::string_view line = lines[i];
    if (i > 0 && !view.indent_prefix.empty() && line.starts_with(view.indent_prefix)) {
      view.line_indented[i] = true;
      view.display_text += kIndentSymbol;
      line.remove_prefix(view.indent_prefix.size());
    }
    view.display_text += line;
  }
  return view;
}

std::string restore_indentation(const FragmentView& view) {
  std::string out;
  auto lines = split_lines(view.display_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    std::string_view line = lines[i];
    if (i < view.line_indented.size() && view.line_indented[i]) {
      out += view.indent_prefix;
      line.remove_prefix(1);
    }
    out += line;
  }
  return out;
}

std::string unnormalize(const FragmentView& view) {
  std::string full = restore_indentation(view);
  return full.substr(view.leading_take, full.size() - view.leading_take - view.trailing_take);
}

std::size_t display_to_document(const FragmentView& view, std::size_t display_offset) {
  std::size_t doc = view.range.from;
  std::size_t line = 0;
  std::size_t column = 0;
  for (std::size_t i = 0; i < display_offset && i < view.display_text.size(); ++i) {
    const bool indent = column == 0 && line < view.line_indented.size() && view.line_indented[line];
    doc += indent ? view.indent_prefix.size() : 1;
    if (view.display_text[i] == '\n') {
      ++line;
      column = 0;
    } else {
      ++column;
    }
  }
  return doc;
}

std::size_t document_to_display(const FragmentView& view, std::size_t document_offset) {
  if (document_offset <= view.range.from) return 0;
  for (std::size_t d = 0; d <= view.display_text.size(); ++d) {
    if (display_to_document(view, d) >= document_offset) return d;
  }
  return view.display_text.size();
}

SelectionResult restore_selection(const std::vector<FragmentView>& views, const Selection& previous,
                                  std::span<const TextChange> changes) {
  SelectionResult out;
  out.selection.range = map_range(previous.range, changes);
  const TextRange r = out.selection.range;
  std::vector<const FragmentView*> covering;
  for (const auto& v : views) {
    if (v.range.contains(r)) covering.push_back(&v);
  }
  std::stable_sort(covering.begin(), covering.end(),
                   [](const FragmentView* a, const FragmentView* b) { return a->range.size() < b->range.size(); });
  for (const auto* v : covering) out.candidates.push_back(v->id);
  auto same = std::find_if(covering.begin(), covering.end(),
                           [&](const FragmentView* v) { return v->id == previous.fragment; });
  if (same != covering.end()) {
    out.selection.fragment = previous.fragment;
  } else if (!covering.empty()) {
    out.selection.fragment = covering.front()->id;
  } else {
    out.selection.fragment = kRootFragment;
  }
  return out;
}

FragmentId FragmentRegistry::create(std::vector<NodeId> nodes, std::optional<std::uint64_t> owner, int depth,
                                    WhitespaceOptions whitespace) {
  Fragment f;
  f.id = next_++;
  f.nodes = std::move(nodes);
  f.owner = owner;
  f.depth = depth;
  f.whitespace = whitespace;
  fragments_.emplace(f.id, f);
  return f.id;
}

void FragmentRegistry::dispose(FragmentId id) { fragments_.erase(id); }

void FragmentRegistry::dispose_owned_by(std::uint64_t owner) {
  std::erase_if(fragments_, [&](const auto& entry) { return entry.second.owner == owner; });
}

const Fragment* FragmentRegistry::find(FragmentId id) const {
  auto it = fragments_.find(id);
  return it == fragments_.end() ? nullptr : &it->second;
}

std::vector<FragmentView> FragmentRegistry::update(const SessionState& session, std::vector<FragmentId>* orphaned) {
  std::vector<FragmentView> views;
  views.push_back(display_text(Fragment{}, session));
  std::vector<FragmentId> dead;
  for (const auto& [id, f] : fragments_) {
    try {
      views.push_back(display_text(f, session));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FragmentOrphaned) throw;
      dead.push_back(id);
    }
  }
  for (FragmentId id : dead) fragments_.erase(id);
  if (orphaned) *orphaned = std::move(dead);
  return views;
}

nlohmann::json to_json(const FragmentView& view) {
  nlohmann::json stripped = nlohmann::json::array();
  for (bool b : view.line_indented) stripped.push_back(b ? view.indent_prefix.size() : 0);
  return {{"id", view.id},
          {"range", {view.range.from, view.range.to}},
          {"nodeRange", {view.node_range.from, view.node_range.to}},
          {"displayText", view.display_text},
          {"indentPrefixWidth", view.indent_prefix.size()},
          {"lineIndentStrip", std::move(stripped)},
          {"leadingTake", view.leading_take},
          {"trailingTake", view.trailing_take}};
}

}  // namespace trellis
