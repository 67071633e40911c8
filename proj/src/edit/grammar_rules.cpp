#include "edit/grammar_rules.hpp"

#include <functional>

namespace trellis {
namespace {

using json = nlohmann::json;

const json& unwrap(const json& rule) {
  const json* r = &rule;
  for (;;) {
    const std::string& t = (*r)["type"].get_ref<const std::string&>();
    if (t == "PREC" || t == "PREC_LEFT" || t == "PREC_RIGHT" || t == "PREC_DYNAMIC" || t == "FIELD" ||
        t == "TOKEN" || t == "IMMEDIATE_TOKEN") {
      r = &(*r)["content"];
    } else {
      return *r;
    }
  }
}

// Rule with wrappers removed everywhere, for structural comparison.
json strip(const json& rule) {
  const json& r = unwrap(rule);
  json out = r;
  if (r.contains("members")) {
    out["members"] = json::array();
    for (const auto& m : r["members"]) out["members"].push_back(strip(m));
  }
  if (r.contains("content")) out["content"] = strip(r["content"]);
  return out;
}

bool is_type(const json& r, std::string_view t) { return r["type"].get_ref<const std::string&>() == t; }

bool is_string(const json& r, std::string* value = nullptr) {
  if (!is_type(r, "STRING")) return false;
  if (value) *value = r["value"].get<std::string>();
  return true;
}

bool is_optional_string(const json& r, const std::string& expected) {
  if (!is_type(r, "CHOICE") || r["members"].size() != 2) return false;
  std::string v;
  return is_string(r["members"][0], &v) && v == expected && is_type(r["members"][1], "BLANK");
}

// `REPEAT(SEQ("S", X))` or its REPEAT1 form; fills separator and X.
bool separator_then_element(const json& r, std::string& sep, json& element) {
  if (!is_type(r, "REPEAT") && !is_type(r, "REPEAT1")) return false;
  const json& c = r["content"];
  if (!is_type(c, "SEQ") || c["members"].size() != 2) return false;
  if (!is_string(c["members"][0], &sep)) return false;
  element = c["members"][1];
  return true;
}

// `REPEAT(SEQ(X, "S"))`.
bool element_then_separator(const json& r, std::string& sep, json& element) {
  if (!is_type(r, "REPEAT") && !is_type(r, "REPEAT1")) return false;
  const json& c = r["content"];
  if (!is_type(c, "SEQ") || c["members"].size() != 2) return false;
  if (!is_string(c["members"][1], &sep)) return false;
  element = c["members"][0];
  return true;
}

bool plain_repeat(const json& r) {
  if (!is_type(r, "REPEAT") && !is_type(r, "REPEAT1")) return false;
  const json& c = r["content"];
  if (is_string(c)) return false;
  if (is_type(c, "SEQ")) {
    for (const auto& m : c["members"]) {
      if (is_string(m)) return false;
    }
  }
  return true;
}

std::string separated_list(const json& seq) {
  if (!is_type(seq, "SEQ")) return {};
  const auto& m = seq["members"];
  if (m.size() < 2 || m.size() > 3) return {};
  std::string sep;
  json element;
  if (!separator_then_element(m[1], sep, element) || element != m[0]) return {};
  if (m.size() == 3 && !is_optional_string(m[2], sep)) return {};
  return sep;
}

}  // namespace

std::string detect_separator(const json& rule) {
  const json r = strip(rule);
  if (auto sep = separated_list(r); !sep.empty()) return sep;
  if (is_type(r, "CHOICE") && r["members"].size() == 2 && is_type(r["members"][1], "BLANK")) {
    if (auto sep = separated_list(r["members"][0]); !sep.empty()) return sep;
  }
  std::string sep;
  json element;
  if (element_then_separator(r, sep, element)) return sep;
  if (plain_repeat(r)) return "";
  throw Error(ErrorCode::NoHeuristic, "no separator heuristic matches rule " + rule.dump());
}

ExceptionTable ExceptionTable::from_json(const json& table) {
  ExceptionTable out;
  if (!table.contains("rules")) return out;
  for (const auto& [name, entry] : table["rules"].items()) {
    if (entry.value("keep_single_trailing_separator", false)) out.keep_single_trailing_separator.insert(name);
  }
  return out;
}

std::shared_ptr<const GrammarRules> GrammarRules::from_json(const json& grammar) {
  auto g = std::make_shared<GrammarRules>();
  g->name_ = grammar.value("name", "");
  g->rules_ = json::object();
  for (const auto& [name, rule] : grammar.at("rules").items()) g->rules_[name] = strip(rule);
  for (const auto& [name, rule] : g->rules_.items()) {
    if (!name.empty() && name[0] == '_') g->hidden_.insert(name);
  }
  if (grammar.contains("supertypes")) {
    for (const auto& s : grammar["supertypes"]) g->hidden_.insert(s.get<std::string>());
  }
  for (const auto& [name, rule] : g->rules_.items()) {
    if (g->hidden_.count(name)) continue;
    g->normalized_[name] = g->normalize(rule, 0);
  }
  auto paren = g->normalized_.find("parenthesized_expression");
  if (paren != g->normalized_.end()) {
    std::function<void(const RuleNode&)> collect = [&](const RuleNode& n) {
      if (n.type == RuleNode::Type::Terminal) {
        for (const auto& k : n.kinds) {
          if (k != "(" && k != ")") g->parenthesizable_.insert(k);
        }
      }
      for (const auto& m : n.members) collect(*m);
    };
    collect(*paren->second);
  }
  return g;
}

std::shared_ptr<const RuleNode> GrammarRules::symbol(const std::string& name, int depth) {
  if (hidden_.count(name) && rules_.contains(name)) {
    auto it = inlined_.find(name);
    if (it != inlined_.end()) return it->second;
    if (depth > 32) throw Error(ErrorCode::UnsupportedGrammar, "recursive hidden rule " + name);
    auto node = normalize(rules_[name], depth + 1);
    inlined_[name] = node;
    return node;
  }
  auto node = std::make_shared<RuleNode>();
  node->type = RuleNode::Type::Terminal;
  node->kinds.insert(name);
  return node;
}

std::shared_ptr<const RuleNode> GrammarRules::normalize(const json& raw, int depth) {
  const json& r = unwrap(raw);
  const std::string& type = r["type"].get_ref<const std::string&>();
  auto node = std::make_shared<RuleNode>();

  auto make_list = [&](const json& element, std::string sep, ListShape::Trailing trailing, std::size_t min) {
    auto list = std::make_shared<RuleNode>();
    list->type = RuleNode::Type::List;
    list->members.push_back(normalize(element, depth));
    list->shape = {std::move(sep), trailing, min};
    return list;
  };

  if (type == "STRING" || type == "ALIAS") {
    node->type = RuleNode::Type::Terminal;
    node->kinds.insert(r["value"].get<std::string>());
  } else if (type == "PATTERN") {
    node->type = RuleNode::Type::Terminal;
  } else if (type == "SYMBOL") {
    return symbol(r["name"].get<std::string>(), depth);
  } else if (type == "BLANK") {
    node->type = RuleNode::Type::Blank;
  } else if (type == "CHOICE") {
    bool optional = false;
    std::vector<std::shared_ptr<const RuleNode>> members;
    for (const auto& m : r["members"]) {
      if (is_type(unwrap(m), "BLANK")) {
        optional = true;
      } else {
        members.push_back(normalize(m, depth));
      }
    }
    if (optional && members.size() == 1 && members[0]->type == RuleNode::Type::List) {
      auto list = std::make_shared<RuleNode>(*members[0]);
      list->shape.min_elements = 0;
      return list;
    }
    if (!optional && members.size() == 1) return members[0];
    node->type = RuleNode::Type::Choice;
    node->members = std::move(members);
    if (optional) {
      auto blank = std::make_shared<RuleNode>();
      blank->type = RuleNode::Type::Blank;
      node->members.push_back(blank);
    }
  } else if (type == "SEQ") {
    const auto& m = r["members"];
    node->type = RuleNode::Type::Seq;
    for (std::size_t i = 0; i < m.size(); ++i) {
      std::string sep;
      json element;
      if (i + 1 < m.size() && separator_then_element(m[i + 1], sep, element) && element == m[i]) {
        auto trailing = ListShape::Trailing::None;
        std::size_t consumed = 2;
        if (i + 2 < m.size() && is_optional_string(m[i + 2], sep)) {
          trailing = ListShape::Trailing::Optional;
          consumed = 3;
        }
        node->members.push_back(make_list(m[i], sep, trailing, is_type(m[i + 1], "REPEAT1") ? 2 : 1));
        i += consumed - 1;
        continue;
      }
      node->members.push_back(normalize(m[i], depth));
    }
    if (node->members.size() == 1) return node->members[0];
  } else if (type == "REPEAT" || type == "REPEAT1") {
    const std::size_t min = type == "REPEAT1" ? 1 : 0;
    std::string sep;
    json element;
    if (element_then_separator(r, sep, element)) return make_list(element, sep, ListShape::Trailing::Terminated, min);
    if (plain_repeat(r)) return make_list(r["content"], "", ListShape::Trailing::None, min);
    node->type = RuleNode::Type::Repeat;
    node->shape.min_elements = min;
    node->members.push_back(normalize(r["content"], depth));
  } else {
    throw Error(ErrorCode::UnsupportedGrammar, "unsupported rule type " + type);
  }
  return node;
}

namespace {

class Matcher {
 public:
  using Cont = std::function<bool(std::size_t)>;

  explicit Matcher(std::vector<std::string> kinds) : kinds_(std::move(kinds)), roles_(kinds_.size()) {}

  bool run(const RuleNode& rule) {
    return match(rule, 0, [&](std::size_t p) { return p == kinds_.size(); });
  }

  std::vector<ChildRole> roles_out() { return std::move(roles_); }
  std::vector<ListInstance> lists_out() { return std::move(lists_); }

 private:
  enum class Undo { Role, Element, Separator, PushList };
  struct TrailEntry {
    Undo kind;
    std::size_t index;
    ChildRole old;
  };

  void set_role(std::size_t i, ChildRole role) {
    trail_.push_back({Undo::Role, i, roles_[i]});
    roles_[i] = role;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      auto e = trail_.back();
      trail_.pop_back();
      switch (e.kind) {
        case Undo::Role:
          roles_[e.index] = e.old;
          break;
        case Undo::Element:
          lists_[e.index].elements.pop_back();
          break;
        case Undo::Separator:
          lists_[e.index].separators.pop_back();
          break;
        case Undo::PushList:
          lists_.pop_back();
          break;
      }
    }
  }

  bool match(const RuleNode& r, std::size_t pos, const Cont& k) {
    switch (r.type) {
      case RuleNode::Type::Blank:
        return k(pos);
      case RuleNode::Type::Terminal:
        return pos < kinds_.size() && r.kinds.count(kinds_[pos]) && k(pos + 1);
      case RuleNode::Type::Seq:
        return seq(r, 0, pos, k);
      case RuleNode::Type::Choice:
        return choice(r, pos, k);
      case RuleNode::Type::Repeat:
        return repeat(r, pos, 0, k);
      case RuleNode::Type::List: {
        const std::size_t mark = trail_.size();
        ListInstance li;
        li.shape = r.shape;
        li.after = pos == 0 ? static_cast<std::size_t>(-1) : pos - 1;
        lists_.push_back(std::move(li));
        trail_.push_back({Undo::PushList, 0, {}});
        if (list(r, lists_.size() - 1, pos, k)) return true;
        undo_to(mark);
        return false;
      }
    }
    return false;
  }

  bool seq(const RuleNode& r, std::size_t idx, std::size_t pos, const Cont& k) {
    if (idx == r.members.size()) return k(pos);
    return match(*r.members[idx], pos, [&](std::size_t p) { return seq(r, idx + 1, p, k); });
  }

  bool choice(const RuleNode& r, std::size_t pos, const Cont& k) {
    const bool optional = !r.members.empty() && r.members.back()->type == RuleNode::Type::Blank;
    for (const auto& m : r.members) {
      const std::size_t mark = trail_.size();
      bool ok = match(*m, pos, [&](std::size_t q) {
        const std::size_t inner = trail_.size();
        if (optional && q > pos) {
          for (std::size_t i = pos; i < q; ++i) {
            if (roles_[i].optional_first >= 0) continue;
            ChildRole role = roles_[i];
            role.optional_first = static_cast<int>(pos);
            role.optional_last = static_cast<int>(q - 1);
            set_role(i, role);
          }
        }
        if (k(q)) return true;
        undo_to(inner);
        return false;
      });
      if (ok) return true;
      undo_to(mark);
    }
    return false;
  }

  bool repeat(const RuleNode& r, std::size_t pos, std::size_t count, const Cont& k) {
    const std::size_t mark = trail_.size();
    bool more = match(*r.members[0], pos, [&](std::size_t q) { return q > pos && repeat(r, q, count + 1, k); });
    if (more) return true;
    undo_to(mark);
    return count >= r.shape.min_elements && k(pos);
  }

  bool take_separator(std::size_t li, std::size_t pos) {
    if (pos >= kinds_.size() || kinds_[pos] != lists_[li].shape.separator) return false;
    ChildRole role = roles_[pos];
    role.list = static_cast<int>(li);
    role.separator = true;
    set_role(pos, role);
    lists_[li].separators.push_back(pos);
    trail_.push_back({Undo::Separator, li, {}});
    return true;
  }

  bool take_element(const RuleNode& r, std::size_t li, std::size_t pos, std::size_t count, const Cont& k) {
    const std::size_t mark = trail_.size();
    bool ok = match(*r.members[0], pos, [&](std::size_t q) {
      if (q == pos) return false;
      const std::size_t inner = trail_.size();
      ChildRole role = roles_[pos];
      role.list = static_cast<int>(li);
      role.separator = false;
      set_role(pos, role);
      lists_[li].elements.push_back(pos);
      trail_.push_back({Undo::Element, li, {}});
      if (list(r, li, q, k, count + 1)) return true;
      undo_to(inner);
      return false;
    });
    if (!ok) undo_to(mark);
    return ok;
  }

  bool list(const RuleNode& r, std::size_t li, std::size_t pos, const Cont& k, std::size_t count = 0) {
    const ListShape& shape = r.shape;
    const bool separated = !shape.adjacency() && shape.trailing != ListShape::Trailing::Terminated;
    // Greedy: one more element first.
    {
      const std::size_t mark = trail_.size();
      if (shape.trailing == ListShape::Trailing::Terminated) {
        const std::size_t m2 = trail_.size();
        bool ok = match(*r.members[0], pos, [&](std::size_t q) {
          if (q == pos) return false;
          const std::size_t inner = trail_.size();
          ChildRole role = roles_[pos];
          role.list = static_cast<int>(li);
          set_role(pos, role);
          lists_[li].elements.push_back(pos);
          trail_.push_back({Undo::Element, li, {}});
          if (take_separator(li, q) && list(r, li, q + 1, k, count + 1)) return true;
          undo_to(inner);
          return false;
        });
        if (ok) return true;
        undo_to(m2);
      } else if (separated && count > 0) {
        if (take_separator(li, pos) && take_element(r, li, pos + 1, count, k)) return true;
      } else {
        if (take_element(r, li, pos, count, k)) return true;
      }
      undo_to(mark);
    }
    if (count < shape.min_elements) return false;
    if (separated && count > 0 && shape.trailing == ListShape::Trailing::Optional) {
      const std::size_t mark = trail_.size();
      if (take_separator(li, pos) && k(pos + 1)) return true;
      undo_to(mark);
    }
    return k(pos);
  }

  std::vector<std::string> kinds_;
  std::vector<ChildRole> roles_;
  std::vector<ListInstance> lists_;
  std::vector<TrailEntry> trail_;
};

}  // namespace

std::optional<RuleMatch> GrammarRules::match(const SyntaxTree& tree, NodeId id) const {
  const SyntaxNode& n = tree.node(id);
  auto it = normalized_.find(n.kind);
  if (it == normalized_.end() || n.is_leaf) return std::nullopt;
  RuleMatch out;
  out.children = tree.named_children(id);
  std::vector<std::string> kinds;
  for (NodeId c : out.children) {
    const SyntaxNode& child = tree.node(c);
    if (child.is_error) return std::nullopt;
    kinds.push_back(child.kind);
  }
  Matcher m(std::move(kinds));
  if (!m.run(*it->second)) return std::nullopt;
  out.roles = m.roles_out();
  out.lists = m.lists_out();
  return out;
}

}  // namespace trellis
