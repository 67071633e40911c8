#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "syntax/tree.hpp"

namespace trellis {

/// Shape of a recognised repetition.
struct ListShape {
  enum class Trailing { None, Optional, Terminated };

  std::string separator;  // empty for adjacency lists
  Trailing trailing = Trailing::None;
  std::size_t min_elements = 0;

  bool adjacency() const { return separator.empty(); }
};

// Normalised rule. Hidden and supertype symbols are inlined.
struct RuleNode {
  enum class Type { Seq, Choice, Blank, Terminal, List, Repeat };

  Type type = Type::Blank;
  std::set<std::string> kinds;  // Terminal: accepted child kinds
  std::vector<std::shared_ptr<const RuleNode>> members;  // Seq/Choice; List/Repeat: [element]
  ListShape shape;  // List only
};

struct ListInstance {
  ListShape shape;
  std::vector<std::size_t> elements;    // indices into RuleMatch::children
  std::vector<std::size_t> separators;  // indices into RuleMatch::children
  // Child index after which the list starts; npos when it starts the node.
  std::size_t after = static_cast<std::size_t>(-1);
};

struct ChildRole {
  int list = -1;  // index into RuleMatch::lists
  bool separator = false;
  // Innermost optional branch that consumed this child: [first, last].
  int optional_first = -1;
  int optional_last = -1;
};

/// Alignment of a node's significant children with its grammar rule.
struct RuleMatch {
  std::vector<NodeId> children;  // non-trivia children
  std::vector<ChildRole> roles;
  std::vector<ListInstance> lists;

  // List containing child `i` as element or separator, if any.
  const ListInstance* list_of(std::size_t i) const {
    return roles[i].list < 0 ? nullptr : &lists[static_cast<std::size_t>(roles[i].list)];
  }
};

/// Machine-readable grammar (tree-sitter grammar.json layout), normalised
/// for list detection and child alignment.
class GrammarRules {
 public:
  static std::shared_ptr<const GrammarRules> from_json(const nlohmann::json& grammar);

  const std::string& name() const { return name_; }
  bool has_rule(std::string_view kind) const { return normalized_.count(std::string(kind)) != 0; }

  // Null when the node's kind has no rule or the children do not fit it.
  std::optional<RuleMatch> match(const SyntaxTree& tree, NodeId node) const;

  // Kinds accepted inside `parenthesized_expression`; empty if the grammar has none.
  const std::set<std::string>& parenthesizable_kinds() const { return parenthesizable_; }

 private:
  std::shared_ptr<const RuleNode> normalize(const nlohmann::json& rule, int depth);
  std::shared_ptr<const RuleNode> symbol(const std::string& name, int depth);

  std::string name_;
  nlohmann::json rules_;
  std::set<std::string> hidden_;
  std::map<std::string, std::shared_ptr<const RuleNode>> normalized_;
  std::map<std::string, std::shared_ptr<const RuleNode>> inlined_;
  std::set<std::string> parenthesizable_;
};

// Separator of a raw repetition rule: "S" for `A ("S" A)*`, its optional
// form, the trailing-separator form and the terminated form `(A "S")*`;
// "" for plain repetition. Throws NoHeuristic otherwise.
std::string detect_separator(const nlohmann::json& rule);

/// Per-grammar exceptions to the list heuristics.
struct ExceptionTable {
  // Rule names whose single remaining element keeps its trailing separator.
  std::set<std::string> keep_single_trailing_separator;

  static ExceptionTable from_json(const nlohmann::json& table);
};

}  // namespace trellis
