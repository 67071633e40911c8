#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edit/grammar_rules.hpp"
#include "syntax/language.hpp"
#include "syntax/tree.hpp"

namespace trellis {

struct ListInfo {
  bool in_list = false;
  std::string separator;
};

/// The three per-grammar capabilities the edit operations rely on.
class GrammarAdapter {
 public:
  explicit GrammarAdapter(const Language& language) : language_(&language) {}

  const Language& language() const { return *language_; }

  // Whether `node` is an element of a list in its parent, and that list's separator.
  ListInfo list_info(const SyntaxTree& tree, NodeId node) const;
  // Offset where the first element goes when `list_node`'s list is empty.
  // Throws NotAList when the node has no list.
  std::size_t first_insert_position(const SyntaxTree& tree, NodeId list_node) const;
  bool parenthesizable(const SyntaxTree& tree, NodeId node) const;

 private:
  const Language* language_;
};

// Picks one of several lists in a node. Receives the match, returns a list index.
using ListSelector = std::function<std::size_t(const RuleMatch&)>;

struct StructuredEditRequest {
  enum class Op { Insert, Delete, ReplaceWith, WrapWith };

  Op op = Op::Insert;
  NodeId target = kNoNode;
  std::string text;  // Insert, ReplaceWith
  std::size_t index = 0;  // Insert
  std::string prefix;  // WrapWith
  std::string suffix;
  std::vector<NodeId> intent_delete_nodes;
  bool require_continue_input = false;
};

struct PlannedEdit {
  std::vector<TextChange> changes;  // in application order
  bool parenthesized = false;  // the probe needed parentheses
};

// All planners read `tree.text()` and never modify anything. A planned edit
// is routed through the transaction engine like any other change.
PlannedEdit plan_insert(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view text,
                        std::size_t index, const ListSelector& select = {});
PlannedEdit plan_delete(const SyntaxTree& tree, const Language& lang, NodeId target);
PlannedEdit plan_replace(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view text);
PlannedEdit plan_wrap(const SyntaxTree& tree, const Language& lang, NodeId target, std::string_view prefix,
                      std::string_view suffix);

PlannedEdit plan(const SyntaxTree& tree, const Language& lang, const StructuredEditRequest& request);

// Outermost non-trivia node whose range is exactly `range`; kNoNode if none.
NodeId node_at_range(const SyntaxTree& tree, TextRange range);

}  // namespace trellis
