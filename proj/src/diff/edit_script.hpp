#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "syntax/tree.hpp"

namespace trellis {

struct NodeBlueprint {
  std::string kind;
  std::string text;
  bool is_leaf = false;
  bool is_error = false;
  bool is_trivia = false;
  std::vector<NodeId> children;  // Remove only: children orphaned by the removal
};

struct EditOp {
  enum class Type { Load, Attach, Detach, Remove, Update };

  Type type = Type::Load;
  NodeId node = kNoNode;
  NodeBlueprint blueprint;  // Load: new node; Remove: removed node
  NodeId parent = kNoNode;  // Attach: target; Detach: origin
  std::size_t index = 0;
  std::string old_text;  // Update
  std::string new_text;
};

const char* op_name(EditOp::Type type);

struct EditScript {
  std::vector<EditOp> ops;
  std::uint64_t source_version = 0;
  std::uint64_t target_version = 0;
  // New root holds a single error node spanning the text.
  bool degenerate = false;
  std::uint64_t target_fingerprint = 0;

  bool empty() const { return ops.empty(); }
  std::size_t count(EditOp::Type type) const;
  // Ops of `type` touching `node`.
  bool touches(EditOp::Type type, NodeId node) const;
};

// Parses `new_text` with ids from `ids` and diffs it against `tree`.
EditScript compute_edit_script(const SyntaxTree& tree, std::string_view new_text, IdAllocator& ids);
// Diff against an already parsed target tree.
EditScript diff_trees(const SyntaxTree& tree, const SyntaxTree& target);

// Throws StaleScript when the tree version differs from the script's source.
SyntaxTree apply_edit_script(const SyntaxTree& tree, const EditScript& script);
void apply_in_place(SyntaxTree& tree, const EditScript& script);

// Throws InvalidRollback unless `tree` is the result of applying `script`.
SyntaxTree rollback(const SyntaxTree& tree, const EditScript& script);
void rollback_in_place(SyntaxTree& tree, const EditScript& script);

// One op per line: LOAD id kind "text", ATTACH id parent index, DETACH id,
// REMOVE id, UPDATE id "old" "new".
std::string to_trace(const EditScript& script);
nlohmann::json to_json(const EditScript& script);

std::uint64_t fingerprint(std::string_view text);

}  // namespace trellis
