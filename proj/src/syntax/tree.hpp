#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "syntax/text.hpp"

namespace trellis {

using NodeId = std::uint64_t;
inline constexpr NodeId kNoNode = 0;

/// Per-document id source. Ids start at 1 and are never reused.
class IdAllocator {
 public:
  NodeId next() { return ++last_; }
  NodeId last() const { return last_; }

 private:
  NodeId last_ = 0;
};

struct SyntaxNode {
  NodeId id = kNoNode;
  std::string kind;
  TextRange range;
  std::string text;  // leaves only
  bool is_leaf = false;
  bool is_error = false;
  // Whitespace and comments. Kept in the tree so leaves reproduce the text.
  bool is_trivia = false;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
};

/// A parsed document. Copying yields an independent snapshot.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(std::string language_id, NodeId root) : language_id_(std::move(language_id)), root_(root) {}

  const std::string& language_id() const { return language_id_; }
  NodeId root() const { return root_; }
  std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t v) { version_ = v; }

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  const SyntaxNode& node(NodeId id) const;
  SyntaxNode& mutable_node(NodeId id);
  const SyntaxNode* find(NodeId id) const;

  // Children excluding trivia.
  std::vector<NodeId> named_children(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  const std::string& text() const { return text_; }
  // Source text of a node (document substring at its range).
  std::string_view source(NodeId id) const;

  // Preorder traversal over attached nodes starting at `from` (root by default).
  void preorder(const std::function<void(const SyntaxNode&)>& visit, NodeId from = kNoNode) const;
  std::vector<NodeId> preorder_ids(NodeId from = kNoNode) const;
  std::vector<NodeId> leaves(NodeId from = kNoNode) const;

  // True when `ancestor` is `id` or one of its ancestors.
  bool is_ancestor_or_self(NodeId ancestor, NodeId id) const;

  // Node storage primitives used by the parser and the edit-script engine.
  SyntaxNode& add_node(SyntaxNode node);
  void erase_node(NodeId id);
  void set_root(NodeId id) { root_ = id; }

  // Recomputes ranges and the cached text from the leaves.
  void finalize();

  bool has_errors() const;

  const std::unordered_map<NodeId, SyntaxNode>& nodes() const { return nodes_; }

 private:
  std::string language_id_;
  NodeId root_ = kNoNode;
  std::uint64_t version_ = 0;
  std::unordered_map<NodeId, SyntaxNode> nodes_;
  std::string text_;
};

// Kinds, leaf texts and child order; ids ignored.
bool structurally_equal(const SyntaxTree& a, NodeId an, const SyntaxTree& b, NodeId bn,
                        bool ignore_trivia = false);
bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b);
// Structural equality plus identical ids everywhere.
bool identical(const SyntaxTree& a, const SyntaxTree& b);

// Deepest node whose range contains `range`. Zero-width queries prefer the
// node starting at the offset over the node ending there. Trivia are skipped.
NodeId smallest_node_containing(const SyntaxTree& tree, TextRange range);

// Debug form: (kind "text" ...) with ids when requested.
std::string to_sexp(const SyntaxTree& tree, NodeId from = kNoNode, bool with_ids = false);

}  // namespace trellis
