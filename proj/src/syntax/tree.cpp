#include "syntax/tree.hpp"

#include <sstream>

namespace trellis {

const SyntaxNode& SyntaxTree::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::UnknownNode, "no node with id " + std::to_string(id));
  return it->second;
}

SyntaxNode& SyntaxTree::mutable_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::UnknownNode, "no node with id " + std::to_string(id));
  return it->second;
}

const SyntaxNode* SyntaxTree::find(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<NodeId> SyntaxTree::named_children(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId c : node(id).children) {
    if (!node(c).is_trivia) out.push_back(c);
  }
  return out;
}

std::string_view SyntaxTree::source(NodeId id) const {
  const auto& n = node(id);
  return std::string_view(text_).substr(n.range.from, n.range.size());
}

void SyntaxTree::preorder(const std::function<void(const SyntaxNode&)>& visit, NodeId from) const {
  if (from == kNoNode) from = root_;
  if (from == kNoNode) return;
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const auto& n = node(id);
    visit(n);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
}

std::vector<NodeId> SyntaxTree::preorder_ids(NodeId from) const {
  std::vector<NodeId> out;
  preorder([&](const SyntaxNode& n) { out.push_back(n.id); }, from);
  return out;
}

std::vector<NodeId> SyntaxTree::leaves(NodeId from) const {
  std::vector<NodeId> out;
  preorder([&](const SyntaxNode& n) {
    if (n.is_leaf) out.push_back(n.id);
  }, from);
  return out;
}

bool SyntaxTree::is_ancestor_or_self(NodeId ancestor, NodeId id) const {
  while (id != kNoNode) {
    if (id == ancestor) return true;
    const auto* n = find(id);
    if (!n) return false;
    id = n->parent;
  }
  return false;
}

SyntaxNode& SyntaxTree::add_node(SyntaxNode node) {
  NodeId id = node.id;
  auto [it, inserted] = nodes_.emplace(id, std::move(node));
  if (!inserted) throw Error(ErrorCode::UnknownNode, "duplicate node id " + std::to_string(id));
  return it->second;
}

void SyntaxTree::erase_node(NodeId id) { nodes_.erase(id); }

void SyntaxTree::finalize() {
  text_.clear();
  if (root_ == kNoNode) return;
  // Iterative post-order so deep trees do not exhaust the stack.
  struct Frame {
    NodeId id;
    std::size_t next_child;
  };
  std::vector<Frame> stack{{root_, 0}};
  auto& root = mutable_node(root_);
  root.range.from = 0;
  while (!stack.empty()) {
    auto& frame = stack.back();
    auto& n = mutable_node(frame.id);
    if (frame.next_child == 0) n.range.from = text_.size();
    if (n.is_leaf) {
      text_ += n.text;
      n.range.to = text_.size();
      stack.pop_back();
      continue;
    }
    if (frame.next_child < n.children.size()) {
      NodeId child = n.children[frame.next_child++];
      stack.push_back({child, 0});
      continue;
    }
    n.range.to = text_.size();
    stack.pop_back();
  }
}

bool SyntaxTree::has_errors() const {
  for (const auto& [id, n] : nodes_) {
    if (n.is_error) return true;
  }
  return false;
}

bool structurally_equal(const SyntaxTree& a, NodeId an, const SyntaxTree& b, NodeId bn,
                        bool ignore_trivia) {
  const auto& x = a.node(an);
  const auto& y = b.node(bn);
  if (x.kind != y.kind || x.is_leaf != y.is_leaf || x.is_error != y.is_error) return false;
  if (x.is_leaf) return x.text == y.text;
  auto xs = ignore_trivia ? a.named_children(an) : x.children;
  auto ys = ignore_trivia ? b.named_children(bn) : y.children;
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!structurally_equal(a, xs[i], b, ys[i], ignore_trivia)) return false;
  }
  return true;
}

bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b) {
  if (a.root() == kNoNode || b.root() == kNoNode) return a.root() == b.root();
  return structurally_equal(a, a.root(), b, b.root());
}

bool identical(const SyntaxTree& a, const SyntaxTree& b) {
  if (!structurally_equal(a, b)) return false;
  auto ia = a.preorder_ids();
  auto ib = b.preorder_ids();
  if (ia != ib) return false;
  return a.node_count() == b.node_count();
}

NodeId smallest_node_containing(const SyntaxTree& tree, TextRange range) {
  NodeId current = tree.root();
  const bool zero_width = range.empty();
  for (;;) {
    NodeId next = kNoNode;
    NodeId ending_here = kNoNode;
    for (NodeId c : tree.node(current).children) {
      const auto& child = tree.node(c);
      if (child.is_trivia || child.range.empty()) continue;
      if (zero_width) {
        if (child.range.from <= range.from && range.from < child.range.to) {
          next = c;
          break;
        }
        if (child.range.to == range.from) ending_here = c;
      } else if (child.range.contains(range)) {
        next = c;
        break;
      }
    }
    if (next == kNoNode) next = ending_here;
    if (next == kNoNode) return current;
    current = next;
  }
}

namespace {

void write_quoted(std::ostringstream& out, std::string_view s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      default: out << c;
    }
  }
  out << '"';
}

void write_sexp(const SyntaxTree& tree, NodeId id, bool with_ids, std::ostringstream& out) {
  const auto& n = tree.node(id);
  if (n.is_trivia) return;
  out << '(' << n.kind;
  if (with_ids) out << '#' << n.id;
  if (n.is_leaf) {
    out << ' ';
    write_quoted(out, n.text);
  }
  for (NodeId c : n.children) {
    if (tree.node(c).is_trivia) continue;
    out << ' ';
    write_sexp(tree, c, with_ids, out);
  }
  out << ')';
}

}  // namespace

std::string to_sexp(const SyntaxTree& tree, NodeId from, bool with_ids) {
  if (from == kNoNode) from = tree.root();
  std::ostringstream out;
  write_sexp(tree, from, with_ids, out);
  return out.str();
}

}  // namespace trellis
