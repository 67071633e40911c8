#pragma once

#include <string>
#include <string_view>

#include "syntax/language.hpp"
#include "syntax/tree.hpp"

namespace trellis::testing {

std::string read_fixture(std::string_view name);

// Concatenated leaf texts in preorder.
std::string leaf_text(const SyntaxTree& tree);

struct Parsed {
  IdAllocator ids;
  SyntaxTree tree;
};

Parsed parse(std::string_view text, std::string_view language_id);

// Every node whose kind is `kind`, in preorder.
std::vector<NodeId> nodes_of_kind(const SyntaxTree& tree, std::string_view kind);
// First node in preorder with this kind and exact source text.
NodeId find_node(const SyntaxTree& tree, std::string_view kind, std::string_view source);

}  // namespace trellis::testing
