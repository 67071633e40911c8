#include "support/fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trellis::testing {

std::string read_fixture(std::string_view name) {
  std::ifstream in(std::string(TRELLIS_FIXTURE_DIR) + "/" + std::string(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + std::string(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string leaf_text(const SyntaxTree& tree) {
  std::string out;
  for (NodeId id : tree.leaves()) out += tree.node(id).text;
  return out;
}

Parsed parse(std::string_view text, std::string_view language_id) {
  Parsed p;
  p.tree = parse_document(text, language_id, p.ids);
  return p;
}

std::vector<NodeId> nodes_of_kind(const SyntaxTree& tree, std::string_view kind) {
  std::vector<NodeId> out;
  tree.preorder([&](const SyntaxNode& n) {
    if (n.kind == kind) out.push_back(n.id);
  });
  return out;
}

NodeId find_node(const SyntaxTree& tree, std::string_view kind, std::string_view source) {
  for (NodeId id : nodes_of_kind(tree, kind)) {
    if (tree.source(id) == source) return id;
  }
  return kNoNode;
}

}  // namespace trellis::testing
