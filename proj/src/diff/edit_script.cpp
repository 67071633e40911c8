#include "diff/edit_script.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "syntax/language.hpp"

namespace trellis {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t mix(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xff;
  h *= kFnvPrime;
  return h;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

struct Indexed {
  std::vector<NodeId> pre;                        // preorder ids
  std::unordered_map<NodeId, std::size_t> index;  // id -> preorder position
  std::vector<std::size_t> size;                  // subtree size by position
  std::vector<std::uint64_t> hash;                // structural hash by position
};

Indexed index_tree(const SyntaxTree& t) {
  Indexed ix;
  ix.pre = t.preorder_ids();
  ix.index.reserve(ix.pre.size());
  for (std::size_t i = 0; i < ix.pre.size(); ++i) ix.index[ix.pre[i]] = i;
  ix.size.assign(ix.pre.size(), 1);
  ix.hash.assign(ix.pre.size(), 0);
  for (std::size_t i = ix.pre.size(); i-- > 0;) {
    const SyntaxNode& n = t.node(ix.pre[i]);
    std::uint64_t h = mix(kFnvOffset, n.kind);
    h = mix(h, static_cast<std::uint64_t>(n.is_leaf) | (static_cast<std::uint64_t>(n.is_error) << 1) |
                   (static_cast<std::uint64_t>(n.is_trivia) << 2));
    if (n.is_leaf) h = mix(h, n.text);
    for (NodeId c : n.children) {
      std::size_t ci = ix.index.at(c);
      h = mix(h, ix.hash[ci]);
      ix.size[i] += ix.size[ci];
    }
    ix.hash[i] = h;
  }
  return ix;
}

NodeBlueprint blueprint_of(const SyntaxNode& n) {
  return {n.kind, n.text, n.is_leaf, n.is_error, n.is_trivia, {}};
}

// Nearest free candidate by preorder distance; ties go to the leftmost.
std::optional<std::size_t> nearest(const std::set<std::size_t>& free, std::size_t target) {
  if (free.empty()) return std::nullopt;
  auto hi = free.lower_bound(target);
  if (hi == free.begin()) return *hi;
  auto lo = std::prev(hi);
  if (hi == free.end()) return *lo;
  return (target - *lo) <= (*hi - target) ? *lo : *hi;
}

// Positions of `seq` forming one longest increasing subsequence.
std::vector<std::size_t> longest_increasing(const std::vector<std::size_t>& seq) {
  std::vector<std::size_t> tails;  // index into seq
  std::vector<std::size_t> prev(seq.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto it = std::lower_bound(tails.begin(), tails.end(), seq[i],
                               [&](std::size_t t, std::size_t v) { return seq[t] < v; });
    if (it != tails.begin()) prev[i] = *std::prev(it);
    if (it == tails.end()) {
      tails.push_back(i);
    } else {
      *it = i;
    }
  }
  std::vector<std::size_t> out;
  if (tails.empty()) return out;
  for (std::size_t i = tails.back(); i != static_cast<std::size_t>(-1); i = prev[i]) out.push_back(i);
  std::reverse(out.begin(), out.end());
  return out;
}

void apply_op(SyntaxTree& tree, EditOp& op, bool record) {
  switch (op.type) {
    case EditOp::Type::Load: {
      SyntaxNode n;
      n.id = op.node;
      n.kind = op.blueprint.kind;
      n.text = op.blueprint.text;
      n.is_leaf = op.blueprint.is_leaf;
      n.is_error = op.blueprint.is_error;
      n.is_trivia = op.blueprint.is_trivia;
      tree.add_node(std::move(n));
      break;
    }
    case EditOp::Type::Attach: {
      auto& parent = tree.mutable_node(op.parent);
      auto& n = tree.mutable_node(op.node);
      if (n.parent != kNoNode || op.index > parent.children.size()) {
        throw Error(ErrorCode::StaleScript, "cannot attach node " + std::to_string(op.node));
      }
      parent.children.insert(parent.children.begin() + static_cast<std::ptrdiff_t>(op.index), op.node);
      n.parent = op.parent;
      break;
    }
    case EditOp::Type::Detach: {
      auto& n = tree.mutable_node(op.node);
      if (n.parent == kNoNode) throw Error(ErrorCode::StaleScript, "node already detached");
      auto& siblings = tree.mutable_node(n.parent).children;
      auto it = std::find(siblings.begin(), siblings.end(), op.node);
      if (record) {
        op.parent = n.parent;
        op.index = static_cast<std::size_t>(it - siblings.begin());
      }
      siblings.erase(it);
      n.parent = kNoNode;
      break;
    }
    case EditOp::Type::Remove: {
      const auto& n = tree.node(op.node);
      if (n.parent != kNoNode) throw Error(ErrorCode::StaleScript, "remove of attached node");
      if (record) {
        op.blueprint = blueprint_of(n);
        op.blueprint.children = n.children;
      }
      for (NodeId c : n.children) tree.mutable_node(c).parent = kNoNode;
      tree.erase_node(op.node);
      break;
    }
    case EditOp::Type::Update: {
      auto& n = tree.mutable_node(op.node);
      if (!n.is_leaf) throw Error(ErrorCode::StaleScript, "update of inner node");
      if (record) op.old_text = n.text;
      n.text = op.new_text;
      break;
    }
  }
}

void invert_op(SyntaxTree& tree, const EditOp& op) {
  switch (op.type) {
    case EditOp::Type::Load: {
      const auto& n = tree.node(op.node);
      if (n.parent != kNoNode || !n.children.empty()) throw Error(ErrorCode::InvalidRollback, "loaded node in use");
      tree.erase_node(op.node);
      break;
    }
    case EditOp::Type::Attach: {
      auto& siblings = tree.mutable_node(op.parent).children;
      if (op.index >= siblings.size() || siblings[op.index] != op.node) {
        throw Error(ErrorCode::InvalidRollback, "attach position changed");
      }
      siblings.erase(siblings.begin() + static_cast<std::ptrdiff_t>(op.index));
      tree.mutable_node(op.node).parent = kNoNode;
      break;
    }
    case EditOp::Type::Detach: {
      auto& siblings = tree.mutable_node(op.parent).children;
      siblings.insert(siblings.begin() + static_cast<std::ptrdiff_t>(op.index), op.node);
      tree.mutable_node(op.node).parent = op.parent;
      break;
    }
    case EditOp::Type::Remove: {
      SyntaxNode n;
      n.id = op.node;
      n.kind = op.blueprint.kind;
      n.text = op.blueprint.text;
      n.is_leaf = op.blueprint.is_leaf;
      n.is_error = op.blueprint.is_error;
      n.is_trivia = op.blueprint.is_trivia;
      n.children = op.blueprint.children;
      tree.add_node(std::move(n));
      for (NodeId c : op.blueprint.children) tree.mutable_node(c).parent = op.node;
      break;
    }
    case EditOp::Type::Update:
      tree.mutable_node(op.node).text = op.old_text;
      break;
  }
}

}  // namespace

const char* op_name(EditOp::Type type) {
  switch (type) {
    case EditOp::Type::Load: return "LOAD";
    case EditOp::Type::Attach: return "ATTACH";
    case EditOp::Type::Detach: return "DETACH";
    case EditOp::Type::Remove: return "REMOVE";
    case EditOp::Type::Update: return "UPDATE";
  }
  return "?";
}

std::uint64_t fingerprint(std::string_view text) { return mix(kFnvOffset, text); }

std::size_t EditScript::count(EditOp::Type type) const {
  return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [&](const EditOp& o) { return o.type == type; }));
}

bool EditScript::touches(EditOp::Type type, NodeId node) const {
  return std::any_of(ops.begin(), ops.end(), [&](const EditOp& o) { return o.type == type && o.node == node; });
}

EditScript compute_edit_script(const SyntaxTree& tree, std::string_view new_text, IdAllocator& ids) {
  return diff_trees(tree, parse_document(new_text, tree.language_id(), ids));
}

EditScript diff_trees(const SyntaxTree& old, const SyntaxTree& fresh) {
  EditScript script;
  script.source_version = old.version();
  script.target_version = old.version();
  script.target_fingerprint = fingerprint(fresh.text());
  if (!fresh.text().empty()) {
    NodeId n = fresh.root();
    for (auto kids = fresh.named_children(n); kids.size() == 1; kids = fresh.named_children(n)) n = kids.front();
    script.degenerate = n != fresh.root() && fresh.node(n).is_error &&
                        fresh.node(n).range.size() == fresh.text().size();
  }

  const Indexed ox = index_tree(old);
  const Indexed nx = index_tree(fresh);
  if (ox.hash[0] == nx.hash[0]) return script;

  const std::size_t no = ox.pre.size();
  const std::size_t nn = nx.pre.size();
  std::vector<std::size_t> new_to_old(nn, static_cast<std::size_t>(-1));
  std::vector<std::size_t> old_to_new(no, static_cast<std::size_t>(-1));
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::unordered_map<std::uint64_t, std::set<std::size_t>> by_hash;
  for (std::size_t i = 1; i < no; ++i) by_hash[ox.hash[i]].insert(i);
  auto pair = [&](std::size_t o, std::size_t n) {
    old_to_new[o] = n;
    new_to_old[n] = o;
    auto it = by_hash.find(ox.hash[o]);
    if (it != by_hash.end()) it->second.erase(o);
  };
  pair(0, 0);

  // Pass 1: identical subtrees, largest first.
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i < nn; ++i) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nx.size[a] > nx.size[b]; });
  for (std::size_t v : order) {
    if (new_to_old[v] != kNone) continue;
    auto it = by_hash.find(nx.hash[v]);
    if (it == by_hash.end()) continue;
    auto u = nearest(it->second, v);
    if (!u) continue;
    for (std::size_t k = 0; k < nx.size[v]; ++k) pair(*u + k, v + k);
  }

  // Pass 2: same kind, nearest preorder position.
  std::map<std::tuple<std::string, bool, bool>, std::set<std::size_t>> by_kind;
  for (std::size_t i = 1; i < no; ++i) {
    if (old_to_new[i] != kNone) continue;
    const auto& n = old.node(ox.pre[i]);
    by_kind[{n.kind, n.is_leaf, n.is_trivia}].insert(i);
  }
  for (std::size_t v = 1; v < nn; ++v) {
    if (new_to_old[v] != kNone) continue;
    const auto& n = fresh.node(nx.pre[v]);
    auto it = by_kind.find({n.kind, n.is_leaf, n.is_trivia});
    if (it == by_kind.end()) continue;
    auto u = nearest(it->second, v);
    if (!u) continue;
    it->second.erase(*u);
    old_to_new[*u] = v;
    new_to_old[v] = *u;
  }

  // Final id of every new node.
  std::unordered_map<NodeId, NodeId> final_id;
  for (std::size_t v = 0; v < nn; ++v) {
    final_id[nx.pre[v]] = new_to_old[v] != kNone ? ox.pre[new_to_old[v]] : nx.pre[v];
  }

  // Kept children that stay in place: an increasing subsequence per parent.
  std::unordered_set<NodeId> stays;
  for (std::size_t o = 0; o < no; ++o) {
    if (old_to_new[o] == kNone || old.node(ox.pre[o]).is_leaf) continue;
    const NodeId pid = ox.pre[o];
    const SyntaxNode& new_parent = fresh.node(nx.pre[old_to_new[o]]);
    std::unordered_map<NodeId, std::size_t> old_pos;
    const auto& old_children = old.node(pid).children;
    for (std::size_t i = 0; i < old_children.size(); ++i) old_pos[old_children[i]] = i;
    std::vector<NodeId> ids;
    std::vector<std::size_t> seq;
    for (NodeId c : new_parent.children) {
      NodeId fid = final_id.at(c);
      auto it = old_pos.find(fid);
      if (it == old_pos.end()) continue;
      ids.push_back(fid);
      seq.push_back(it->second);
    }
    for (std::size_t i : longest_increasing(seq)) stays.insert(ids[i]);
  }

  SyntaxTree work = old;
  auto emit = [&](EditOp op) {
    apply_op(work, op, true);
    script.ops.push_back(std::move(op));
  };

  for (std::size_t o = 1; o < no; ++o) {
    const NodeId id = ox.pre[o];
    const bool kept = old_to_new[o] != kNone;
    const NodeId parent = old.node(id).parent;
    const bool parent_kept = old_to_new[ox.index.at(parent)] != kNone;
    if (kept ? !stays.count(id) : parent_kept) {
      EditOp op;
      op.type = EditOp::Type::Detach;
      op.node = id;
      emit(std::move(op));
    }
  }
  for (std::size_t o = 1; o < no; ++o) {
    if (old_to_new[o] == kNone) continue;
    const SyntaxNode& a = old.node(ox.pre[o]);
    const SyntaxNode& b = fresh.node(nx.pre[old_to_new[o]]);
    if (a.is_leaf && a.text != b.text) {
      EditOp op;
      op.type = EditOp::Type::Update;
      op.node = a.id;
      op.new_text = b.text;
      emit(std::move(op));
    }
  }
  for (std::size_t o = 1; o < no; ++o) {
    if (old_to_new[o] != kNone) continue;
    EditOp op;
    op.type = EditOp::Type::Remove;
    op.node = ox.pre[o];
    emit(std::move(op));
  }
  for (std::size_t v = 1; v < nn; ++v) {
    if (new_to_old[v] != kNone) continue;
    EditOp op;
    op.type = EditOp::Type::Load;
    op.node = nx.pre[v];
    op.blueprint = blueprint_of(fresh.node(nx.pre[v]));
    emit(std::move(op));
  }
  for (std::size_t v = 1; v < nn; ++v) {
    const NodeId fid = final_id.at(nx.pre[v]);
    if (new_to_old[v] != kNone && stays.count(fid)) continue;
    const SyntaxNode& n = fresh.node(nx.pre[v]);
    const auto& siblings = fresh.node(n.parent).children;
    EditOp op;
    op.type = EditOp::Type::Attach;
    op.node = fid;
    op.parent = final_id.at(n.parent);
    op.index = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), n.id) - siblings.begin());
    emit(std::move(op));
  }
  if (!script.ops.empty()) script.target_version = old.version() + 1;
  return script;
}

void apply_in_place(SyntaxTree& tree, const EditScript& script) {
  if (tree.version() != script.source_version) {
    throw Error(ErrorCode::StaleScript, "script computed for version " + std::to_string(script.source_version) +
                                            ", tree is at " + std::to_string(tree.version()));
  }
  if (script.empty()) return;
  for (const EditOp& op : script.ops) {
    EditOp copy = op;
    apply_op(tree, copy, false);
  }
  tree.finalize();
  tree.set_version(script.target_version);
}

SyntaxTree apply_edit_script(const SyntaxTree& tree, const EditScript& script) {
  SyntaxTree out = tree;
  apply_in_place(out, script);
  return out;
}

void rollback_in_place(SyntaxTree& tree, const EditScript& script) {
  if (script.empty()) return;
  if (tree.version() != script.target_version || fingerprint(tree.text()) != script.target_fingerprint) {
    throw Error(ErrorCode::InvalidRollback, "script is not the last one applied to this tree");
  }
  for (auto it = script.ops.rbegin(); it != script.ops.rend(); ++it) invert_op(tree, *it);
  tree.finalize();
  tree.set_version(script.source_version);
}

SyntaxTree rollback(const SyntaxTree& tree, const EditScript& script) {
  SyntaxTree out = tree;
  rollback_in_place(out, script);
  return out;
}

std::string to_trace(const EditScript& script) {
  std::string out;
  auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
  for (const auto& op : script.ops) {
    out += op_name(op.type);
    out += ' ';
    out += std::to_string(op.node);
    switch (op.type) {
      case EditOp::Type::Load:
        out += ' ' + op.blueprint.kind + ' ' + quoted(op.blueprint.text);
        break;
      case EditOp::Type::Attach:
        out += ' ' + std::to_string(op.parent) + ' ' + std::to_string(op.index);
        break;
      case EditOp::Type::Update:
        out += ' ' + quoted(op.old_text) + ' ' + quoted(op.new_text);
        break;
      default:
        break;
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const EditScript& script) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : script.ops) {
    nlohmann::json j = {{"op", op_name(op.type)}, {"node", op.node}};
    switch (op.type) {
      case EditOp::Type::Load:
        j["kind"] = op.blueprint.kind;
        if (op.blueprint.is_leaf) j["text"] = op.blueprint.text;
        break;
      case EditOp::Type::Attach:
        j["parent"] = op.parent;
        j["index"] = op.index;
        break;
      case EditOp::Type::Update:
        j["old"] = op.old_text;
        j["new"] = op.new_text;
        break;
      default:
        break;
    }
    ops.push_back(std::move(j));
  }
  return {{"sourceVersion", script.source_version},
          {"targetVersion", script.target_version},
          {"degenerate", script.degenerate},
          {"ops", std::move(ops)}};
}

}  // namespace trellis
