#include "tools/tool.hpp"

#include <algorithm>

namespace trellis {
namespace {

struct Matcher {
  const SyntaxTree& tree;
  const DefinitionList& all;
  int limit;
  std::map<std::string, std::string>* failures;
  std::set<std::string> broken;
  std::vector<ToolInstance> out;

  std::vector<const ToolDefinition*> scope_of(const std::optional<std::set<std::string>>& scope) const {
    std::vector<const ToolDefinition*> defs;
    for (const auto& d : all) {
      if (!scope || scope->count(d->id)) defs.push_back(d.get());
    }
    return defs;
  }

  void visit(NodeId id, const std::vector<const ToolDefinition*>& defs, int depth) {
    const SyntaxNode& n = tree.node(id);
    if (n.is_trivia) return;
    bool hidden = false;
    for (const ToolDefinition* def : defs) {
      if (broken.count(def->id)) continue;
      std::optional<Extraction> found;
      try {
        found = def->query(tree, id);
      } catch (const std::exception& e) {
        broken.insert(def->id);
        if (failures) failures->emplace(def->id, e.what());
        continue;
      }
      if (!found) continue;
      ToolInstance inst;
      inst.definition = def->id;
      inst.anchor = id;
      inst.extraction = std::move(*found);
      inst.depth = depth;
      for (const auto& b : def->fragment_bindings) {
        auto it = inst.extraction.nodes.find(b);
        if (it != inst.extraction.nodes.end()) inst.fragments.push_back({it->second});
      }
      if (def->display == DisplayType::Replace) hidden = true;
      auto fragments = inst.fragments;
      out.push_back(std::move(inst));
      if (depth + 1 > limit) continue;
      auto inner = scope_of(def->fragment_scope);
      for (const auto& f : fragments) {
        for (NodeId fn : f) visit(fn, inner, depth + 1);
      }
    }
    if (hidden) return;
    for (NodeId c : n.children) visit(c, defs, depth);
  }
};

}  // namespace

const char* display_type_name(DisplayType type) {
  switch (type) {
    case DisplayType::Replace: return "Replace";
    case DisplayType::InsertBefore: return "InsertBefore";
    case DisplayType::InsertAfter: return "InsertAfter";
    case DisplayType::Markup: return "Markup";
  }
  return "?";
}

DisplayType parse_display_type(std::string_view name) {
  for (auto t : {DisplayType::Replace, DisplayType::InsertBefore, DisplayType::InsertAfter, DisplayType::Markup}) {
    if (name == display_type_name(t)) return t;
  }
  throw Error(ErrorCode::BadRequest, "unknown display type " + std::string(name));
}

std::vector<ToolInstance> instantiate_tools(const SyntaxTree& tree, const DefinitionList& definitions,
                                            int recursion_limit, std::map<std::string, std::string>* failures) {
  Matcher m{tree, definitions, recursion_limit, failures, {}, {}};
  if (tree.root() != kNoNode && recursion_limit >= 0) m.visit(tree.root(), m.scope_of(std::nullopt), 0);
  return std::move(m.out);
}

ToolHost::ToolHost(DefinitionList definitions, int recursion_limit)
    : definitions_(std::move(definitions)), recursion_limit_(recursion_limit) {}

ToolHost::Update ToolHost::update(const SyntaxTree& tree, ConstraintRegistry& registry) {
  DefinitionList active;
  for (const auto& d : definitions_) {
    if (!disabled_.count(d->id)) active.push_back(d);
  }
  std::map<std::string, std::string> failures;
  std::vector<ToolInstance> fresh = instantiate_tools(tree, active, recursion_limit_, &failures);
  disabled_.merge(failures);

  Update result;
  std::map<std::tuple<std::string, NodeId, int>, InstanceId> keys;
  for (auto& inst : fresh) {
    auto key = std::make_tuple(inst.definition, inst.anchor, inst.depth);
    auto it = keys_.find(key);
    if (it != keys_.end()) {
      inst.id = it->second;
    } else {
      inst.id = next_id_++;
      result.created.push_back(inst.id);
    }
    keys.emplace(key, inst.id);
  }
  for (const auto& [key, id] : keys_) {
    if (!keys.count(key)) result.disposed.push_back(id);
  }
  for (const auto& old : instances_) registry.remove_owner(old.id);
  keys_ = std::move(keys);
  instances_ = std::move(fresh);
  for (const auto& inst : instances_) {
    const ToolDefinition& def = definition(inst.definition);
    if (!def.constraints) continue;
    for (auto& p : def.constraints(inst, tree)) registry.add(inst.id, std::move(p));
  }
  return result;
}

ToolHost::Update ToolHost::clear(ConstraintRegistry& registry) {
  Update result;
  for (const auto& inst : instances_) {
    registry.remove_owner(inst.id);
    result.disposed.push_back(inst.id);
  }
  instances_.clear();
  keys_.clear();
  return result;
}

const ToolInstance* ToolHost::find(InstanceId id) const {
  auto it = std::find_if(instances_.begin(), instances_.end(), [&](const ToolInstance& i) { return i.id == id; });
  return it == instances_.end() ? nullptr : &*it;
}

const ToolDefinition& ToolHost::definition(const std::string& id) const {
  for (const auto& d : definitions_) {
    if (d->id == id) return *d;
  }
  throw Error(ErrorCode::UnknownAction, "unknown tool definition " + id);
}

ChangeRequest ToolHost::dispatch(InstanceId id, const std::string& action, const nlohmann::json& payload,
                                 const ToolContext& context) const {
  const ToolInstance* inst = find(id);
  if (!inst) throw Error(ErrorCode::StaleInstance, "tool instance " + std::to_string(id) + " is not live");
  const ToolDefinition& def = definition(inst->definition);
  if (!def.actions.count(action) || !def.act) {
    throw Error(ErrorCode::UnknownAction, "tool " + def.id + " has no action " + action);
  }
  return def.act(*inst, action, payload, context);
}

nlohmann::json ToolHost::view(const ToolInstance& instance, const ToolContext& context) const {
  const ToolDefinition& def = definition(instance.definition);
  return def.view ? def.view(instance, context) : nlohmann::json::object();
}

}  // namespace trellis
