#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "syntax/language.hpp"
#include "syntax/template.hpp"
#include "transaction/session_state.hpp"

namespace trellis {

enum class DisplayType { Replace, InsertBefore, InsertAfter, Markup };
const char* display_type_name(DisplayType type);
DisplayType parse_display_type(std::string_view name);

/// What a query pulled out of a matched node.
struct Extraction {
  Bindings nodes;
  std::map<std::string, nlohmann::json> scalars;

  friend bool operator==(const Extraction&, const Extraction&) = default;
};

using InstanceId = std::uint64_t;

struct ToolInstance {
  InstanceId id = 0;
  std::string definition;
  NodeId anchor = kNoNode;
  Extraction extraction;
  int depth = 0;
  // Node lists shown as nested editors, one per fragment binding.
  std::vector<std::vector<NodeId>> fragments;
};

/// Read access the view and action callbacks get.
struct ToolContext {
  const SyntaxTree& tree;
  const Language& language;
  // Last runtime value observed for a node, if any.
  std::function<std::optional<nlohmann::json>(NodeId)> last_value;
};

struct ToolDefinition {
  std::string id;
  DisplayType display = DisplayType::Replace;
  // Pure. nullopt is no match.
  std::function<std::optional<Extraction>(const SyntaxTree&, NodeId)> query;
  // Predicates bound to one instance; registered while it lives.
  std::function<std::vector<ConstraintPredicate>(const ToolInstance&, const SyntaxTree&)> constraints;
  // Renderer-agnostic widget tree. References actions by id only.
  std::function<nlohmann::json(const ToolInstance&, const ToolContext&)> view;
  std::set<std::string> actions;
  std::function<ChangeRequest(const ToolInstance&, const std::string& action, const nlohmann::json& payload,
                              const ToolContext&)>
      act;
  // Bindings whose nodes become fragments, and bindings whose runtime values are streamed.
  std::vector<std::string> fragment_bindings;
  std::vector<std::string> stream_bindings;
  // Definitions active inside this tool's fragments; nullopt means all.
  std::optional<std::set<std::string>> fragment_scope;
};

using DefinitionList = std::vector<std::shared_ptr<const ToolDefinition>>;

inline constexpr int kDefaultRecursionLimit = 16;

// Pure matching. Root scope covers the whole tree except the inside of
// Replace anchors, which are visible only through their fragments. Instances
// come out in discovery order with id 0.
std::vector<ToolInstance> instantiate_tools(const SyntaxTree& tree, const DefinitionList& definitions,
                                            int recursion_limit = kDefaultRecursionLimit,
                                            std::map<std::string, std::string>* failures = nullptr);

/// Live instances of one session, with stable ids and constraint wiring.
class ToolHost {
 public:
  explicit ToolHost(DefinitionList definitions, int recursion_limit = kDefaultRecursionLimit);

  struct Update {
    std::vector<InstanceId> created;
    std::vector<InstanceId> disposed;
  };

  // Re-runs matching. Instances keyed by (definition, anchor, depth) keep
  // their id; constraints follow the instance lifecycle.
  Update update(const SyntaxTree& tree, ConstraintRegistry& registry);
  // Disposes every instance.
  Update clear(ConstraintRegistry& registry);

  const std::vector<ToolInstance>& instances() const { return instances_; }
  const ToolInstance* find(InstanceId id) const;
  const ToolDefinition& definition(const std::string& id) const;
  const DefinitionList& definitions() const { return definitions_; }

  // Throws StaleInstance or UnknownAction.
  ChangeRequest dispatch(InstanceId id, const std::string& action, const nlohmann::json& payload,
                         const ToolContext& context) const;
  nlohmann::json view(const ToolInstance& instance, const ToolContext& context) const;

  // Definitions disabled after their query threw, with the message.
  const std::map<std::string, std::string>& disabled() const { return disabled_; }

 private:
  DefinitionList definitions_;
  int recursion_limit_;
  std::vector<ToolInstance> instances_;
  std::map<std::tuple<std::string, NodeId, int>, InstanceId> keys_;
  InstanceId next_id_ = 1;
  std::map<std::string, std::string> disabled_;
};

}  // namespace trellis
