#include "service/document_session.hpp"

#include <algorithm>

#include "instrument/rewrite.hpp"

namespace trellis {

namespace {

DefinitionList definitions_for(const std::string& language_id, const SessionOptions& options) {
  ToolOptions tool_options{options.toplevel_guard};
  if (options.manifest) return load_tools(*options.manifest, language_id, tool_options);
  return bundled_tools(language_id, tool_options);
}

}  // namespace

DocumentSession::DocumentSession(std::string language_id, std::string text, SessionOptions options,
                                 std::shared_ptr<ValueHub> hub)
    : language_(&language(language_id)),
      options_(std::move(options)),
      state_(language_->id, std::move(text)),
      tools_(definitions_for(language_->id, options_), options_.recursion_limit),
      hub_(hub ? std::move(hub) : std::make_shared<ValueHub>()) {
  sync_tools();
}

ToolContext DocumentSession::context() const {
  auto hub = hub_;
  return {state_.tree(), *language_, [hub](NodeId id) { return hub->last(id); }};
}

void DocumentSession::sync_tools() {
  tools_.update(state_.tree(), state_.constraints());
  for (const auto& inst : tools_.instances()) {
    const auto& def = tools_.definition(inst.definition);
    for (const auto& b : def.stream_bindings) {
      auto it = inst.extraction.nodes.find(b);
      if (it != inst.extraction.nodes.end()) hub_->add_known(it->second);
    }
  }
  sync_fragments();
}

void DocumentSession::sync_fragments() {
  std::set<InstanceId> live;
  for (const auto& inst : tools_.instances()) {
    live.insert(inst.id);
    auto& owned = instance_fragments_[inst.id];
    bool same = owned.size() == inst.fragments.size();
    for (std::size_t i = 0; same && i < owned.size(); ++i) {
      same = owned[i].second == inst.fragments[i] && fragments_.find(owned[i].first) != nullptr;
    }
    if (same) continue;
    fragments_.dispose_owned_by(inst.id);
    owned.clear();
    for (const auto& nodes : inst.fragments) {
      owned.emplace_back(fragments_.create(nodes, inst.id, inst.depth + 1), nodes);
    }
  }
  for (auto it = instance_fragments_.begin(); it != instance_fragments_.end();) {
    if (live.count(it->first)) {
      ++it;
      continue;
    }
    fragments_.dispose_owned_by(it->first);
    it = instance_fragments_.erase(it);
  }
}

ChangeOutcome DocumentSession::change(const ChangeRequest& request, bool force_apply) {
  // The first change outside an open input group closes it.
  if (input_open_ && !request.require_continue_input && !state_.frozen()) {
    sync_tools();
    input_open_ = false;
  }
  auto result = state_.apply_changes(request, force_apply);
  ++version_;
  last_violations_ = result.violations;
  last_changes_ = request.changes;
  // A forced change keeps instances whose anchors still match; broken ones drop out.
  if (result.outcome != Outcome::Frozen && result.update_tools) sync_tools();
  if (result.outcome != Outcome::Frozen && !result.update_tools) input_open_ = true;
  return {result.outcome, result.script.ops.size(), std::move(result.script), request.changes};
}

ChangeOutcome DocumentSession::action(InstanceId instance, const std::string& action, const nlohmann::json& payload) {
  auto request = tools_.dispatch(instance, action, payload, context());
  return change(request);
}

ChangeOutcome DocumentSession::edit(const StructuredEditRequest& request) {
  if (state_.frozen()) throw Error(ErrorCode::BadRequest, "structured edits are unavailable while frozen");
  auto planned = plan(state_.tree(), *language_, request);
  ChangeRequest change_request;
  change_request.changes = std::move(planned.changes);
  change_request.intent_delete_nodes.insert(request.intent_delete_nodes.begin(), request.intent_delete_nodes.end());
  change_request.require_continue_input = request.require_continue_input;
  return change(change_request);
}

ChangeOutcome DocumentSession::revert() {
  auto inverse = state_.revert_pending();
  ++version_;
  last_violations_.clear();
  last_changes_ = inverse;
  return {Outcome::Reverted, 0, {}, std::move(inverse)};
}

std::vector<FragmentView> DocumentSession::fragments() {
  std::vector<FragmentId> orphaned;
  auto views = fragments_.update(state_, &orphaned);
  for (auto& [inst, owned] : instance_fragments_) {
    std::erase_if(owned, [&](const auto& f) {
      return std::find(orphaned.begin(), orphaned.end(), f.first) != orphaned.end();
    });
  }
  return views;
}

SelectionResult DocumentSession::restore_selection(const Selection& previous) {
  return trellis::restore_selection(fragments(), previous, last_changes_);
}

std::string DocumentSession::shadow(std::string_view endpoint) const {
  std::map<NodeId, std::uint64_t> watched;
  for (const auto& inst : tools_.instances()) {
    for (const auto& b : tools_.definition(inst.definition).stream_bindings) {
      auto it = inst.extraction.nodes.find(b);
      if (it != inst.extraction.nodes.end()) watched[it->second] = it->second;
    }
  }
  return instrument_document(state_.tree(), *language_, watched, endpoint);
}

nlohmann::json DocumentSession::state_json() {
  using nlohmann::json;
  auto ctx = context();
  json tools = json::array();
  for (const auto& inst : tools_.instances()) {
    const auto& def = tools_.definition(inst.definition);
    const auto* anchor = state_.tree().find(inst.anchor);
    json range = anchor ? json::array({anchor->range.from, anchor->range.to}) : json(nullptr);
    tools.push_back({{"instanceId", inst.id},
                     {"tool", inst.definition},
                     {"anchor", inst.anchor},
                     {"range", range},
                     {"depth", inst.depth},
                     {"display", display_type_name(def.display)},
                     {"view", tools_.view(inst, ctx)}});
  }
  json violations = json::array();
  if (state_.frozen()) {
    for (auto owner : last_violations_) {
      const auto* inst = tools_.find(owner);
      violations.push_back({{"instanceId", owner}, {"tool", inst ? json(inst->definition) : json(nullptr)}});
    }
  }
  json frags = json::array();
  for (const auto& v : fragments()) frags.push_back(to_json(v));
  return {{"version", version_},
          {"language", language_->id},
          {"frozen", state_.frozen()},
          {"pendingCount", state_.pending().size()},
          {"violations", violations},
          {"tools", tools},
          {"fragments", frags},
          {"text", state_.text()}};
}

}  // namespace trellis
