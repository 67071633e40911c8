#include "transaction/session_state.hpp"

#include <algorithm>

#include "syntax/language.hpp"

namespace trellis {

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted: return "Accepted";
    case Outcome::Frozen: return "Frozen";
    case Outcome::ForceApplied: return "ForceApplied";
    case Outcome::Reverted: return "Reverted";
  }
  return "?";
}

void ConstraintRegistry::add(OwnerId owner, ConstraintPredicate predicate) {
  entries_.push_back({owner, std::move(predicate)});
}

void ConstraintRegistry::remove_owner(OwnerId owner) {
  std::erase_if(entries_, [&](const Entry& e) { return e.owner == owner; });
}

std::vector<OwnerId> ConstraintRegistry::owners() const {
  std::vector<OwnerId> out;
  for (const auto& e : entries_) {
    if (std::find(out.begin(), out.end(), e.owner) == out.end()) out.push_back(e.owner);
  }
  return out;
}

std::vector<OwnerId> ConstraintRegistry::violations(const EditScript& script, const SyntaxTree& tree,
                                                    const std::set<NodeId>& intents) const {
  std::vector<OwnerId> out;
  for (const auto& e : entries_) {
    bool ok = false;
    try {
      ok = e.predicate(script, tree, intents);
    } catch (const std::exception& ex) {
      failures_.push_back("constraint of " + std::to_string(e.owner) + " threw: " + ex.what());
    }
    if (!ok && std::find(out.begin(), out.end(), e.owner) == out.end()) out.push_back(e.owner);
  }
  return out;
}

Validation validate_changes(const EditScript& script, const SyntaxTree& tree, const ConstraintRegistry& constraints,
                            const std::set<NodeId>& intents) {
  Validation v;
  v.violations = constraints.violations(script, tree, intents);
  v.ok = !script.degenerate && v.violations.empty();
  return v;
}

SessionState::SessionState(std::string language_id, std::string text) : text_(std::move(text)) {
  tree_ = parse_document(text_, language_id, ids_);
}

ApplyResult SessionState::apply_changes(const ChangeRequest& request, bool force_apply) {
  // Validates offsets against the current text before anything changes.
  std::string next_text = trellis::apply_changes(text_, request.changes);

  std::set<NodeId> intents = request.intent_delete_nodes;
  for (const auto& p : pending_) intents.insert(p.intent_delete_nodes.begin(), p.intent_delete_nodes.end());

  ApplyResult result;
  result.script = compute_edit_script(tree_, next_text, ids_);
  apply_in_place(tree_, result.script);
  text_ = std::move(next_text);

  Validation v = validate_changes(result.script, tree_, constraints_, intents);
  result.violations = v.violations;
  if (v.ok || force_apply) {
    pending_.clear();
    result.outcome = v.ok ? Outcome::Accepted : Outcome::ForceApplied;
    result.update_tools = !request.require_continue_input;
    return result;
  }
  rollback_in_place(tree_, result.script);
  for (const auto& c : request.changes) {
    pending_.push_back({c, request.intent_delete_nodes, request.require_continue_input});
  }
  result.outcome = Outcome::Frozen;
  result.update_tools = false;
  return result;
}

std::vector<TextChange> SessionState::revert_pending() {
  if (pending_.empty()) throw Error(ErrorCode::NothingToRevert, "session is not frozen");
  std::vector<TextChange> changes;
  for (const auto& p : pending_) changes.push_back(p.change);
  auto inverse = invert_changes(last_valid_text(), changes);
  text_ = last_valid_text();
  pending_.clear();
  return inverse;
}

}  // namespace trellis
