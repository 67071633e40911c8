#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "diff/edit_script.hpp"
#include "syntax/tree.hpp"

namespace trellis {

using OwnerId = std::uint64_t;

struct ChangeRequest {
  std::vector<TextChange> changes;
  std::set<NodeId> intent_delete_nodes;
  bool require_continue_input = false;
};

struct PendingChange {
  TextChange change;
  std::set<NodeId> intent_delete_nodes;
  bool require_continue_input = false;
};

enum class Outcome { Accepted, Frozen, ForceApplied, Reverted };
const char* outcome_name(Outcome outcome);

using ConstraintPredicate =
    std::function<bool(const EditScript& script, const SyntaxTree& tree, const std::set<NodeId>& intents)>;

/// Constraints of live tool instances, evaluated in registration order.
class ConstraintRegistry {
 public:
  void add(OwnerId owner, ConstraintPredicate predicate);
  void remove_owner(OwnerId owner);
  // Distinct owners in registration order.
  std::vector<OwnerId> owners() const;
  bool empty() const { return entries_.empty(); }

  // Runs every predicate; a throwing predicate is a violation by its owner.
  std::vector<OwnerId> violations(const EditScript& script, const SyntaxTree& tree,
                                  const std::set<NodeId>& intents) const;
  // Messages of predicates that threw, oldest first.
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  struct Entry {
    OwnerId owner;
    ConstraintPredicate predicate;
  };
  std::vector<Entry> entries_;
  mutable std::vector<std::string> failures_;
};

struct Validation {
  bool ok = true;
  std::vector<OwnerId> violations;
};

// The script must already be applied to `tree`.
Validation validate_changes(const EditScript& script, const SyntaxTree& tree, const ConstraintRegistry& constraints,
                            const std::set<NodeId>& intents);

struct ApplyResult {
  Outcome outcome = Outcome::Accepted;
  EditScript script;
  std::vector<OwnerId> violations;
  // False while a requireContinueInput group is open.
  bool update_tools = true;
};

/// Text, last valid tree and pending changes of one document.
class SessionState {
 public:
  SessionState(std::string language_id, std::string text);

  const std::string& text() const { return text_; }
  const std::string& last_valid_text() const { return tree_.text(); }
  const SyntaxTree& tree() const { return tree_; }
  const std::vector<PendingChange>& pending() const { return pending_; }
  bool frozen() const { return !pending_.empty(); }
  const std::string& language_id() const { return tree_.language_id(); }
  IdAllocator& ids() { return ids_; }

  ConstraintRegistry& constraints() { return constraints_; }
  const ConstraintRegistry& constraints() const { return constraints_; }

  // Throws InvalidChange for out-of-bounds changes, leaving the session untouched.
  ApplyResult apply_changes(const ChangeRequest& request, bool force_apply = false);

  // Inverse changes, in application order, that took `text` back to the last valid text.
  std::vector<TextChange> revert_pending();

 private:
  SyntaxTree tree_;
  std::string text_;
  std::vector<PendingChange> pending_;
  ConstraintRegistry constraints_;
  IdAllocator ids_;
};

}  // namespace trellis
