#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edit/structured_edit.hpp"
#include "fragment/fragment.hpp"
#include "instrument/rewrite.hpp"
#include "instrument/values.hpp"
#include "tools/bundled.hpp"
#include "transaction/session_state.hpp"

namespace trellis {

struct SessionOptions {
  bool toplevel_guard = false;
  int recursion_limit = kDefaultRecursionLimit;
  // Tool manifest; the bundled one when null.
  std::optional<nlohmann::json> manifest;
};

struct ChangeOutcome {
  Outcome outcome = Outcome::Accepted;
  std::size_t op_count = 0;
  EditScript script;
  std::vector<TextChange> changes;  // what was applied to the text
};

/// One open document: transactions, tools, fragments and value streams.
class DocumentSession {
 public:
  DocumentSession(std::string language_id, std::string text, SessionOptions options = {},
                  std::shared_ptr<ValueHub> hub = nullptr);

  const std::string& text() const { return state_.text(); }
  const SessionState& state() const { return state_; }
  const ToolHost& tools() const { return tools_; }
  const Language& lang() const { return *language_; }
  ValueHub& values() { return *hub_; }
  // Bumped by every request that changes the text.
  std::uint64_t version() const { return version_; }

  ChangeOutcome change(const ChangeRequest& request, bool force_apply = false);
  ChangeOutcome action(InstanceId instance, const std::string& action, const nlohmann::json& payload);
  // Structured edits plan against the last valid tree; BadRequest while frozen.
  ChangeOutcome edit(const StructuredEditRequest& request);
  ChangeOutcome revert();

  std::vector<FragmentView> fragments();
  SelectionResult restore_selection(const Selection& previous);

  // Document copy with every streamed node wrapped for value reporting.
  std::string shadow(std::string_view endpoint = kDefaultEndpoint) const;

  // Deliver queued runtime values.
  std::size_t pump() { return hub_->pump(); }

  nlohmann::json state_json();

 private:
  ToolContext context() const;
  void sync_tools();
  void sync_fragments();

  const Language* language_;
  SessionOptions options_;
  SessionState state_;
  ToolHost tools_;
  FragmentRegistry fragments_;
  std::map<InstanceId, std::vector<std::pair<FragmentId, std::vector<NodeId>>>> instance_fragments_;
  std::shared_ptr<ValueHub> hub_;
  std::uint64_t version_ = 0;
  bool input_open_ = false;  // a requireContinueInput change was applied and tools are stale
  std::vector<OwnerId> last_violations_;
  std::vector<TextChange> last_changes_;
};

}  // namespace trellis
