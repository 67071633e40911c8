#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "service/document_session.hpp"

namespace trellis {

using SessionId = std::uint64_t;

/// Request/response front of the engine. Requests are
/// {"id", "method", "params"}; replies are {"id", "result"} or
/// {"id", "error": {"code", "message"}}. Notifications carry no id.
class Service {
 public:
  using Notifier = std::function<void(const nlohmann::json&)>;

  explicit Service(std::shared_ptr<ValueHub> hub = nullptr);

  // Serialized; safe to call from several connection threads.
  nlohmann::json handle(const nlohmann::json& request);
  // Same, from raw message text. Unparseable text is MalformedMessage.
  std::string handle_text(std::string_view message);

  // Receives {"method":"state","params":{"session","state"}} for subscribed
  // sessions after each mutating request.
  void set_notifier(Notifier notifier);

  ValueHub& values() { return *hub_; }
  // Delivers queued runtime values; notifies subscribers when any arrived.
  std::size_t pump();

  // Direct access for embedding; nullptr when unknown.
  DocumentSession* session(SessionId id);

 private:
  nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
  DocumentSession& require(const nlohmann::json& params, SessionId* id_out = nullptr);
  nlohmann::json outcome_result(SessionId id, DocumentSession& s, const ChangeOutcome& outcome);
  void notify(SessionId id, DocumentSession& s);

  std::recursive_mutex mutex_;
  std::shared_ptr<ValueHub> hub_;
  std::map<SessionId, std::unique_ptr<DocumentSession>> sessions_;
  std::set<SessionId> subscribed_;
  SessionId next_id_ = 1;
  Notifier notifier_;
};

// Error reply for `request_id`.
nlohmann::json error_reply(const nlohmann::json& request_id, ErrorCode code, const std::string& message);

ChangeRequest change_request_from_json(const nlohmann::json& params);
StructuredEditRequest edit_request_from_json(const nlohmann::json& params);
SessionOptions session_options_from_json(const nlohmann::json& options);

}  // namespace trellis
