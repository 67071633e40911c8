#include "service/service.hpp"

#include "diff/edit_script.hpp"

namespace trellis {

using nlohmann::json;

namespace {

Error malformed(const std::string& message) { return Error(ErrorCode::MalformedMessage, message); }

const json& field(const json& params, const char* key) {
  if (!params.is_object() || !params.contains(key)) throw malformed(std::string("missing field '") + key + "'");
  return params.at(key);
}

std::size_t offset_field(const json& params, const char* key) {
  const auto& v = field(params, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw malformed(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string string_field(const json& params, const char* key, std::string fallback = {}) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_string()) throw malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

StructuredEditRequest::Op parse_op(const std::string& name) {
  if (name == "insert") return StructuredEditRequest::Op::Insert;
  if (name == "delete") return StructuredEditRequest::Op::Delete;
  if (name == "replace") return StructuredEditRequest::Op::ReplaceWith;
  if (name == "wrap") return StructuredEditRequest::Op::WrapWith;
  throw malformed("unknown edit op '" + name + "'");
}

}  // namespace

json error_reply(const json& request_id, ErrorCode code, const std::string& message) {
  return {{"id", request_id}, {"error", {{"code", error_code_name(code)}, {"message", message}}}};
}

ChangeRequest change_request_from_json(const json& params) {
  ChangeRequest r;
  const auto& changes = field(params, "changes");
  if (!changes.is_array()) throw malformed("'changes' must be an array");
  for (const auto& c : changes) {
    r.changes.push_back({offset_field(c, "from"), offset_field(c, "to"), string_field(c, "insert")});
  }
  if (params.contains("intents")) {
    for (const auto& n : params.at("intents")) {
      if (!n.is_number_integer() || n.get<std::int64_t>() < 0) throw malformed("'intents' must hold node ids");
      r.intent_delete_nodes.insert(n.get<NodeId>());
    }
  }
  r.require_continue_input = params.value("requireContinueInput", false);
  return r;
}

StructuredEditRequest edit_request_from_json(const json& params) {
  StructuredEditRequest r;
  r.op = parse_op(string_field(params, "op"));
  if (params.contains("target")) r.target = offset_field(params, "target");
  r.text = string_field(params, "text");
  if (params.contains("index")) r.index = offset_field(params, "index");
  r.prefix = string_field(params, "prefix");
  r.suffix = string_field(params, "suffix");
  r.require_continue_input = params.value("requireContinueInput", false);
  return r;
}

SessionOptions session_options_from_json(const json& options) {
  SessionOptions o;
  if (options.is_null()) return o;
  if (!options.is_object()) throw malformed("'options' must be an object");
  o.toplevel_guard = options.value("toplevelGuard", false);
  o.recursion_limit = options.value("recursionLimit", kDefaultRecursionLimit);
  if (options.contains("manifest")) o.manifest = options.at("manifest");
  return o;
}

Service::Service(std::shared_ptr<ValueHub> hub) : hub_(hub ? std::move(hub) : std::make_shared<ValueHub>()) {}

void Service::set_notifier(Notifier notifier) {
  std::lock_guard lock(mutex_);
  notifier_ = std::move(notifier);
}

DocumentSession* Service::session(SessionId id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

std::size_t Service::pump() {
  std::lock_guard lock(mutex_);
  auto n = hub_->pump();
  if (n > 0) {
    for (auto id : subscribed_) notify(id, *sessions_.at(id));
  }
  return n;
}

std::string Service::handle_text(std::string_view message) {
  json request;
  try {
    request = json::parse(message);
  } catch (const json::parse_error& e) {
    return error_reply(nullptr, ErrorCode::MalformedMessage, e.what()).dump();
  }
  return handle(request).dump();
}

json Service::handle(const json& request) {
  std::lock_guard lock(mutex_);
  json id = request.is_object() && request.contains("id") ? request.at("id") : json(nullptr);
  try {
    if (!request.is_object()) throw malformed("request must be an object");
    const auto& method = field(request, "method");
    if (!method.is_string()) throw malformed("'method' must be a string");
    json params = request.value("params", json::object());
    return {{"id", id}, {"result", dispatch(method.get<std::string>(), params)}};
  } catch (const Error& e) {
    return error_reply(id, e.code(), e.what());
  } catch (const json::exception& e) {
    return error_reply(id, ErrorCode::MalformedMessage, e.what());
  }
}

DocumentSession& Service::require(const json& params, SessionId* id_out) {
  const auto& v = field(params, "session");
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw malformed("'session' must be a session id");
  auto id = v.get<SessionId>();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session " + std::to_string(id));
  if (params.contains("version")) {
    const auto& ver = params.at("version");
    if (!ver.is_number_integer() || ver.get<std::int64_t>() < 0) throw malformed("'version' must be an unsigned integer");
    if (ver.get<std::uint64_t>() != it->second->version()) {
      throw Error(ErrorCode::StaleVersion, "session " + std::to_string(id) + " is at version " +
                                               std::to_string(it->second->version()));
    }
  }
  if (id_out) *id_out = id;
  return *it->second;
}

void Service::notify(SessionId id, DocumentSession& s) {
  if (!notifier_ || !subscribed_.count(id)) return;
  notifier_({{"method", "state"}, {"params", {{"session", id}, {"state", s.state_json()}}}});
}

json Service::outcome_result(SessionId id, DocumentSession& s, const ChangeOutcome& outcome) {
  json changes = json::array();
  for (const auto& c : outcome.changes) changes.push_back({{"from", c.from}, {"to", c.to}, {"insert", c.insert}});
  json result = {{"outcome", outcome_name(outcome.outcome)},
                 {"opCount", outcome.op_count},
                 {"changes", changes},
                 {"script", to_json(outcome.script)},
                 {"version", s.version()},
                 {"state", s.state_json()}};
  notify(id, s);
  return result;
}

json Service::dispatch(const std::string& method, const json& params) {
  if (method == "open") {
    auto lang = string_field(params, "language", "javascript");
    auto text = string_field(params, "text");
    auto options = session_options_from_json(params.value("options", json()));
    auto s = std::make_unique<DocumentSession>(lang, std::move(text), std::move(options), hub_);
    auto id = next_id_++;
    auto& ref = *s;
    sessions_.emplace(id, std::move(s));
    return {{"session", id}, {"version", ref.version()}, {"state", ref.state_json()}};
  }
  if (method == "diff") {
    IdAllocator ids;
    auto lang = string_field(params, "language", "javascript");
    auto old_tree = parse_document(string_field(params, "old"), lang, ids);
    return to_json(compute_edit_script(old_tree, string_field(params, "new"), ids));
  }

  SessionId id = 0;
  auto& s = require(params, &id);
  if (method == "change") {
    auto request = change_request_from_json(params);
    return outcome_result(id, s, s.change(request, params.value("force", false)));
  }
  if (method == "action") {
    auto instance = offset_field(params, "instanceId");
    auto action = string_field(params, "action");
    return outcome_result(id, s, s.action(instance, action, params.value("payload", json::object())));
  }
  if (method == "edit") {
    auto request = edit_request_from_json(params);
    if (s.state().frozen()) throw Error(ErrorCode::BadRequest, "structured edits are unavailable while frozen");
    if (params.contains("at")) {
      const auto& at = params.at("at");
      if (!at.is_array() || at.size() != 2) throw malformed("'at' must be [from, to]");
      request.target = node_at_range(s.state().tree(), {at[0].get<std::size_t>(), at[1].get<std::size_t>()});
      if (request.target == kNoNode) throw Error(ErrorCode::UnknownNode, "no node at the given range");
    }
    return outcome_result(id, s, s.edit(request));
  }
  if (method == "revert") return outcome_result(id, s, s.revert());
  if (method == "state") return s.state_json();
  if (method == "subscribeState") {
    if (params.value("subscribe", true)) {
      subscribed_.insert(id);
    } else {
      subscribed_.erase(id);
    }
    return {{"subscribed", subscribed_.count(id) != 0}};
  }
  if (method == "shadow") return {{"text", s.shadow(string_field(params, "endpoint", std::string(kDefaultEndpoint)))}};
  if (method == "selection") {
    Selection previous{params.value("fragment", kRootFragment), {offset_field(params, "from"), offset_field(params, "to")}};
    auto r = s.restore_selection(previous);
    return {{"fragment", r.selection.fragment},
            {"range", {r.selection.range.from, r.selection.range.to}},
            {"candidates", r.candidates}};
  }
  if (method == "close") {
    subscribed_.erase(id);
    sessions_.erase(id);
    return {{"closed", id}};
  }
  throw malformed("unknown method '" + method + "'");
}

}  // namespace trellis
