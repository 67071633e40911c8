#include "trellis/trellis.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "diff/edit_script.hpp"
#include "service/framing.hpp"
#include "service/replay.hpp"

using nlohmann::json;
using namespace trellis;

struct trellis_service {
  Service service;
};

struct trellis_document {
  Service service;
  SessionId session = 0;
  std::uint64_t next_id = 1;
};

namespace {

thread_local std::string g_last_error;

constexpr int kLastCode = static_cast<int>(ErrorCode::Io);

int fail(int status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int emit(char** out, const std::string& s) {
  if (!out) return TRELLIS_OK;
  *out = dup(s);
  return *out ? TRELLIS_OK : fail(TRELLIS_INTERNAL, "out of memory");
}

int status_of(const std::string& name) {
  for (int c = 1; c <= kLastCode; ++c) {
    if (name == error_code_name(static_cast<ErrorCode>(c))) return c;
  }
  return TRELLIS_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
int guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(TRELLIS_MALFORMED_MESSAGE, e.what());
  } catch (const std::exception& e) {
    return fail(TRELLIS_INTERNAL, e.what());
  }
}

// Sends one request on a document's service; protocol errors become status codes.
int document_call(trellis_document* d, const std::string& method, json params, char** out) {
  if (!d) return fail(TRELLIS_INVALID_ARGUMENT, "null document");
  params["session"] = d->session;
  auto reply = d->service.handle({{"id", d->next_id++}, {"method", method}, {"params", std::move(params)}});
  if (reply.contains("error")) {
    const auto& e = reply.at("error");
    return fail(status_of(e.at("code").get<std::string>()), e.at("message").get<std::string>());
  }
  return emit(out, reply.at("result").dump());
}

json parse_arg(const char* text, const char* what) {
  if (!text) throw Error(ErrorCode::BadRequest, std::string(what) + " is null");
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedMessage, std::string(what) + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* trellis_version(void) { return "0.1.0"; }

const char* trellis_last_error(void) { return g_last_error.c_str(); }

const char* trellis_error_name(int status) {
  if (status == TRELLIS_OK) return "Ok";
  if (status == TRELLIS_INVALID_ARGUMENT) return "InvalidArgument";
  if (status >= 1 && status <= kLastCode) return error_code_name(static_cast<ErrorCode>(status));
  return "Internal";
}

void trellis_string_free(char* s) { std::free(s); }

trellis_service* trellis_service_new(void) {
  try {
    return new trellis_service();
  } catch (const std::exception& e) {
    fail(TRELLIS_INTERNAL, e.what());
    return nullptr;
  }
}

void trellis_service_free(trellis_service* service) { delete service; }

int trellis_service_handle(trellis_service* service, const char* request_json, char** reply_json) {
  if (!service || !request_json) return fail(TRELLIS_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> int { return emit(reply_json, service->service.handle_text(request_json)); });
}

int trellis_serve_stdio(trellis_service* service) {
  if (!service) return fail(TRELLIS_INVALID_ARGUMENT, "null service");
  return guarded([&]() -> int {
    std::ios::sync_with_stdio(false);
    serve_stream(service->service, std::cin, std::cout);
    return TRELLIS_OK;
  });
}

int trellis_serve_tcp(trellis_service* service, const char* host, uint16_t port, trellis_ready_fn ready, void* user) {
  if (!service) return fail(TRELLIS_INVALID_ARGUMENT, "null service");
  return guarded([&]() -> int {
    TcpServer server(service->service);
    server.start(port, host ? host : "127.0.0.1");
    if (ready) ready(server.port(), user);
    server.wait();
    return TRELLIS_OK;
  });
}

int trellis_replay(const char* script_json, char** trace, int* passed) {
  return guarded([&]() -> int {
    auto result = replay(parse_arg(script_json, "script"));
    if (passed) *passed = result.ok ? 1 : 0;
    return emit(trace, result.trace());
  });
}

int trellis_replay_file(const char* path, char** trace, int* passed) {
  if (!path) return fail(TRELLIS_INVALID_ARGUMENT, "null path");
  return guarded([&]() -> int {
    auto result = replay(load_replay_script(path));
    if (passed) *passed = result.ok ? 1 : 0;
    return emit(trace, result.trace());
  });
}

int trellis_diff(const char* language, const char* old_text, const char* new_text, int format, char** out) {
  if (!language || !old_text || !new_text) return fail(TRELLIS_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> int {
    IdAllocator ids;
    auto tree = parse_document(old_text, language, ids);
    auto script = compute_edit_script(tree, new_text, ids);
    return emit(out, format == 1 ? to_json(script).dump(2) : to_trace(script));
  });
}

int trellis_edit(const char* language, const char* text, const char* request_json, char** new_text) {
  if (!language || !text) return fail(TRELLIS_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> int {
    auto request = parse_arg(request_json, "request");
    trellis_document doc;
    auto opened = doc.service.handle({{"id", 0}, {"method", "open"}, {"params", {{"language", language}, {"text", text}}}});
    if (opened.contains("error")) {
      return fail(status_of(opened["error"]["code"].get<std::string>()), opened["error"]["message"].get<std::string>());
    }
    doc.session = opened["result"]["session"].get<SessionId>();
    char* result = nullptr;
    int status = document_call(&doc, "edit", request, &result);
    if (status != TRELLIS_OK) return status;
    auto parsed = json::parse(result);
    trellis_string_free(result);
    return emit(new_text, parsed.at("state").at("text").get<std::string>());
  });
}

trellis_document* trellis_document_open(const char* language, const char* text, const char* options_json) {
  g_last_error.clear();
  if (!language || !text) {
    fail(TRELLIS_INVALID_ARGUMENT, "null argument");
    return nullptr;
  }
  trellis_document* doc = nullptr;
  int status = guarded([&]() -> int {
    json options = options_json ? parse_arg(options_json, "options") : json::object();
    auto d = std::make_unique<trellis_document>();
    auto reply = d->service.handle(
        {{"id", 0}, {"method", "open"}, {"params", {{"language", language}, {"text", text}, {"options", options}}}});
    if (reply.contains("error")) {
      return fail(status_of(reply["error"]["code"].get<std::string>()), reply["error"]["message"].get<std::string>());
    }
    d->session = reply["result"]["session"].get<SessionId>();
    doc = d.release();
    return TRELLIS_OK;
  });
  return status == TRELLIS_OK ? doc : nullptr;
}

void trellis_document_free(trellis_document* document) { delete document; }

int trellis_document_state(trellis_document* document, char** state_json) {
  return guarded([&]() -> int { return document_call(document, "state", json::object(), state_json); });
}

int trellis_document_change(trellis_document* document, const char* changes_json, int force_apply, char** result_json) {
  return guarded([&]() -> int {
    return document_call(document, "change",
                         {{"changes", parse_arg(changes_json, "changes")}, {"force", force_apply != 0}}, result_json);
  });
}

int trellis_document_action(trellis_document* document, uint64_t instance_id, const char* action,
                            const char* payload_json, char** result_json) {
  if (!action) return fail(TRELLIS_INVALID_ARGUMENT, "null action");
  return guarded([&]() -> int {
    json payload = payload_json ? parse_arg(payload_json, "payload") : json::object();
    return document_call(document, "action", {{"instanceId", instance_id}, {"action", action}, {"payload", payload}},
                         result_json);
  });
}

int trellis_document_revert(trellis_document* document, char** result_json) {
  return guarded([&]() -> int { return document_call(document, "revert", json::object(), result_json); });
}

}  // extern "C"
