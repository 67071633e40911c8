#include "service/replay.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "diff/edit_script.hpp"

namespace trellis {

using nlohmann::json;

namespace {

Error bad_script(const std::string& message) { return Error(ErrorCode::MalformedMessage, "replay: " + message); }

std::size_t find_needle(const std::string& text, const json& step, const char* key) {
  auto needle = step.at(key).get<std::string>();
  auto occurrence = step.value("occurrence", 0);
  std::size_t at = text.find(needle);
  for (int i = 0; i < occurrence && at != std::string::npos; ++i) at = text.find(needle, at + 1);
  if (at == std::string::npos) throw bad_script("'" + needle + "' not found");
  return at;
}

// "at" offset, "before"/"after" a needle, or "end".
std::size_t position(const std::string& text, const json& step) {
  if (step.contains("at")) return step.at("at").get<std::size_t>();
  if (step.contains("before")) return find_needle(text, step, "before");
  if (step.contains("after")) return find_needle(text, step, "after") + step.at("after").get<std::string>().size();
  if (step.value("end", false)) return text.size();
  throw bad_script("step needs a position");
}

std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

json change_of(std::size_t from, std::size_t to, std::string insert) {
  return {{"from", from}, {"to", to}, {"insert", std::move(insert)}};
}

std::vector<std::string> check(const json& expect, const json& state) {
  std::vector<std::string> failures;
  if (expect.contains("frozen") && expect.at("frozen") != state.at("frozen")) {
    failures.push_back("frozen is " + state.at("frozen").dump());
  }
  if (expect.contains("pendingCount") && expect.at("pendingCount") != state.at("pendingCount")) {
    failures.push_back("pendingCount is " + state.at("pendingCount").dump());
  }
  if (expect.contains("toolCount") && expect.at("toolCount").get<std::size_t>() != state.at("tools").size()) {
    failures.push_back("toolCount is " + std::to_string(state.at("tools").size()));
  }
  if (expect.contains("tools")) {
    for (const auto& [tool, count] : expect.at("tools").items()) {
      std::size_t n = 0;
      for (const auto& t : state.at("tools")) n += t.at("tool") == tool;
      if (n != count.get<std::size_t>()) failures.push_back(tool + " count is " + std::to_string(n));
    }
  }
  if (expect.contains("text") && expect.at("text") != state.at("text")) failures.push_back("text differs");
  if (expect.contains("textContains") &&
      state.at("text").get<std::string>().find(expect.at("textContains").get<std::string>()) == std::string::npos) {
    failures.push_back("text lacks " + expect.at("textContains").dump());
  }
  return failures;
}

class Runner {
 public:
  Runner(Service& service, ReplayResult& result) : service_(service), result_(result) {}

  void open(const json& script) {
    json params = {{"language", script.value("language", "javascript")},
                   {"text", script.value("text", "")},
                   {"options", script.value("options", json::object())}};
    auto reply = send("open", params);
    if (reply.contains("error")) throw Error(ErrorCode::BadRequest, "replay: open failed: " + reply.dump());
    session_ = reply.at("result").at("session").get<SessionId>();
    record(reply, "Opened");
  }

  void run(const json& step) {
    auto type = step.value("type", "");
    const auto& text = state_.at("text").get_ref<const std::string&>();
    if (type == "change") {
      json changes = step.contains("changes") ? step.at("changes") : json::array();
      if (step.contains("find")) {
        auto at = find_needle(text, step, "find");
        changes.push_back(change_of(at, at + step.at("find").get<std::string>().size(), step.value("replace", "")));
      } else if (step.contains("insert")) {
        auto at = position(text, step);
        changes.push_back(change_of(at, at, step.at("insert").get<std::string>()));
      }
      mutate("change", {{"changes", changes},
                        {"force", step.value("force", false)},
                        {"intents", step.value("intents", json::array())},
                        {"requireContinueInput", step.value("requireContinueInput", false)}});
    } else if (type == "type") {
      auto at = position(text, step);
      for (const auto& cp : code_points(step.at("text").get<std::string>())) {
        mutate("change", {{"changes", json::array({change_of(at, at, cp)})}});
        at += cp.size();
      }
    } else if (type == "cut") {
      auto at = find_needle(text, step, "find");
      clipboard_ = step.at("find").get<std::string>();
      mutate("change", {{"changes", json::array({change_of(at, at + clipboard_.size(), "")})}});
    } else if (type == "paste") {
      auto at = position(text, step);
      mutate("change", {{"changes", json::array({change_of(at, at, clipboard_)})}});
    } else if (type == "action") {
      json params = {{"action", step.at("action")}, {"payload", step.value("payload", json::object())}};
      params["instanceId"] = step.contains("instanceId") ? step.at("instanceId") : instance_of(step);
      mutate("action", params);
    } else if (type == "edit") {
      json params = step;
      params.erase("type");
      if (step.contains("find")) {
        auto at = find_needle(text, step, "find");
        params["at"] = {at, at + step.at("find").get<std::string>().size()};
        params.erase("find");
        params.erase("occurrence");
      }
      mutate("edit", params);
    } else if (type == "revert") {
      mutate("revert", json::object());
    } else if (type == "assert") {
      assert_step(step);
    } else {
      throw bad_script("unknown step type '" + type + "'");
    }
  }

 private:
  json send(const std::string& method, json params) {
    if (method != "open") params["session"] = session_;
    last_request_ = {{"id", ++request_id_}, {"method", method}, {"params", std::move(params)}};
    return service_.handle(last_request_);
  }

  json instance_of(const json& step) {
    auto tool = step.at("tool").get<std::string>();
    auto index = step.value("index", std::size_t{0});
    for (const auto& t : state_.at("tools")) {
      if (t.at("tool") == tool && index-- == 0) return t.at("instanceId");
    }
    // Let the service report it.
    return json(0);
  }

  void mutate(const std::string& method, json params) {
    params["version"] = state_.at("version");
    auto reply = send(method, std::move(params));
    if (reply.contains("error")) {
      result_.ok = false;
      record(reply, reply.at("error").at("code").get<std::string>());
      return;
    }
    record(reply, reply.at("result").at("outcome").get<std::string>(), reply.at("result").at("opCount"));
  }

  void assert_step(const json& step) {
    ReplayStep s;
    s.index = result_.steps.size();
    s.failures = check(step, state_);
    s.outcome = s.failures.empty() ? "AssertOk" : "AssertFailed";
    if (!s.failures.empty()) result_.ok = false;
    s.state = state_;
    s.hash = state_hash(state_);
    result_.steps.push_back(std::move(s));
  }

  void record(const json& reply, std::string outcome, const json& op_count = 0) {
    if (!reply.contains("error")) {
      const auto& r = reply.at("result");
      state_ = r.at("state");
    }
    ReplayStep s;
    s.index = result_.steps.size();
    s.outcome = std::move(outcome);
    s.op_count = op_count.get<std::size_t>();
    s.request = last_request_;
    s.response = reply;
    s.state = state_;
    s.hash = state_hash(state_);
    result_.steps.push_back(std::move(s));
  }

  Service& service_;
  ReplayResult& result_;
  SessionId session_ = 0;
  json state_;
  json last_request_;
  std::uint64_t request_id_ = 0;
  std::string clipboard_;
};

}  // namespace

std::uint64_t state_hash(const json& state) { return fingerprint(state.dump()); }

std::string ReplayResult::trace() const {
  std::ostringstream out;
  for (const auto& s : steps) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(s.hash));
    out << s.index << '\t' << s.outcome << '\t' << s.op_count << '\t' << hash << '\n';
  }
  return out.str();
}

ReplayResult replay(const json& script, Service* service) {
  if (!script.is_object()) throw bad_script("script must be an object");
  Service own;
  Service& svc = service ? *service : own;
  ReplayResult result;
  Runner runner(svc, result);
  runner.open(script);
  for (const auto& step : script.value("steps", json::array())) {
    try {
      runner.run(step);
    } catch (const json::exception& e) {
      throw bad_script(std::string("bad step ") + step.dump() + ": " + e.what());
    }
  }
  return result;
}

json load_replay_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  json script;
  try {
    script = json::parse(in);
  } catch (const json::parse_error& e) {
    throw bad_script(path.string() + ": " + e.what());
  }
  if (script.is_object() && script.contains("file")) {
    auto file = path.parent_path() / script.at("file").get<std::string>();
    std::ifstream src(file, std::ios::binary);
    if (!src) throw Error(ErrorCode::Io, "cannot read " + file.string());
    std::ostringstream text;
    text << src.rdbuf();
    script["text"] = text.str();
  }
  return script;
}

}  // namespace trellis
