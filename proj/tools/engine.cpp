#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "trellis/trellis.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int report(int status) {
  if (status == TRELLIS_OK) return 0;
  std::cerr << "engine: " << trellis_error_name(status) << ": " << trellis_last_error() << "\n";
  return 2;
}

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  trellis_string_free(s);
  return out;
}

int serve(const std::string& host, int port, bool stdio) {
  trellis_service* service = trellis_service_new();
  if (!service) return report(TRELLIS_INTERNAL);
  int status = TRELLIS_OK;
  if (stdio) {
    status = trellis_serve_stdio(service);
  } else {
    auto ready = [](uint16_t bound, void* user) {
      std::cerr << "engine: serving on " << *static_cast<const std::string*>(user) << ":" << bound << std::endl;
    };
    status = trellis_serve_tcp(service, host.c_str(), static_cast<uint16_t>(port), ready,
                               const_cast<std::string*>(&host));
  }
  trellis_service_free(service);
  return report(status);
}

int replay(const std::string& script, const std::string& trace_path) {
  char* trace = nullptr;
  int passed = 0;
  int status = trellis_replay_file(script.c_str(), &trace, &passed);
  if (status != TRELLIS_OK) return report(status);
  auto text = take(trace);
  if (trace_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) {
      std::cerr << "engine: cannot write " << trace_path << "\n";
      return 2;
    }
    out << text;
  }
  if (!passed) std::cerr << "engine: replay assertions failed\n";
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trellis structure-aware editing engine"};
  app.require_subcommand(1);

  auto* serve_cmd = app.add_subcommand("serve", "Serve the protocol on a TCP port or stdio");
  int port = 7070;
  std::string host = "127.0.0.1";
  bool stdio = false;
  serve_cmd->add_option("--port", port, "TCP port; 0 picks one")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_flag("--stdio", stdio, "Serve framed messages on stdin/stdout");

  auto* replay_cmd = app.add_subcommand("replay", "Run a replay script and print its trace");
  std::string script;
  std::string trace_path;
  replay_cmd->add_option("script", script, "Replay script")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--trace", trace_path, "Write the trace here instead of stdout");

  auto* edit_cmd = app.add_subcommand("edit", "Apply one structured edit and print the result");
  std::string file;
  std::string lang;
  std::string op;
  std::vector<std::size_t> at;
  std::string text;
  std::size_t index = 0;
  std::string prefix;
  std::string suffix;
  bool in_place = false;
  edit_cmd->add_option("file", file, "Source file")->required()->check(CLI::ExistingFile);
  edit_cmd->add_option("--lang", lang, "Language id")->required();
  edit_cmd->add_option("--op", op, "Edit operation")
      ->required()
      ->check(CLI::IsMember({"insert", "delete", "replace", "wrap"}));
  edit_cmd->add_option("--at", at, "Byte range FROM,TO of the target node")->required()->delimiter(',')->expected(2);
  edit_cmd->add_option("--text", text, "Inserted or replacement text");
  edit_cmd->add_option("--index", index, "List position for insert");
  edit_cmd->add_option("--prefix", prefix, "Wrap prefix");
  edit_cmd->add_option("--suffix", suffix, "Wrap suffix");
  edit_cmd->add_flag("--in-place", in_place, "Overwrite the file instead of printing");

  auto* diff_cmd = app.add_subcommand("diff", "Print the edit script between two files");
  std::string old_path;
  std::string new_path;
  bool as_json = false;
  diff_cmd->add_option("old", old_path, "Old version")->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("new", new_path, "New version")->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("--lang", lang, "Language id")->required();
  diff_cmd->add_flag("--json", as_json, "JSON instead of one op per line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(host, port, stdio);
    if (*replay_cmd) return replay(script, trace_path);
    if (*edit_cmd) {
      nlohmann::json request = {{"op", op}, {"at", at}, {"text", text}, {"index", index},
                                {"prefix", prefix}, {"suffix", suffix}};
      auto source = read_file(file);
      char* out = nullptr;
      int status = trellis_edit(lang.c_str(), source.c_str(), request.dump().c_str(), &out);
      if (status != TRELLIS_OK) return report(status);
      auto result = take(out);
      if (in_place) {
        std::ofstream(file, std::ios::binary) << result;
      } else {
        std::cout << result;
      }
      return 0;
    }
    if (*diff_cmd) {
      auto before = read_file(old_path);
      auto after = read_file(new_path);
      char* out = nullptr;
      int status = trellis_diff(lang.c_str(), before.c_str(), after.c_str(), as_json ? 1 : 0, &out);
      if (status != TRELLIS_OK) return report(status);
      std::cout << take(out);
      if (as_json) std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "engine: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
