#include "syntax/language.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "edit/grammar_rules.hpp"
#include "syntax/embedded.hpp"

namespace trellis {
namespace {

nlohmann::json load_json(std::string_view path) {
  auto content = detail::embedded_file(path);
  if (!content) throw Error(ErrorCode::Io, "missing data file " + std::string(path));
  return nlohmann::json::parse(*content);
}

Language make(std::string id, std::function<SyntaxTree(std::string_view, IdAllocator&)> parse,
              std::string identifier_kind, std::string string_kind) {
  Language lang;
  lang.id = id;
  lang.parse = std::move(parse);
  lang.identifier_kind = std::move(identifier_kind);
  lang.string_kind = std::move(string_kind);
  lang.rules = GrammarRules::from_json(load_json("grammars/" + id + ".json"));
  lang.expression_kinds = lang.rules->parenthesizable_kinds();
  auto exceptions = detail::embedded_file("exceptions/" + id + ".json");
  lang.exceptions = std::make_shared<const ExceptionTable>(
      exceptions ? ExceptionTable::from_json(nlohmann::json::parse(*exceptions)) : ExceptionTable{});
  return lang;
}

const std::map<std::string, Language, std::less<>>& registry() {
  static const auto* languages = [] {
    auto* m = new std::map<std::string, Language, std::less<>>();
    for (auto lang : {make("javascript", detail::parse_javascript, "identifier", "string"),
                      make("python", detail::parse_python, "identifier", "string"),
                      make("toy", detail::parse_toy, "identifier", ""),
                      make("sexp", detail::parse_sexp, "atom", "string")}) {
      m->emplace(lang.id, lang);
    }
    return m;
  }();
  return *languages;
}

}  // namespace

const Language& language(std::string_view id) {
  if (id == "js") id = "javascript";
  const auto& reg = registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw Error(ErrorCode::UnknownLanguage, "unknown language '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> language_ids() {
  std::vector<std::string> out;
  for (const auto& [id, lang] : registry()) out.push_back(id);
  return out;
}

SyntaxTree parse_document(std::string_view text, std::string_view language_id, IdAllocator& ids) {
  return language(language_id).parse(text, ids);
}

}  // namespace trellis
