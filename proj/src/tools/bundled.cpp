#include "tools/bundled.hpp"

#include <algorithm>
#include <cctype>

#include "edit/structured_edit.hpp"
#include "syntax/embedded.hpp"
#include "tools/escape.hpp"

namespace trellis {
namespace {

using nlohmann::json;
using Query = std::function<std::optional<Extraction>(const SyntaxTree&, NodeId)>;

NodeId binding(const ToolInstance& inst, const std::string& name) {
  auto it = inst.extraction.nodes.find(name);
  if (it == inst.extraction.nodes.end()) throw Error(ErrorCode::BadRequest, "tool has no binding " + name);
  return it->second;
}

Query make_query(const json& match, const Language& lang) {
  if (match.contains("template")) {
    auto tmpl = std::make_shared<Template>(Template::compile(match["template"].get<std::string>(), lang.id));
    return [tmpl](const SyntaxTree& tree, NodeId id) -> std::optional<Extraction> {
      auto b = tmpl->match(tree, id);
      if (!b) return std::nullopt;
      return Extraction{std::move(*b), {}};
    };
  }
  if (match.contains("identifierPrefix")) {
    const std::string prefix = match["identifierPrefix"].get<std::string>();
    const std::string kind = lang.identifier_kind;
    return [prefix, kind](const SyntaxTree& tree, NodeId id) -> std::optional<Extraction> {
      const SyntaxNode& n = tree.node(id);
      if (!n.is_leaf || n.kind != kind || !n.text.starts_with(prefix) || n.text.size() == prefix.size()) {
        return std::nullopt;
      }
      std::string label = n.text.substr(prefix.size());
      std::replace(label.begin(), label.end(), '_', ' ');
      return Extraction{{}, {{"label", label}, {"originalText", n.text}}};
    };
  }
  if (match.value("root", false)) {
    return [](const SyntaxTree& tree, NodeId id) -> std::optional<Extraction> {
      if (id != tree.root()) return std::nullopt;
      Extraction e;
      std::size_t i = 0;
      for (NodeId c : tree.named_children(id)) e.nodes.emplace("statement" + std::to_string(i++), c);
      return e;
    };
  }
  throw Error(ErrorCode::BadRequest, "tool manifest entry has no usable match");
}

std::function<std::vector<ConstraintPredicate>(const ToolInstance&, const SyntaxTree&)> make_constraints(
    const std::string& kind, const Query& query) {
  if (kind == "template-matches") {
    return [query](const ToolInstance& inst, const SyntaxTree&) {
      const NodeId anchor = inst.anchor;
      return std::vector<ConstraintPredicate>{
          [query, anchor](const EditScript&, const SyntaxTree& tree, const std::set<NodeId>& intents) {
            if (intents.count(anchor)) return true;
            return tree.contains(anchor) && tree.is_ancestor_or_self(tree.root(), anchor) &&
                   query(tree, anchor).has_value();
          }};
    };
  }
  if (kind == "text-unchanged") {
    return [](const ToolInstance& inst, const SyntaxTree&) {
      const NodeId anchor = inst.anchor;
      const std::string original = inst.extraction.scalars.at("originalText").get<std::string>();
      return std::vector<ConstraintPredicate>{
          [anchor, original](const EditScript&, const SyntaxTree& tree, const std::set<NodeId>& intents) {
            if (intents.count(anchor)) return true;
            return tree.contains(anchor) && tree.is_ancestor_or_self(tree.root(), anchor) &&
                   tree.node(anchor).text == original;
          }};
    };
  }
  if (kind == "toplevel") {
    return [](const ToolInstance& inst, const SyntaxTree&) {
      std::vector<NodeId> statements;
      for (const auto& [name, id] : inst.extraction.nodes) statements.push_back(id);
      return std::vector<ConstraintPredicate>{
          [statements](const EditScript&, const SyntaxTree& tree, const std::set<NodeId>& intents) {
            for (NodeId s : statements) {
              if (intents.count(s)) continue;
              if (!tree.contains(s) || tree.node(s).parent != tree.root()) return false;
            }
            return true;
          }};
    };
  }
  if (kind.empty()) return {};
  throw Error(ErrorCode::BadRequest, "unknown constraint kind " + kind);
}

json literal_number(const SyntaxTree& tree, NodeId id) {
  return json::parse(tree.source(id), nullptr, false);
}

json render(const json& layout, const ToolInstance& inst, const ToolContext& ctx, DisplayType display) {
  json children = json::array();
  auto last = [&](NodeId id) -> json {
    if (!ctx.last_value) return nullptr;
    auto v = ctx.last_value(id);
    return v ? *v : json(nullptr);
  };
  for (const auto& item : layout) {
    const std::string type = item.at("type").get<std::string>();
    json out{{"type", type}};
    if (item.contains("action")) out["action"] = item["action"];
    if (type == "fragment") {
      out["nodes"] = json::array({binding(inst, item.at("binding").get<std::string>())});
    } else if (type == "label") {
      if (item.contains("text")) out["text"] = item["text"];
      if (item.contains("scalar")) out["text"] = inst.extraction.scalars.at(item["scalar"].get<std::string>());
      if (item.contains("value")) {
        NodeId id = binding(inst, item["value"].get<std::string>());
        out["node"] = id;
        out["value"] = last(id);
      }
    } else if (type == "button") {
      out["label"] = item.value("label", "");
    } else if (type == "input") {
      out["label"] = inst.extraction.scalars.at(item.at("scalar").get<std::string>());
    } else if (type == "editor") {
      const SyntaxNode& leaf = ctx.tree.node(binding(inst, item.at("binding").get<std::string>()));
      StringLiteral lit = string_literal(leaf.text);
      out["language"] = item.value("language", "");
      out["node"] = leaf.id;
      out["text"] = unescape_string(std::string_view(leaf.text).substr(lit.body_from, lit.body_to - lit.body_from),
                                    lit.quote)
                        .text;
    } else if (type == "slider") {
      for (const char* key : {"min", "max", "step", "value"}) {
        out[key] = literal_number(ctx.tree, binding(inst, item.at(key).get<std::string>()));
      }
    } else if (type == "swatch") {
      json comps = json::array();
      for (const auto& name : item.at("components")) {
        NodeId id = binding(inst, name.get<std::string>());
        comps.push_back({{"name", name}, {"node", id}, {"literal", literal_number(ctx.tree, id)}, {"value", last(id)}});
      }
      out["components"] = std::move(comps);
    }
    children.push_back(std::move(out));
  }
  return {{"type", "container"}, {"display", display_type_name(display)}, {"children", std::move(children)}};
}

std::string source_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

using Action = std::function<ChangeRequest(const ToolInstance&, const json&, const ToolContext&)>;

Action make_action(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "unwrap") {
    return [arg](const ToolInstance& inst, const json&, const ToolContext& ctx) {
      const std::string inner(ctx.tree.source(binding(inst, arg)));
      auto edit = plan_replace(ctx.tree, ctx.language, inst.anchor, inner);
      return ChangeRequest{std::move(edit.changes), {inst.anchor}, false};
    };
  }
  if (kind == "replace-anchor") {
    return [](const ToolInstance& inst, const json& payload, const ToolContext& ctx) {
      if (!payload.is_object() || !payload.contains("text") || !payload["text"].is_string()) {
        throw Error(ErrorCode::BadRequest, "payload needs a text field");
      }
      auto edit = plan_replace(ctx.tree, ctx.language, inst.anchor, payload["text"].get<std::string>());
      return ChangeRequest{std::move(edit.changes), {inst.anchor}, true};
    };
  }
  if (kind == "string-edit") {
    return [arg](const ToolInstance& inst, const json& payload, const ToolContext& ctx) {
      auto offset = [&](const char* key) {
        return payload.contains(key) && payload[key].is_number_integer() && payload[key].get<long long>() >= 0;
      };
      if (!payload.is_object() || !offset("from") || !offset("to") || !payload.contains("insert") ||
          !payload["insert"].is_string()) {
        throw Error(ErrorCode::BadRequest, "payload needs from, to and insert");
      }
      const SyntaxNode& leaf = ctx.tree.node(binding(inst, arg));
      StringLiteral lit = string_literal(leaf.text);
      auto decoded =
          unescape_string(std::string_view(leaf.text).substr(lit.body_from, lit.body_to - lit.body_from), lit.quote);
      TextChange raw = escape_change(
          decoded, {payload["from"].get<std::size_t>(), payload["to"].get<std::size_t>(), payload["insert"]},
          lit.quote);
      const std::size_t base = leaf.range.from + lit.body_from;
      return ChangeRequest{{{base + raw.from, base + raw.to, raw.insert}}, {}, false};
    };
  }
  if (kind == "replace-bindings") {
    return [](const ToolInstance& inst, const json& payload, const ToolContext& ctx) {
      if (!payload.is_object() || payload.empty()) throw Error(ErrorCode::BadRequest, "payload needs binding values");
      std::vector<TextChange> changes;
      for (const auto& [name, value] : payload.items()) {
        auto edit = plan_replace(ctx.tree, ctx.language, binding(inst, name), source_text(value));
        changes.insert(changes.end(), edit.changes.begin(), edit.changes.end());
      }
      std::sort(changes.begin(), changes.end(), [](const auto& a, const auto& b) { return a.from > b.from; });
      return ChangeRequest{std::move(changes), {}, false};
    };
  }
  throw Error(ErrorCode::BadRequest, "unknown action kind " + kind);
}

std::shared_ptr<const ToolDefinition> make_definition(const json& entry, const Language& lang) {
  auto def = std::make_shared<ToolDefinition>();
  def->id = entry.at("id").get<std::string>();
  def->display = parse_display_type(entry.value("display", "Replace"));
  def->query = make_query(entry.at("match"), lang);
  def->constraints = make_constraints(entry.value("constraint", ""), def->query);
  def->fragment_bindings = entry.value("fragments", std::vector<std::string>{});
  def->stream_bindings = entry.value("streams", std::vector<std::string>{});
  if (entry.contains("fragmentScope")) def->fragment_scope = entry["fragmentScope"].get<std::set<std::string>>();
  const json layout = entry.value("view", json::array());
  const DisplayType display = def->display;
  def->view = [layout, display](const ToolInstance& inst, const ToolContext& ctx) {
    return render(layout, inst, ctx, display);
  };
  std::map<std::string, Action> actions;
  const json declared = entry.value("actions", json::object());
  for (const auto& [name, spec] : declared.items()) {
    def->actions.insert(name);
    actions.emplace(name, make_action(spec.get<std::string>()));
  }
  def->act = [actions](const ToolInstance& inst, const std::string& action, const json& payload,
                       const ToolContext& ctx) { return actions.at(action)(inst, payload, ctx); };
  return def;
}

}  // namespace

StringLiteral string_literal(std::string_view text) {
  std::size_t p = 0;
  while (p < text.size() && std::isalpha(static_cast<unsigned char>(text[p]))) ++p;
  if (p >= text.size()) return {'"', text.size(), text.size()};
  const char q = text[p];
  std::size_t width = 1;
  if (text.size() >= p + 6 && text.substr(p, 3) == std::string(3, q)) width = 3;
  const std::size_t from = std::min(text.size(), p + width);
  const std::size_t to = text.size() >= from + width ? text.size() - width : from;
  return {q, from, to};
}

DefinitionList load_tools(const json& manifest, std::string_view language_id, const ToolOptions& options) {
  const Language& lang = language(language_id);
  DefinitionList out;
  for (const auto& entry : manifest.at("tools")) {
    if (entry.value("optIn", false) && !(entry.at("id") == "toplevel-guard" && options.toplevel_guard)) continue;
    if (entry.contains("languages")) {
      const auto langs = entry["languages"].get<std::vector<std::string>>();
      if (std::find(langs.begin(), langs.end(), lang.id) == langs.end()) continue;
    }
    if (entry.at("match").contains("identifierPrefix") && lang.identifier_kind.empty()) continue;
    try {
      out.push_back(make_definition(entry, lang));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TemplateError) throw;
    }
  }
  return out;
}

const json& bundled_manifest() {
  static const json manifest = json::parse(*detail::embedded_file("tools/manifest.json"));
  return manifest;
}

DefinitionList bundled_tools(std::string_view language_id, const ToolOptions& options) {
  return load_tools(bundled_manifest(), language_id, options);
}

}  // namespace trellis
