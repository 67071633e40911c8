#include <doctest.h>

#include <algorithm>
#include <map>

#include "tools/bundled.hpp"
#include "tools/escape.hpp"
#include "support/fixtures.hpp"

using namespace trellis;
using namespace trellis::testing;
using nlohmann::json;

namespace {

using Key = std::pair<std::string, NodeId>;

std::multiset<Key> keys(const std::vector<ToolInstance>& instances) {
  std::multiset<Key> out;
  for (const auto& i : instances) out.emplace(i.definition, i.anchor);
  return out;
}

// Independent oracle: every template and the placeholder prefix tried on every node.
std::multiset<Key> brute_force(const SyntaxTree& tree) {
  std::multiset<Key> out;
  const std::vector<std::pair<std::string, std::string>> templates = {
      {"watch", "[\"__watch\", $expression][1]"},
      {"sql", "sql`$_string`"},
      {"slider", "[\"slider\", $min, $max, $step, $value][1]"},
      {"color", "[\"color\", $r, $g, $b][1]"},
  };
  std::vector<std::pair<std::string, Template>> compiled;
  for (const auto& [id, src] : templates) compiled.emplace_back(id, Template::compile(src, "javascript"));
  for (NodeId id : tree.preorder_ids()) {
    for (const auto& [def, t] : compiled) {
      if (t.match(tree, id)) out.emplace(def, id);
    }
    const SyntaxNode& n = tree.node(id);
    if (n.is_leaf && n.kind == "identifier" && n.text.rfind("__VI_PLACEHOLDER_", 0) == 0) out.emplace("placeholder", id);
  }
  return out;
}

std::size_t count(const std::vector<ToolInstance>& v, const std::string& def) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const auto& i) { return i.definition == def; }));
}

// A session with live tools, driven the way the service drives it.
struct Harness {
  SessionState session;
  ToolHost host;

  Harness(const std::string& text, ToolOptions options = {})
      : session("javascript", text), host(bundled_tools("javascript", options)) {
    host.update(session.tree(), session.constraints());
  }

  ToolContext context() const { return {session.tree(), language("javascript"), {}}; }

  ApplyResult apply(const ChangeRequest& r, bool force = false) {
    auto result = session.apply_changes(r, force);
    if (result.outcome != Outcome::Frozen && result.update_tools) host.update(session.tree(), session.constraints());
    if (result.outcome == Outcome::ForceApplied) host.clear(session.constraints());
    return result;
  }

  const ToolInstance& only(const std::string& def) const {
    for (const auto& i : host.instances()) {
      if (i.definition == def) return i;
    }
    FAIL("no instance of " << def);
    throw 0;
  }

  bool paired() const {
    std::set<OwnerId> owners;
    for (auto o : session.constraints().owners()) owners.insert(o);
    std::set<OwnerId> live;
    for (const auto& i : host.instances()) live.insert(i.id);
    return owners == live;
  }
};

}  // namespace

TEST_SUITE("tools") {
  TEST_CASE("matching equals the brute-force oracle on the tool fixture") {
    auto p = parse(read_fixture("tools.js"), "javascript");
    REQUIRE_FALSE(p.tree.has_errors());
    auto inst = instantiate_tools(p.tree, bundled_tools("javascript"));
    CHECK(count(inst, "watch") == 3);
    CHECK(count(inst, "placeholder") == 2);
    CHECK(count(inst, "slider") == 1);
    CHECK(count(inst, "sql") == 1);
    CHECK(keys(inst) == brute_force(p.tree));
    // Purity.
    CHECK(keys(instantiate_tools(p.tree, bundled_tools("javascript"))) == keys(inst));
  }

  TEST_CASE("two markers, no markers") {
    auto p = parse("f([\"__watch\", a][1], [\"__watch\", b + 1][1]);", "javascript");
    auto inst = instantiate_tools(p.tree, bundled_tools("javascript"));
    REQUIRE(inst.size() == 2);
    CHECK(p.tree.source(inst[0].anchor) == "[\"__watch\", a][1]");
    CHECK(p.tree.source(inst[1].anchor) == "[\"__watch\", b + 1][1]");
    CHECK(inst[1].fragments == std::vector<std::vector<NodeId>>{{inst[1].extraction.nodes.at("expression")}});
    auto q = parse("f(a, b);", "javascript");
    CHECK(instantiate_tools(q.tree, bundled_tools("javascript")).empty());
  }

  TEST_CASE("nested watch is found through the fragment") {
    auto p = parse("[\"__watch\", [\"__watch\", x][1]][1];", "javascript");
    auto inst = instantiate_tools(p.tree, bundled_tools("javascript"));
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].depth == 0);
    CHECK(inst[1].depth == 1);
    CHECK(keys(inst) == brute_force(p.tree));
  }

  TEST_CASE("recursion guard bounds a self-embedding tool") {
    auto self = std::make_shared<ToolDefinition>();
    self->id = "mirror";
    self->query = [](const SyntaxTree& tree, NodeId id) -> std::optional<Extraction> {
      if (tree.node(id).kind != "program") return std::nullopt;
      return Extraction{{{"self", id}}, {}};
    };
    self->fragment_bindings = {"self"};
    auto p = parse("a;", "javascript");
    auto inst = instantiate_tools(p.tree, {self});
    CHECK(inst.size() == kDefaultRecursionLimit + 1);
    CHECK(inst.back().depth == kDefaultRecursionLimit);
    CHECK(instantiate_tools(p.tree, {self}, 3).size() == 4);
  }

  TEST_CASE("a throwing query disables only its definition") {
    auto bad = std::make_shared<ToolDefinition>();
    bad->id = "bad";
    bad->query = [](const SyntaxTree&, NodeId) -> std::optional<Extraction> { throw std::runtime_error("boom"); };
    DefinitionList defs = bundled_tools("javascript");
    defs.insert(defs.begin(), bad);
    SessionState s("javascript", "[\"__watch\", a][1];");
    ToolHost host(defs);
    host.update(s.tree(), s.constraints());
    CHECK(host.instances().size() == 1);
    REQUIRE(host.disabled().count("bad"));
    CHECK(host.disabled().at("bad") == "boom");
  }

  TEST_CASE("lifecycle pairing and anchor stability") {
    Harness h("var a = [\"__watch\", x][1];\nvar b = __VI_PLACEHOLDER_name;\n");
    REQUIRE(h.host.instances().size() == 2);
    CHECK(h.paired());
    const auto watch = h.only("watch");
    auto r = h.apply({{{0, 0, "var c = 1;\n"}}, {}, false});
    CHECK(r.outcome == Outcome::Accepted);
    CHECK(h.only("watch").id == watch.id);
    CHECK(h.only("watch").anchor == watch.anchor);
    CHECK(h.paired());
    auto w = h.host.dispatch(watch.id, "remove", json::object(), h.context());
    CHECK(w.intent_delete_nodes == std::set<NodeId>{watch.anchor});
    CHECK(h.apply(w).outcome == Outcome::Accepted);
    CHECK(h.session.text() == "var c = 1;\nvar a = x;\nvar b = __VI_PLACEHOLDER_name;\n");
    CHECK(h.host.instances().size() == 1);
    CHECK(h.paired());
  }

  TEST_CASE("watch freezes on a stray quote") {
    Harness h("f([\"__watch\", x][1]);");
    auto anchor = h.only("watch").anchor;
    std::size_t at = h.session.tree().node(anchor).range.from + 12;
    REQUIRE(h.session.text().substr(at, 1) == "x");
    auto r = h.apply({{{at, at, "\""}}, {}, false});
    CHECK(r.outcome == Outcome::Frozen);
    CHECK(r.violations == std::vector<OwnerId>{h.only("watch").id});
  }

  TEST_CASE("placeholder input") {
    Harness h("var n = __VI_PLACEHOLDER_max_items;");
    const auto ph = h.only("placeholder");
    CHECK(ph.extraction.scalars.at("label") == "max items");
    auto view = h.host.view(ph, h.context());
    CHECK(view["children"][0]["type"] == "input");
    CHECK(view["children"][0]["label"] == "max items");
    auto req = h.host.dispatch(ph.id, "input", {{"text", "x"}}, h.context());
    CHECK(req.require_continue_input);
    CHECK(req.intent_delete_nodes.count(ph.anchor));
    auto r = h.apply(req);
    CHECK(r.outcome == Outcome::Accepted);
    CHECK_FALSE(r.update_tools);
    CHECK(h.session.text() == "var n = x;");
  }

  TEST_CASE("stale and unknown actions") {
    Harness h("var n = __VI_PLACEHOLDER_a;");
    const InstanceId id = h.only("placeholder").id;
    CHECK_THROWS_WITH_AS(h.host.dispatch(id, "nope", {}, h.context()), doctest::Contains("no action"), Error);
    h.apply(h.host.dispatch(id, "input", {{"text", "1"}}, h.context()));
    h.host.update(h.session.tree(), h.session.constraints());
    try {
      h.host.dispatch(id, "input", {{"text", "2"}}, h.context());
      FAIL("expected StaleInstance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StaleInstance);
    }
  }

  TEST_CASE("sql editor writes escaped text back") {
    Harness h("q(sql`SELECT a FROM t`);");
    const auto sql = h.only("sql");
    auto view = h.host.view(sql, h.context());
    CHECK(view["children"][0]["text"] == "SELECT a FROM t");
    auto req = h.host.dispatch(sql.id, "edit", {{"from", 7}, {"to", 8}, {"insert", "`a`"}}, h.context());
    CHECK(h.apply(req).outcome == Outcome::Accepted);
    CHECK(h.session.text() == "q(sql`SELECT \\`a\\` FROM t`);");
    const auto& again = h.only("sql");
    CHECK(again.id == sql.id);
    CHECK(h.host.view(again, h.context())["children"][0]["text"] == "SELECT `a` FROM t");
  }

  TEST_CASE("slider and color") {
    Harness h("var v = [\"slider\", 0, 255, 1, 73][1];\nvar c = [\"color\", 10, 20, 30][1];");
    const auto slider = h.only("slider");
    auto view = h.host.view(slider, h.context())["children"][0];
    CHECK(view["min"] == 0);
    CHECK(view["max"] == 255);
    CHECK(view["value"] == 73);
    CHECK(h.apply(h.host.dispatch(slider.id, "set", {{"value", 100}}, h.context())).outcome == Outcome::Accepted);
    CHECK(h.session.text().starts_with("var v = [\"slider\", 0, 255, 1, 100][1];"));
    const auto& color = h.only("color");
    CHECK(h.host.definition("color").stream_bindings == std::vector<std::string>{"r", "g", "b"});
    auto req = h.host.dispatch(color.id, "set", {{"r", 1}, {"g", 2}, {"b", 3}}, h.context());
    CHECK(h.apply(req).outcome == Outcome::Accepted);
    CHECK(h.session.text().ends_with("var c = [\"color\", 1, 2, 3][1];"));
  }

  TEST_CASE("top-level guard") {
    const std::string text = "var a = 5\nb";
    Harness guarded(text, {true});
    auto r = guarded.apply({{{9, 9, "+"}}, {}, false});
    CHECK(r.outcome == Outcome::Frozen);
    Harness open(text);
    auto s = open.apply({{{9, 9, "+"}}, {}, false});
    CHECK(s.outcome == Outcome::Accepted);
    CHECK(open.session.tree().named_children(open.session.tree().root()).size() == 1);
    // Edits that keep statements top-level pass the guard.
    CHECK(guarded.apply({}, true).outcome != Outcome::Frozen);
  }

  TEST_CASE("escape round trip and index map") {
    const json strings = json::parse(read_fixture("strings.json"));
    for (const auto& [group, quote] : std::vector<std::pair<std::string, char>>{{"backtick", '`'}, {"double", '"'}}) {
      for (const auto& s : strings[group]) {
        const std::string raw = s.get<std::string>();
        CAPTURE(raw);
        auto u = unescape_string(raw, quote);
        CHECK(escape_string(u.text, quote) == raw);
        REQUIRE(u.raw_offsets.size() == u.text.size() + 1);
        CHECK(std::is_sorted(u.raw_offsets.begin(), u.raw_offsets.end()));
        for (std::size_t i = 0; i <= u.text.size(); ++i) CHECK(u.from_raw(u.to_raw(i)) <= i);
      }
    }
    CHECK(escape_string("`", '`') == "\\`");
    CHECK(escape_string("${x}", '`') == "\\${x}");
    CHECK(unescape_string("\\u00e9\\x41", '"').text == "\xc3\xa9" "A");
    auto d = unescape_string("a\\`b", '`');
    CHECK(d.text == "a`b");
    CHECK(escape_change(d, {2, 2, "`"}, '`') == TextChange{3, 3, "\\`"});
    auto dollar = unescape_string("$", '`');
    CHECK(escape_change(dollar, {1, 1, "{"}, '`').insert == "\\{");
  }

  TEST_CASE("string literal bounds") {
    auto a = string_literal("`abc`");
    CHECK(a.quote == '`');
    CHECK(a.body_from == 1);
    CHECK(a.body_to == 4);
    auto b = string_literal("f\"\"\"x\"\"\"");
    CHECK(b.quote == '"');
    CHECK(b.body_from == 4);
    CHECK(b.body_to == 5);
  }

  TEST_CASE("manifest") {
    const auto& m = bundled_manifest();
    CHECK(m["tools"].size() == 6);
    CHECK(bundled_tools("javascript").size() == 5);
    CHECK(bundled_tools("javascript", {true}).size() == 6);
    // No SQL for Python; toy has no list literal syntax for the array templates.
    auto py = bundled_tools("python");
    CHECK(std::none_of(py.begin(), py.end(), [](const auto& d) { return d->id == "sql"; }));
  }
}
