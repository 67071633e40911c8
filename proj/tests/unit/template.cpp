#include <doctest.h>

#include "support/fixtures.hpp"
#include "syntax/template.hpp"

using namespace trellis;
using namespace trellis::testing;

namespace {

// Substitutes each binding's source into the template text and reparses.
bool sound(const Template& t, const SyntaxTree& tree, NodeId node, const Bindings& b) {
  std::string text = t.rewritten();
  std::vector<std::pair<TextRange, std::string>> edits;
  for (const auto& [name, bound] : b) {
    edits.push_back({t.pattern().node(t.hole(name)).range, std::string(tree.source(bound))});
  }
  std::sort(edits.begin(), edits.end(), [](auto& x, auto& y) { return x.first.from > y.first.from; });
  for (auto& [r, s] : edits) text.replace(r.from, r.size(), s);
  auto reparsed = parse(text, tree.language_id());
  NodeId root = reparsed.tree.root();
  for (auto kids = reparsed.tree.named_children(root); kids.size() == 1; kids = reparsed.tree.named_children(root))
    root = kids.front();
  return structurally_equal(reparsed.tree, root, tree, node, true);
}

}  // namespace

TEST_SUITE("template") {
  TEST_CASE("watch marker binds its expression") {
    auto t = Template::compile("[\"__watch\", $expression][1]", "javascript");
    REQUIRE(t.placeholders().size() == 1);
    CHECK(t.placeholders()[0].name == "expression");
    CHECK_FALSE(t.placeholders()[0].kind.has_value());
    auto p = parse("x = [\"__watch\", list.map(n => n ** 3)][1];", "javascript");
    auto subs = nodes_of_kind(p.tree, "subscript_expression");
    REQUIRE(subs.size() == 1);
    auto b = t.match(p.tree, subs[0]);
    REQUIRE(b.has_value());
    CHECK(p.tree.source(b->at("expression")) == "list.map(n => n ** 3)");
    CHECK(sound(t, p.tree, subs[0], *b));
  }

  TEST_CASE("slider marker is not a watch") {
    auto t = Template::compile("[\"__watch\", $expression][1]", "javascript");
    auto p = parse("[\"slider\", 0, 255, 1, 73][1]", "javascript");
    auto subs = nodes_of_kind(p.tree, "subscript_expression");
    REQUIRE(subs.size() == 1);
    CHECK_FALSE(t.match(p.tree, subs[0]).has_value());
  }

  TEST_CASE("kind-constrained string placeholder") {
    auto t = Template::compile("sql`$_string`", "javascript");
    REQUIRE(t.placeholders().size() == 1);
    CHECK(t.placeholders()[0].name == "string");
    CHECK(t.placeholders()[0].kind == std::optional<std::string>("string"));
    auto p = parse("q = sql`SELECT 1`;", "javascript");
    auto calls = nodes_of_kind(p.tree, "call_expression");
    REQUIRE(calls.size() == 1);
    auto b = t.match(p.tree, calls[0]);
    REQUIRE(b.has_value());
    CHECK(p.tree.source(b->at("string")) == "`SELECT 1`");
    CHECK(p.tree.node(b->at("string")).kind == "string");
    CHECK(sound(t, p.tree, calls[0], *b));
  }

  TEST_CASE("kind constraint rejects other kinds") {
    auto t = Template::compile("f($_number)", "javascript");
    auto ok = parse("f(1)", "javascript");
    auto bad = parse("f(a)", "javascript");
    CHECK(t.match(ok.tree, nodes_of_kind(ok.tree, "call_expression")[0]).has_value());
    CHECK_FALSE(t.match(bad.tree, nodes_of_kind(bad.tree, "call_expression")[0]).has_value());
  }

  TEST_CASE("trivia is ignored") {
    auto t = Template::compile("[\"__watch\", $e][1]", "javascript");
    auto p = parse("[ \"__watch\" ,  /* c */ a+b ] [1]", "javascript");
    auto b = t.match(p.tree, nodes_of_kind(p.tree, "subscript_expression")[0]);
    REQUIRE(b.has_value());
    CHECK(p.tree.source(b->at("e")) == "a+b");
  }

  TEST_CASE("malformed templates fail at compile time") {
    CHECK_THROWS_AS(Template::compile("[\"__watch\", $e", "javascript"), Error);
    CHECK_THROWS_AS(Template::compile("f($)", "javascript"), Error);
    CHECK_THROWS_AS(Template::compile("f($a, $a)", "javascript"), Error);
    try {
      Template::compile("(", "javascript");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TemplateError);
    }
  }

  TEST_CASE("matching is pure") {
    auto t = Template::compile("$a + $b", "python");
    auto p = parse("x = (1 + 2) + 3\n", "python");
    auto before = to_sexp(p.tree, kNoNode, true);
    for (NodeId id : p.tree.preorder_ids()) {
      auto first = t.match(p.tree, id);
      auto second = t.match(p.tree, id);
      CHECK(first == second);
      if (first) CHECK(sound(t, p.tree, id, *first));
    }
    CHECK(to_sexp(p.tree, kNoNode, true) == before);
  }
}
