#include <doctest.h>

#include "edit/structured_edit.hpp"
#include "support/fixtures.hpp"

using namespace trellis;
using namespace trellis::testing;

namespace {

struct ListCase {
  const char* lang;
  const char* text;
  const char* kind;  // list-bearing node
  const char* insert;
};

Parsed parse_in(std::string_view lang, std::string_view text) { return parse(text, lang); }

std::string run(const Parsed& p, const PlannedEdit& e) { return apply_changes(p.tree.text(), e.changes); }

NodeId first_of(const SyntaxTree& tree, const char* kind) {
  auto ids = nodes_of_kind(tree, kind);
  REQUIRE_FALSE(ids.empty());
  return ids.front();
}

// Sources of the first list's elements in the first `kind` node.
std::vector<std::string> elements(const Parsed& p, const char* kind) {
  NodeId n = first_of(p.tree, kind);
  auto m = language(p.tree.language_id()).rules->match(p.tree, n);
  REQUIRE(m);
  REQUIRE_FALSE(m->lists.empty());
  std::vector<std::string> out;
  for (std::size_t i : m->lists[0].elements) out.emplace_back(p.tree.source(m->children[i]));
  return out;
}

const std::vector<ListCase> kCases = {
    {"javascript", "var a = [1, 2, 3];", "array", "x"},
    {"javascript", "var a = [1];", "array", "x"},
    {"javascript", "var a = [];", "array", "x"},
    {"javascript", "f(a, b);", "arguments", "g(1)"},
    {"javascript", "var a = [1, 2,];", "array", "x"},
    {"javascript", "var a = 1;\nvar b = 2;\n", "program", "var c = 3;"},
    {"python", "x = (1, 2)\n", "tuple", "y"},
    {"python", "x = (1,)\n", "tuple", "y"},
    {"python", "x = ()\n", "tuple", "y"},
    {"python", "x = [1, 2, 3]\n", "list", "y"},
    {"python", "x = [1]\n", "list", "y"},
    {"python", "x = []\n", "list", "y"},
    {"toy", "void main(int, char,);", "function_declaration", "float"},
    {"toy", "void main(int,);", "function_declaration", "float"},
    {"toy", "void main();", "function_declaration", "float"},
    {"toy", "group g { a | b };", "group_declaration", "c"},
    {"sexp", "(a (b) c)", "list", "(d e)"},
    {"sexp", "(a)", "list", "b"},
    {"sexp", "()", "list", "b"},
};

}  // namespace

TEST_SUITE("structured_edit") {
  TEST_CASE("insert examples") {
    auto p = parse_in("javascript", "var a = [1, 3];");
    CHECK(run(p, plan_insert(p.tree, language("javascript"), first_of(p.tree, "array"), "2", 1)) == "var a = [1, 2, 3];");
    auto q = parse_in("javascript", "var a = [];");
    CHECK(run(q, plan_insert(q.tree, language("javascript"), first_of(q.tree, "array"), "1", 0)) == "var a = [1];");
    auto t = parse_in("toy", "void main(int, char,);");
    auto e = plan_insert(t.tree, language("toy"), first_of(t.tree, "function_declaration"), "float", 1);
    CHECK(run(t, e) == "void main(int, float, char,);");
    auto s = parse_in("sexp", "(a (b)(c))");
    auto inner = nodes_of_kind(s.tree, "list").front();
    CHECK(run(s, plan_insert(s.tree, language("sexp"), inner, "(x)", 2)) == "(a (b)(x)(c))");
  }

  TEST_CASE("insert errors") {
    auto p = parse_in("javascript", "var a = [1];");
    const auto& js = language("javascript");
    CHECK_THROWS_AS(plan_insert(p.tree, js, first_of(p.tree, "array"), "2", 2), Error);
    try {
      plan_insert(p.tree, js, first_of(p.tree, "number"), "2", 0);
      FAIL("expected NotAList");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotAList);
    }
  }

  TEST_CASE("delete examples") {
    const auto& js = language("javascript");
    auto p = parse_in("javascript", "[1, 2, 3];");
    CHECK(run(p, plan_delete(p.tree, js, find_node(p.tree, "number", "2"))) == "[1, 3];");
    CHECK(run(p, plan_delete(p.tree, js, find_node(p.tree, "number", "3"))) == "[1, 2];");
    auto q = parse_in("javascript", "[1];");
    CHECK(run(q, plan_delete(q.tree, js, find_node(q.tree, "number", "1"))) == "[];");
    auto r = parse_in("javascript", "a + b;");
    NodeId plus = find_node(r.tree, "+", "+");
    try {
      plan_delete(r.tree, js, plus);
      FAIL("expected CannotDelete");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CannotDelete);
    }
    auto s = parse_in("javascript", "function f() { return x; }");
    CHECK(run(s, plan_delete(s.tree, js, find_node(s.tree, "identifier", "x"))) == "function f() { return; }");
  }

  TEST_CASE("tuple keeps its comma with one element left") {
    const auto& py = language("python");
    auto p = parse_in("python", "x = (1, 2)\n");
    CHECK(run(p, plan_delete(p.tree, py, find_node(p.tree, "integer", "2"))) == "x = (1,)\n");
    CHECK(run(p, plan_delete(p.tree, py, find_node(p.tree, "integer", "1"))) == "x = (2,)\n");
    auto q = parse_in("python", "x = ()\n");
    CHECK(run(q, plan_insert(q.tree, py, first_of(q.tree, "tuple"), "1", 0)) == "x = (1,)\n");
  }

  TEST_CASE("trailing separator style is kept") {
    auto p = parse_in("javascript", "[1, 2,];");
    CHECK(run(p, plan_insert(p.tree, language("javascript"), first_of(p.tree, "array"), "3", 2)) == "[1, 2, 3,];");
  }

  TEST_CASE("separator whitespace copies the nearest separator") {
    auto p = parse_in("javascript", "[1,2,  3];");
    CHECK(run(p, plan_insert(p.tree, language("javascript"), first_of(p.tree, "array"), "4", 3)) == "[1,2,  3,  4];");
    CHECK(run(p, plan_insert(p.tree, language("javascript"), first_of(p.tree, "array"), "0", 0)) == "[0,1,2,  3];");
  }

  TEST_CASE("adapter") {
    const auto& js = language("javascript");
    GrammarAdapter a(js);
    auto p = parse_in("javascript", "f([], 1);");
    CHECK(a.list_info(p.tree, find_node(p.tree, "number", "1")).in_list);
    CHECK(a.list_info(p.tree, find_node(p.tree, "number", "1")).separator == ",");
    CHECK_FALSE(a.list_info(p.tree, find_node(p.tree, "identifier", "f")).in_list);
    CHECK(a.first_insert_position(p.tree, first_of(p.tree, "array")) == 3);
    CHECK(a.parenthesizable(p.tree, find_node(p.tree, "number", "1")));
    CHECK_FALSE(a.parenthesizable(p.tree, first_of(p.tree, "arguments")));
    auto s = parse_in("sexp", "(a b)");
    CHECK(GrammarAdapter(language("sexp")).list_info(s.tree, find_node(s.tree, "atom", "b")).separator.empty());
  }

  // Property: insert places the element at index i, reparses cleanly, and
  // deleting it restores the text byte-exactly.
  TEST_CASE("insert then delete is the identity") {
    for (const auto& c : kCases) {
      const auto& lang = language(c.lang);
      auto p = parse_in(c.lang, c.text);
      REQUIRE_FALSE(p.tree.has_errors());
      const std::size_t n = elements(p, c.kind).size();
      for (std::size_t i = 0; i <= n; ++i) {
        CAPTURE(c.text);
        CAPTURE(i);
        auto edit = plan_insert(p.tree, lang, first_of(p.tree, c.kind), c.insert, i);
        auto q = parse_in(c.lang, run(p, edit));
        CAPTURE(q.tree.text());
        REQUIRE_FALSE(q.tree.has_errors());
        auto after = elements(q, c.kind);
        REQUIRE(after.size() == n + 1);
        CHECK(after[i] == c.insert);
        NodeId list = first_of(q.tree, c.kind);
        auto m = lang.rules->match(q.tree, list);
        NodeId created = m->children[m->lists[0].elements[i]];
        CHECK(run(q, plan_delete(q.tree, lang, created)) == c.text);
      }
    }
  }

  TEST_CASE("replace probe") {
    const auto& py = language("python");
    auto p = parse_in("python", "a * 4\n");
    NodeId a = find_node(p.tree, "identifier", "a");
    auto bare = plan_replace(p.tree, py, a, "b");
    CHECK(run(p, bare) == "b * 4\n");
    CHECK_FALSE(bare.parenthesized);
    auto sum = plan_replace(p.tree, py, a, "2 + 3");
    CHECK(run(p, sum) == "(2 + 3) * 4\n");
    CHECK(sum.parenthesized);
    // Soundness: the bare form has no node at the inserted range.
    auto naive = parse_in("python", "2 + 3 * 4\n");
    CHECK(node_at_range(naive.tree, {0, 5}) == kNoNode);
    auto right = plan_replace(p.tree, py, find_node(p.tree, "integer", "4"), "3 + 1");
    CHECK(run(p, right) == "a * (3 + 1)\n");
    auto naive2 = parse_in("python", "a * 3 + 1\n");
    CHECK(node_at_range(naive2.tree, {4, 9}) == kNoNode);
    CHECK_FALSE(parse_in("python", run(p, right)).tree.has_errors());
  }

  TEST_CASE("replace with own source is byte-identical") {
    for (const char* lang : {"javascript", "python"}) {
      auto p = parse_in(lang, read_fixture(std::string("corpus.") + (std::string(lang) == "python" ? "py" : "js")));
      std::size_t checked = 0;
      for (NodeId id : p.tree.leaves()) {
        const SyntaxNode& n = p.tree.node(id);
        if (n.is_trivia || n.range.empty()) continue;
        if (n.kind != language(lang).identifier_kind && n.kind != "number" && n.kind != "integer") continue;
        CHECK(run(p, plan_replace(p.tree, language(lang), id, n.text)) == p.tree.text());
        ++checked;
      }
      CHECK(checked > 10);
    }
  }

  TEST_CASE("replace failure") {
    auto p = parse_in("javascript", "f(a);");
    try {
      plan_replace(p.tree, language("javascript"), find_node(p.tree, "identifier", "a"), "var x");
      FAIL("expected ReplaceFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ReplaceFailed);
    }
  }

  TEST_CASE("wrap") {
    const auto& js = language("javascript");
    auto p = parse_in("javascript", "x;");
    CHECK(run(p, plan_wrap(p.tree, js, find_node(p.tree, "identifier", "x"), "[\"__watch\", ", "][1]")) ==
          "[\"__watch\", x][1];");
    auto q = parse_in("javascript", "2 + 3;");
    auto neg = plan_wrap(q.tree, js, first_of(q.tree, "binary_expression"), "-", "");
    CHECK(run(q, neg) == "-(2 + 3);");
    CHECK(neg.parenthesized);
    auto r = parse_in("javascript", "a;");
    CHECK(run(r, plan_wrap(r.tree, js, find_node(r.tree, "identifier", "a"), "f(", ")")) == "f(a);");
  }
}
