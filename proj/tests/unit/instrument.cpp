#include <doctest.h>

#include <httplib.h>

#include "instrument/collector.hpp"
#include "instrument/rewrite.hpp"
#include "support/fixtures.hpp"
#include "support/sandbox.hpp"

using namespace trellis;
using namespace trellis::testing;
using nlohmann::json;

TEST_SUITE("instrument") {
  TEST_CASE("wrapper text") {
    auto p = parse("var c = n ** 3;", "javascript");
    NodeId e = nodes_of_kind(p.tree, "binary_expression").front();
    const std::string out = rewrite_for_watch(p.tree, language("javascript"), e, 7);
    CHECK(out ==
          "(e => (fetch(\"http://localhost:3000/watch\", { method: \"POST\", body: JSON.stringify({ id: 7, e }), "
          "headers: { \"Content-Type\": \"application/json\" } }), e))(n ** 3)");
    CHECK(is_watch_wrapper(out));
    CHECK_FALSE(is_watch_wrapper("f(n ** 3)"));
    // The wrapper parses cleanly and rewriting it again changes nothing.
    auto q = parse("var c = " + out + ";", "javascript");
    REQUIRE_FALSE(q.tree.has_errors());
    NodeId call = find_node(q.tree, "call_expression", out);
    CHECK(rewrite_for_watch(q.tree, language("javascript"), call, 7) == out);
  }

  TEST_CASE("rewrite errors") {
    auto p = parse("var c = 1;", "javascript");
    try {
      rewrite_for_watch(p.tree, language("javascript"), nodes_of_kind(p.tree, "variable_declaration").front(), 1);
      FAIL("expected NotAnExpression");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotAnExpression);
    }
    auto py = parse("x = 1\n", "python");
    try {
      rewrite_for_watch(py.tree, language("python"), find_node(py.tree, "integer", "1"), 1);
      FAIL("expected UnsupportedGrammar");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedGrammar);
    }
  }

  TEST_CASE("shadow copy leaves the document alone") {
    auto p = parse("var a = f(x + 1);", "javascript");
    NodeId sum = nodes_of_kind(p.tree, "binary_expression").front();
    NodeId call = nodes_of_kind(p.tree, "call_expression").front();
    const std::string before = p.tree.text();
    std::string shadow = instrument_document(p.tree, language("javascript"), {{sum, 2}, {call, 1}}, "http://h:1/w");
    CHECK(p.tree.text() == before);
    CHECK(shadow == "var a = " + watch_wrapper("f(" + watch_wrapper("x + 1", 2, "http://h:1/w") + ")", 1, "http://h:1/w") + ";");
    CHECK_FALSE(parse(shadow, "javascript").tree.has_errors());
  }

  TEST_CASE("value streams") {
    ValueHub hub;
    hub.set_known({7});
    CHECK(collect_value(hub, R"({"id":7,"e":8})") == 204);
    CHECK(collect_value(hub, R"({"id":7,"e":27})") == 204);
    CHECK(collect_value(hub, R"({"id":999,"e":1})") == 204);
    CHECK(collect_value(hub, R"({"e":1})") == 400);
    CHECK(collect_value(hub, "not json") == 400);
    CHECK(hub.dropped_count() == 1);
    CHECK(hub.history(7).empty());  // nothing delivered before pump
    CHECK(hub.pump() == 2);
    auto h = hub.history(7);
    REQUIRE(h.size() == 2);
    CHECK(h[0].value == 8);
    CHECK(h[1].value == 27);
    CHECK(h[0].sequence < h[1].sequence);
    CHECK(hub.last(7) == json(27));

    std::vector<json> seen;
    auto sub = hub.subscribe(7, [&](const ValueEvent& e) { seen.push_back(e.value); });
    CHECK(seen == std::vector<json>{8, 27});  // history replayed first
    hub.post(7, 64);
    hub.pump();
    CHECK(seen == std::vector<json>{8, 27, 64});
    hub.unsubscribe(sub);
    hub.post(7, 125);
    hub.pump();
    CHECK(seen.size() == 3);
  }

  TEST_CASE("history cap and value caps") {
    ValueHub hub;
    hub.add_known(1);
    for (int i = 0; i < 100; ++i) hub.post(1, i);
    hub.pump();
    auto h = hub.history(1);
    REQUIRE(h.size() == kHistoryCap);
    CHECK(h.front().value == 100 - static_cast<int>(kHistoryCap));
    CHECK(h.back().value == 99);
    json deep = 1;
    for (int i = 0; i < 6; ++i) deep = json::array({deep});
    CHECK(cap_value(deep) == json::parse(R"([[[["[Array]"]]]])"));
    CHECK(cap_value(std::string(3000, 'x')).get<std::string>().size() == kValueStringCap);
  }

  TEST_CASE("collector over HTTP") {
    ValueHub hub;
    hub.add_known(3);
    Collector c(hub);
    int port = c.start(0);
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    auto ok = client.Post("/watch", R"({"id":3,"e":{"a":1}})", "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 204);
    auto bad = client.Post("/watch", R"({"e":1})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    c.stop();
    hub.pump();
    CHECK(hub.last(3) == json{{"a", 1}});
  }

  TEST_CASE("sandbox evaluation matches and posts once per evaluation") {
    ValueHub hub;
    Collector c(hub);
    c.start(0);
    const std::string prelude = "var items = [3, 1, 4];\n";
    auto p = parse(prelude + "items.map(n => n ** 3);", "javascript");
    NodeId expr = nodes_of_kind(p.tree, "call_expression").back();
    hub.add_known(expr);
    std::string shadow = instrument_document(p.tree, language("javascript"), {{expr, expr}}, c.endpoint());
    Sandbox plain;
    json expected = Sandbox::to_json(plain.run(p.tree.text()));
    CHECK(expected == json::array({27, 1, 64}));
    Sandbox live;
    json got = Sandbox::to_json(live.run(shadow));
    CHECK(got == expected);
    CHECK(live.fetch_count() == 1);
    CHECK(live.statuses() == std::vector<int>{204});
    c.stop();
    CHECK(hub.pump() == 1);
    CHECK(hub.last(expr) == expected);
  }
}
