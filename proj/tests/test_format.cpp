#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soac/format.hpp"
#include "soac/generators.hpp"

using namespace soac;

TEST_CASE("parse a minimal instance") {
  ParsedFile pf = parse_instance_text(
      "soac 1\n"
      "vertices 3\n"
      "arc 0 1 lat 1 1/2\n"
      "arc 1 2 lat 3/4\n"
      "agent 0 2\n");
  CHECK(pf.instance.graph.vertex_count == 3);
  REQUIRE(pf.instance.graph.arcs.size() == 2);
  CHECK(pf.instance.graph.arcs[0].tail == 0);
  CHECK(pf.instance.graph.arcs[0].head == 1);
  CHECK(pf.instance.latencies[0] == std::vector<Rat>{Rat(1), Rat(1, 2)});
  CHECK(pf.instance.latencies[1] == std::vector<Rat>{Rat(3, 4)});
  REQUIRE(pf.instance.agents.size() == 1);
  CHECK_FALSE(pf.instance.lambda.has_value());
  CHECK_FALSE(pf.instance.alpha.has_value());
  CHECK_FALSE(pf.layout.has_value());
}

TEST_CASE("comments, blank lines, and repeated agents") {
  ParsedFile pf = parse_instance_text(
      "# header comment\n"
      "soac 1\n"
      "\n"
      "vertices 2\n"
      "arc 0 1 lat 1  # trailing comment\n"
      "agent 0 1\n"
      "agent 0 1\n"  // multiplicity by repetition
      "lambda 5/2\n"
      "alpha 1\n");
  CHECK(pf.instance.agents.size() == 2);
  CHECK(pf.instance.lambda == Rat(5, 2));
  CHECK(pf.instance.alpha == 1);
}

TEST_CASE("layout sections parse and validate") {
  ParsedFile pf = parse_instance_text(
      "soac 1\n"
      "vertices 4\n"
      "arc 0 1 lat 1\n"
      "arc 1 2 lat 1\n"
      "arc 2 3 lat 1\n"
      "agent 0 3\n"
      "tree -1 0 1 2\n"
      "root 0\n");
  REQUIRE(pf.layout.has_value());
  CHECK(pf.layout->root == 0);
  CHECK(pf.layout->parent[0] == 0);  // -1 in the file marks the root
  CHECK(pf.layout->parent[3] == 2);

  ParsedFile ex = parse_instance_text(
      "soac 1\n"
      "vertices 3\n"
      "arc 0 1 lat 1\n"
      "arc 1 2 lat 1\n"
      "agent 0 2\n"
      "tree -1 0 1\n"
      "extra 0 2\n"
      "root 0\n");
  REQUIRE(ex.layout.has_value());
  REQUIRE(ex.layout->extra_edges.size() == 1);
  CHECK(ex.layout->extra_edges[0] == make_edge(0, 2));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_instance_text(""), ParseError);
  CHECK_THROWS_AS(parse_instance_text("soac 2\nvertices 1\n"), ParseError);
  CHECK_THROWS_AS(parse_instance_text("vertices 1\nsoac 1\n"), ParseError);
  CHECK_THROWS_AS(
      parse_instance_text("soac 1\nvertices 2\narc 0 5 lat 1\n"), ParseError);
  // A bare "lat" is legal: capacity-0 arcs exist.  A missing keyword is not.
  CHECK(parse_instance_text("soac 1\nvertices 2\narc 0 1 lat\n")
            .instance.latencies[0]
            .empty());
  CHECK_THROWS_AS(
      parse_instance_text("soac 1\nvertices 2\narc 0 1 1\n"), ParseError);
  CHECK_THROWS_AS(
      parse_instance_text("soac 1\nvertices 2\nagent 0\n"), ParseError);
  CHECK_THROWS_AS(
      parse_instance_text("soac 1\nvertices 2\nnonsense 1 2\n"), ParseError);
  // Self-loop arcs are a model error surfaced at parse time.
  CHECK_THROWS_AS(
      parse_instance_text("soac 1\nvertices 2\narc 1 1 lat 1\n"), ParseError);

  try {
    parse_instance_text("soac 1\nvertices 2\narc 0 bad lat 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("serialize then parse is the identity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSpec spec;
    spec.vertex_count = 4 + static_cast<int>(seed % 4);
    spec.arc_count = spec.vertex_count + static_cast<int>(seed % 4);
    spec.agent_count = 1 + static_cast<int>(seed % 3);
    spec.seed = seed;
    Instance inst = gen_random(spec);
    if (seed % 2) inst.lambda = Rat(7, 3);
    if (seed % 3 == 0) inst.alpha = 1;

    std::string text = serialize_instance(inst);
    ParsedFile back = parse_instance_text(text);
    CAPTURE(seed);
    // Byte-exact round trip: serialization is canonical.
    CHECK(serialize_instance(back.instance) == text);
    CHECK(back.instance.graph.vertex_count == inst.graph.vertex_count);
    CHECK(back.instance.graph.arcs.size() == inst.graph.arcs.size());
    CHECK(back.instance.latencies == inst.latencies);
    CHECK(back.instance.agents.size() == inst.agents.size());
    CHECK(back.instance.lambda == inst.lambda);
    CHECK(back.instance.alpha == inst.alpha);
  }
}

TEST_CASE("layout round trip") {
  Instance inst = gen_random({6, 9, 2, 2, 4, 42});
  FindLayoutResult r = find_layout(inst);
  std::string text = serialize_instance(inst, &r.layout);
  ParsedFile back = parse_instance_text(text);
  REQUIRE(back.layout.has_value());
  CHECK(back.layout->parent == r.layout.parent);
  CHECK(back.layout->root == r.layout.root);
  CHECK(back.layout->extra_edges == r.layout.extra_edges);
  CHECK(serialize_instance(back.instance, &*back.layout) == text);
}
