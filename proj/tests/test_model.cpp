#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soac/model.hpp"

using namespace soac;

namespace {

// s -> x -> t chain with unit latencies, one agent.
Instance chain3() {
  Instance inst;
  inst.graph.vertex_count = 3;
  inst.graph.arcs = {{0, 1}, {1, 2}};
  inst.latencies = {{Rat(1)}, {Rat(1)}};
  inst.agents = {{0, 2}};
  return inst;
}

}  // namespace

TEST_CASE("cost arithmetic is exact and infinity absorbs") {
  Cost third(Rat(1, 3));
  Cost one = third + third + third;
  CHECK(one == Cost(Rat(1)));  // no tolerance anywhere

  Cost inf = Cost::infinity();
  CHECK((inf + Cost(Rat(5))).is_infinite());
  CHECK(Cost(Rat(1'000'000)) < inf);
  CHECK(inf == Cost::infinity());
  CHECK_FALSE(inf < inf);
  CHECK_THROWS_AS(inf.value(), ModelError);
}

TEST_CASE("rational strings are canonical") {
  CHECK(rat_to_string(Rat(2, 4)) == "1/2");
  CHECK(rat_to_string(Rat(3)) == "3");
  CHECK(rat_from_string("6/4") == Rat(3, 2));
  CHECK_THROWS_AS(rat_from_string("1.5"), ParseError);
  CHECK_THROWS_AS(rat_from_string("x"), ParseError);
  CHECK(cost_to_string(Cost::infinity()) == "infeasible");
}

TEST_CASE("capacities come from table lengths") {
  Instance inst;
  inst.graph.vertex_count = 2;
  inst.graph.arcs = {{0, 1}, {0, 1}, {1, 0}};
  inst.latencies = {{Rat(1)}, {Rat(1), Rat(1, 2)}, {Rat(1), Rat(1, 2), Rat(1, 3)}};
  CHECK(capacities(inst) == std::vector<int>{1, 2, 3});
  CHECK(max_capacity(inst) == 3);

  Instance empty;
  empty.graph.vertex_count = 1;
  CHECK(max_capacity(empty) == 0);
}

TEST_CASE("instance validation rejects malformed structure") {
  Instance ok = chain3();
  CHECK_NOTHROW(validate_instance(ok));

  Instance self_loop = chain3();
  self_loop.graph.arcs[0] = {1, 1};
  CHECK_THROWS_AS(validate_instance(self_loop), ModelError);

  Instance bad_head = chain3();
  bad_head.graph.arcs[1] = {1, 9};
  CHECK_THROWS_AS(validate_instance(bad_head), ModelError);

  Instance bad_agent = chain3();
  bad_agent.agents[0] = {0, 7};
  CHECK_THROWS_AS(validate_instance(bad_agent), ModelError);

  Instance missing_table = chain3();
  missing_table.latencies.pop_back();
  CHECK_THROWS_AS(validate_instance(missing_table), ModelError);

  Instance bad_alpha = chain3();
  bad_alpha.alpha = -1;
  CHECK_THROWS_AS(validate_instance(bad_alpha), ModelError);
}

TEST_CASE("flow validation") {
  Instance inst = chain3();
  FlowAssignment good{{Path{0, 1}}};
  CHECK_NOTHROW(validate_flow(inst, good, false));

  // Wrong endpoint.
  FlowAssignment short_path{{Path{0}}};
  CHECK_THROWS_AS(validate_flow(inst, short_path, false), ModelError);

  // Broken chain.
  FlowAssignment gap{{Path{1, 0}}};
  CHECK_THROWS_AS(validate_flow(inst, gap, false), ModelError);

  // Unrouted only allowed when asked for.
  FlowAssignment drop{{std::nullopt}};
  CHECK_THROWS_AS(validate_flow(inst, drop, false), ModelError);
  CHECK_NOTHROW(validate_flow(inst, drop, true));

  // A stay-put agent uses the empty path, and only that.
  Instance loop = chain3();
  loop.agents = {{1, 1}};
  FlowAssignment stay{{Path{}}};
  CHECK_NOTHROW(validate_flow(loop, stay, false));
  FlowAssignment wander{{Path{1}}};
  CHECK_THROWS_AS(validate_flow(loop, wander, false), ModelError);

  // Vertex repetition: 0 -> 1 -> 0 is not simple.
  Instance back;
  back.graph.vertex_count = 2;
  back.graph.arcs = {{0, 1}, {1, 0}};
  back.latencies = {{Rat(0)}, {Rat(0)}};
  back.agents = {{0, 0}};
  FlowAssignment loopy{{Path{0, 1}}};
  CHECK_THROWS_AS(validate_flow(back, loopy, false), ModelError);
}

TEST_CASE("loads and cost") {
  Instance inst = chain3();
  FlowAssignment f{{Path{0, 1}}};
  LoadReport rep = loads_and_cost(inst, f);
  CHECK(rep.loads == std::vector<int>{1, 1});
  CHECK(rep.cost == Cost(Rat(2)));

  // Zero agents cost nothing.
  Instance none = chain3();
  none.agents.clear();
  LoadReport rep0 = loads_and_cost(none, FlowAssignment{});
  CHECK(rep0.cost == Cost(Rat(0)));
  CHECK(rep0.loads == std::vector<int>{0, 0});

  // All agents unrouted: loads 0, cost 0.
  Instance mm = chain3();
  mm.alpha = 1;
  LoadReport repu = loads_and_cost(mm, FlowAssignment{{std::nullopt}});
  CHECK(repu.cost == Cost(Rat(0)));
}

TEST_CASE("x agents on a 1/x arc contribute exactly 1") {
  Instance inst;
  inst.graph.vertex_count = 2;
  inst.graph.arcs = {{0, 1}};
  inst.latencies = {{Rat(1, 1), Rat(1, 2), Rat(1, 3)}};
  inst.agents = {{0, 1}, {0, 1}, {0, 1}};
  FlowAssignment f{{Path{0}, Path{0}, Path{0}}};
  LoadReport rep = loads_and_cost(inst, f);
  CHECK(rep.loads == std::vector<int>{3});
  CHECK(rep.cost == Cost(Rat(1)));  // 3 * (1/3), exactly
}

TEST_CASE("overloading an arc costs Infinity") {
  Instance inst;
  inst.graph.vertex_count = 2;
  inst.graph.arcs = {{0, 1}};
  inst.latencies = {{Rat(1)}};  // capacity 1
  inst.agents = {{0, 1}, {0, 1}};
  FlowAssignment f{{Path{0}, Path{0}}};
  LoadReport rep = loads_and_cost(inst, f);
  CHECK(rep.loads == std::vector<int>{2});
  CHECK(rep.cost.is_infinite());
}

TEST_CASE("cost is permutation invariant and monotone under agent removal") {
  Instance inst;
  inst.graph.vertex_count = 3;
  inst.graph.arcs = {{0, 1}, {1, 2}, {0, 2}};
  inst.latencies = {{Rat(1), Rat(3, 2)}, {Rat(1, 2), Rat(2)}, {Rat(5)}};
  inst.agents = {{0, 2}, {0, 2}, {0, 1}};
  FlowAssignment f{{Path{0, 1}, Path{2}, Path{0}}};
  LoadReport rep = loads_and_cost(inst, f);

  // Permute agents (and their paths identically).
  Instance perm = inst;
  perm.agents = {inst.agents[2], inst.agents[0], inst.agents[1]};
  FlowAssignment pf{{Path{0}, Path{0, 1}, Path{2}}};
  LoadReport prep = loads_and_cost(perm, pf);
  CHECK(rep.cost == prep.cost);
  CHECK(rep.loads == prep.loads);

  // Dropping one agent never increases any load.
  Instance fewer = inst;
  fewer.agents.pop_back();
  FlowAssignment ff{{Path{0, 1}, Path{2}}};
  LoadReport frep = loads_and_cost(fewer, ff);
  for (size_t e = 0; e < rep.loads.size(); ++e)
    CHECK(frep.loads[e] <= rep.loads[e]);
}
