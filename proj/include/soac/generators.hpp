// Instance generators for hardness-reduction families, plus brute-force
// deciders for the source problems so the reductions' iff-contracts can be
// checked end to end.
#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "soac/model.hpp"

namespace soac {

// Multidimensional unbounded knapsack selection: pick at least k of the n
// vectors so the componentwise sum stays within the target.
struct MuksInstance {
  std::vector<std::vector<long>> vectors;  // n vectors, each of dimension d
  std::vector<long> target;                // dimension d
  int k = 0;
};

void validate_muks(const MuksInstance& muks);
bool decide_muks(const MuksInstance& muks);  // exhaustive over subsets

// Hub-and-spoke congestion instance whose optimum is <= n - k iff the
// selection exists.  Skeleton is complete bipartite with the two hubs on one
// side and all sources/targets on the other.  Vertex order: sources, hub0
// (free side), hub1 (1/x side), targets.
Instance gen_muks_k2n(const MuksInstance& muks);

// Same decision problem embedded in a planar DAG with skeleton degree <= 3:
// two hub chains, and two mirrored almost-complete binary out-trees sharing
// the target leaves.  The arc entering target j from the free chain's tree
// has capacity target[j].
Instance gen_muks_planar_dag(const MuksInstance& muks);

// Edge-disjoint paths on a complete bipartite graph with three left vertices
// and `right` right vertices; terminal pairs are vertex ids in that graph
// (left ids 0..2, right ids 3..3+right-1).
struct EdpInstance {
  int right = 0;
  std::vector<std::pair<int, int>> pairs;
};

void validate_edp(const EdpInstance& edp);
bool decide_edp(const EdpInstance& edp);  // exhaustive edge-disjoint routing

// Per-edge gadget expansion: each base edge becomes 4 fresh vertices and 9
// unit-capacity zero-latency arcs; edge-disjoint routability iff optimum 0.
Instance gen_edp_gadget(const EdpInstance& edp);

// Monotone cubic CNF (every variable in exactly three clauses, three
// distinct variables per clause, no negations).
struct CnfFormula {
  int variable_count = 0;
  std::vector<std::array<int, 3>> clauses;
};

void validate_one_in_three(const CnfFormula& f);  // cubic + monotone shape
bool decide_one_in_three(const CnfFormula& f);    // exactly one true per clause

// Layered instance (variables, polarity rails, clause gates) with c_max 3
// whose optimum is 0 iff a one-in-three assignment exists.  Vertex order:
// x_i, xT_i, xF_i, cT_j, cF_j, c_j.
Instance gen_one_in_three(const CnfFormula& f);

struct RandomSpec {
  int vertex_count = 6;
  int arc_count = 8;       // includes the connecting tree arcs
  int agent_count = 3;
  int max_cap = 3;         // per-arc capacity drawn from 1..max_cap
  int latency_range = 4;   // numerators 0..range, denominators 1..range
  std::uint64_t seed = 0;
};

// Deterministic seeded instance with a weakly-connected skeleton; parallel
// arcs are allowed but capped at two per unordered vertex pair so boundary
// sizes stay within the width bounds the solvers rely on.
Instance gen_random(const RandomSpec& spec);

}  // namespace soac
