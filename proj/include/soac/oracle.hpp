// Brute-force reference solvers.  They enumerate complete path assignments
// with exact arithmetic and only capacity-based pruning (latency tables may
// be non-monotone, so cost bounds are unsound for pruning).  The enumeration
// order is deterministic; ties keep the first optimum found.
#pragma once

#include <optional>
#include <vector>

#include "soac/model.hpp"

namespace soac {

struct SearchBudget {
  // Upper bound on visited partial states before the solver refuses with a
  // ResourceError.  Scales with nothing: it is a hard safety valve.
  unsigned long long max_states = 10'000'000ULL;
};

struct SolveResult {
  Cost cost;
  // Present iff cost is finite: a structurally valid optimal assignment.
  std::optional<FlowAssignment> witness;
  unsigned long long states_visited = 0;
};

// All simple directed paths from s to t using arcs allowed by arc_enabled
// (nullptr = all arcs), each at most max_len arcs long (max_len < 0 means
// vertex_count - 1).  Emitted in lexicographic order by arc id; contains the
// empty path iff s == t.
std::vector<Path> enumerate_simple_paths(const Digraph& g, Vertex s, Vertex t,
                                         int max_len = -1,
                                         const std::vector<char>* arc_enabled = nullptr);

// Exact minimum-cost routing of every agent.  Cost Infinity (witness absent)
// when no assignment keeps all loads within capacity.
SolveResult solve_soac_oracle(const Instance& inst, const SearchBudget& budget = {});

// Min-max variant: route all but at most alpha agents, minimizing the cost of
// the routed ones.  Witness marks dropped agents Unrouted.  Subsets are tried
// by increasing number of dropped agents, lexicographically within a size.
SolveResult solve_minmax_oracle(const Instance& inst, int alpha,
                                const SearchBudget& budget = {});

}  // namespace soac
