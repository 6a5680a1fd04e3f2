// Min-max variant of the width-parameterized solver: up to alpha agents may
// stay unrouted, and snapshots additionally carry which boundary agents are
// routed plus an exact count of unrouted agents with an endpoint in the
// subtree.  Every child is treated as complex; the per-child unrouted counts
// are branched so that the counts compose without double counting agents
// spanning two sibling subtrees.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "soac/decomposition.hpp"
#include "soac/dp_soac.hpp"
#include "soac/model.hpp"
#include "soac/oracle.hpp"

namespace soac {

struct MinMaxSnapshot {
  // Routed boundary agents, ascending original ids.  Agents of the node
  // outside these sets are unrouted by definition.
  std::vector<int> a_out;
  std::vector<int> a_in;
  // Exactly this many agents with at least one endpoint in the subtree are
  // unrouted (0 <= alpha_local <= alpha).
  int alpha_local = 0;
  // As in Snapshot, but with domains exactly a_out / a_in.
  std::vector<std::pair<int, int>> s_out;
  std::vector<std::pair<int, int>> s_in;
  std::vector<std::pair<int, int>> d_pairs;
  std::vector<std::pair<int, int>> r_pairs;

  friend bool operator==(const MinMaxSnapshot&, const MinMaxSnapshot&) = default;
  friend auto operator<=>(const MinMaxSnapshot&, const MinMaxSnapshot&) = default;
};

using MinMaxRecordTable = std::map<MinMaxSnapshot, Cost>;

// Necessary condition: at every node, boundary agents beyond the alpha
// unroutable ones must fit through the cut's capacity.
Precheck minmax_precheck(const Instance& inst, const SpanningTreeLayout& layout,
                         int alpha);

std::vector<MinMaxSnapshot> enumerate_minmax_snapshots(
    const Instance& inst, const SpanningTreeLayout& layout, Vertex v, int alpha);

MinMaxRecordTable minmax_leaf_record(const Instance& inst,
                                     const SpanningTreeLayout& layout, Vertex v,
                                     int alpha);

MinMaxRecordTable minmax_internal_record(
    const Instance& inst, const SpanningTreeLayout& layout, Vertex v,
    const std::map<Vertex, MinMaxRecordTable>& child_records, int alpha);

// Minimum over the root snapshots (alpha_local = 0..alpha) with witness; at
// alpha = 0 this coincides exactly with solve_soac_dp.
SolveResult solve_minmax_dp(const Instance& inst,
                            const SpanningTreeLayout& layout, int alpha,
                            const SearchBudget& budget = {});

}  // namespace soac
