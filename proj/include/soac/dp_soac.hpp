// Width-parameterized exact solver over a spanning-tree layout.  Each tree
// node v gets a table of records indexed by snapshots describing how a flow
// may interact with the boundary arcs of v's subtree; tables are combined
// leaf-to-root over kernelized per-node instances.
//
// Cost accounting: every arc of the input graph is charged at exactly one
// tree node, the least common ancestor of its endpoints.  A record therefore
// holds the minimum total latency of the arcs charged strictly inside the
// subtree; boundary arcs are paid for higher up, where both endpoints are in
// scope.  Leaf records are 0 or Infinity.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "soac/decomposition.hpp"
#include "soac/model.hpp"
#include "soac/oracle.hpp"

namespace soac {

// How a flow crosses the boundary ∂_v of a subtree.  Arcs are original arc
// ids; agents are original agent ids.
struct Snapshot {
  // Pairs (agent, boundary arc), sorted by agent, total over the node's
  // outgoing (resp. incoming) agents.  An outgoing agent's arc is the first
  // crossing of its path; an incoming agent's arc is the last.
  std::vector<std::pair<int, int>> s_out;
  std::vector<std::pair<int, int>> s_in;
  // d_pairs: (incoming arc, outgoing arc) — a path from outside dips into the
  // subtree and leaves again.  r_pairs: (outgoing arc, incoming arc) — a path
  // from inside takes an excursion out and returns.  Sorted multisets.
  // Reverse-parallel pairs (head/tail swapped endpoints) are excluded: such a
  // dip would revisit a vertex.
  std::vector<std::pair<int, int>> d_pairs;
  std::vector<std::pair<int, int>> r_pairs;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
  friend auto operator<=>(const Snapshot&, const Snapshot&) = default;
};

using RecordTable = std::map<Snapshot, Cost>;

enum class Precheck { Ok, NoInstance };

// Necessary condition for a finite optimum: at every tree node, the outgoing
// (incoming) agents of the subtree must fit through the total capacity of the
// outgoing (incoming) boundary arcs.
Precheck feasibility_precheck(const Instance& inst,
                              const SpanningTreeLayout& layout);

// The complete duplicate-free snapshot list at v, deterministically ordered.
// Per-arc usage across all four components is bounded by the arc's own
// capacity (and hence by c_max).
std::vector<Snapshot> enumerate_snapshots(const Instance& inst,
                                          const SpanningTreeLayout& layout,
                                          Vertex v);

// The subtree instance a record reasons about: the subgraph induced on the
// subtree vertices, plus the boundary arcs with their outside endpoints, one
// marker agent per d_pair instance (from the incoming arc's tail to the
// outgoing arc's head) and one capacity-1 zero-latency shortcut arc per
// r_pair instance (from the outgoing arc's head to the incoming arc's tail).
//
// Obligations a candidate flow must meet, beyond validity:
//   - agents with pinned_first start with that arc and use no other boundary
//     or shortcut arc before it (incoming and marker agents);
//   - agents with pinned_last end with that arc (outgoing and marker agents);
//   - outgoing/incoming/marker agents never touch boundary or shortcut arcs
//     except as pinned; carried agents may cross only via flanked triples
//     (boundary-out arc, its r_pair's shortcut, that r_pair's boundary-in
//     arc);
//   - every shortcut arc is used exactly once.
// Its charged cost is the latency total of arcs with both endpoints inside
// the subtree.
struct SubInstance {
  Instance instance;
  std::vector<int> sub_of_vertex;  // original vertex -> sub id, -1 if absent
  std::vector<int> vertex_of_sub;  // sub id -> original vertex
  std::vector<int> sub_of_arc;     // original arc -> sub id, -1 if absent
  std::vector<int> arc_of_sub;     // sub arc -> original arc, -1 = shortcut
  std::vector<int> agent_of_sub;   // sub agent -> original agent, -1 = marker
  std::vector<int> pinned_first;   // per sub agent: forced first arc or -1
  std::vector<int> pinned_last;    // per sub agent: forced last arc or -1
  std::vector<int> shortcut_arcs;  // sub arc ids, one per r_pair instance
  std::vector<char> charged_arc;   // per sub arc: counted in the record cost
};

SubInstance build_subinstance(const Instance& inst,
                              const SpanningTreeLayout& layout, Vertex v,
                              const Snapshot& snap);

// Record table of a tree leaf.  With nothing charged below a leaf, every
// value is 0 (obligations satisfiable within capacities) or Infinity.
RecordTable leaf_record(const Instance& inst, const SpanningTreeLayout& layout,
                        Vertex v);

// The kernelized instance of an internal node: v itself, the boundary
// endpoints, and per complex child w a collapsed region — the inside
// endpoints of ∂_w joined by bi-directional zero-latency marker arcs, plus
// w_out/w_in vertices re-homing agents whose endpoint lies strictly inside.
// Simple subtrees (all boundary arcs run between the child and v) are deleted
// outright; their agents' endpoints move onto v and their boundary arcs are
// priced into the node's base cost.  Artificial arcs carry all-zero latency
// tables sized so no legal flow can exhaust them; shortcut arcs have
// capacity 1.
struct Kernel {
  Instance instance;
  int v = 0;
  std::vector<int> vertex_of_kv;  // kernel vertex -> original vertex, -1 for
                                  // w_out/w_in vertices
  int kv_of_v = 0;
  std::vector<int> w_out_kv;  // per complex child, NodeContext order
  std::vector<int> w_in_kv;
  enum class ArcKind { Real, Boundary, Marker, WOut, WIn, Shortcut };
  std::vector<ArcKind> arc_kind;
  std::vector<int> arc_of_karc;   // kernel arc -> original arc id or -1
  std::vector<char> arc_charged;  // real arc whose endpoint LCA is v
};

Kernel kernelize(const Instance& inst, const SpanningTreeLayout& layout,
                 Vertex v, const Snapshot& snap);

// Record table of an internal node from its children's tables.  Candidate
// kernel flows are enumerated under the obligations above plus the collapsed
// regions' discipline (a marker arc is immediately preceded and succeeded by
// boundary arcs of its region); each surviving flow induces one snapshot per
// complex child from its crossings, looked up in that child's table.
RecordTable internal_record(const Instance& inst,
                            const SpanningTreeLayout& layout, Vertex v,
                            const std::map<Vertex, RecordTable>& child_records);

// Optimal cost via the root record plus a reconstructed witness (re-running
// each node's minimizing flow top-down and stitching segments across
// boundaries).  The witness re-validates to the same cost.
SolveResult solve_soac_dp(const Instance& inst, const SpanningTreeLayout& layout,
                          const SearchBudget& budget = {});

}  // namespace soac
