// Shared machinery behind both tree-decomposition solvers.  One engine
// instance covers one (instance, layout) pair in either plain or min-max
// mode; records are computed lazily with memoization, or eagerly against
// caller-supplied child tables for the table-building entry points.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "soac/decomposition.hpp"
#include "soac/dp_minmax.hpp"
#include "soac/dp_soac.hpp"
#include "soac/model.hpp"
#include "soac/oracle.hpp"

namespace soac::dp {

// The min-max snapshot shape subsumes the plain one: plain mode pins a_out /
// a_in to the full boundary-agent lists and alpha_local to 0.
using GenSnap = MinMaxSnapshot;

GenSnap snap_from_soac(const NodeContext& ctx, const Snapshot& s);
Snapshot snap_to_soac(const GenSnap& g);

// Reconstruction element: a real arc, or a placeholder for one instance of
// the current node's r_pairs (the excursion's outside part, supplied by the
// parent).
struct Token {
  int real_arc = -1;
  int own_r = -1;               // index into this node's r instance list
  std::pair<int, int> child_r{-1, -1};  // unresolved (complex child slot, idx)
};

struct Realization {
  std::map<int, std::vector<Token>> agent_paths;  // by original agent id
  std::set<int> unrouted;
  // Aligned with the snapshot's d instance list: the realized dip paths,
  // first and last tokens being the d_pair's own arcs.
  std::vector<std::vector<Token>> d_realizations;
};

class Engine {
 public:
  Engine(const Instance& inst, const SpanningTreeLayout& layout, bool minmax,
         int alpha, const SearchBudget& budget);

  // Lazy memoized record; Infinity for unsatisfiable snapshots.
  Cost record(Vertex v, const GenSnap& snap);
  // Eager variant: children resolved through the supplied tables only; a
  // derived snapshot missing from its table counts as Infinity and trips the
  // missing-child-snapshot diagnostic.
  Cost record_against(Vertex v, const GenSnap& snap,
                      const std::map<Vertex, std::map<GenSnap, Cost>>& tables);

  std::vector<GenSnap> enumerate(Vertex v);
  bool precheck_ok() const;

  SolveResult solve();  // root record + reconstructed witness

  Kernel public_kernel(Vertex v, const GenSnap& snap) const;

  const NodeContext& node_ctx(Vertex v) const { return ctx_[v]; }
  bool missing_child_snapshot() const { return missing_child_; }
  unsigned long long states() const { return states_; }

 private:
  // ---- static per-node structure ----
  struct KArc {
    int tail = 0, head = 0;  // kernel vertex ids
    int real = -1;           // original arc id, -1 for artificial arcs
    long cap = 0;
    const std::vector<Rat>* lat = nullptr;  // nullptr: all-zero latency
    bool charged = false;    // real arc whose endpoint LCA is this node
    bool bd_v = false;       // lies in the node's own boundary
    bool bd_out = false;     // orientation when bd_v
    int out_of = -1;         // crosses out of this complex-child slot
    int into = -1;           // crosses into this complex-child slot
    enum Kind { Real, Marker, WOut, WIn, Shortcut } kind = Real;
    int child = -1;          // complex-child slot for Marker/WOut/WIn
    int rinst = -1;          // r instance index for Shortcut
  };

  struct NodeBase {
    Vertex v = 0;
    std::vector<int> cplx;   // complex children (minmax: all children)
    std::vector<int> simp;   // simple children (plain mode only)
    std::vector<int> kv_of_vertex;  // original vertex -> kernel id or -1
    std::vector<int> vertex_of_kv;  // kernel id -> original vertex or -1
    int kv_v = 0;
    std::vector<int> wout, win;     // kernel ids per complex slot
    std::vector<int> region_of_kv;  // complex slot whose inside-endpoint set
                                    // the kernel vertex belongs to, else -1
    std::vector<std::vector<int>> in_kvs;  // per slot: inside-endpoint kvs
    std::vector<KArc> arcs;         // without per-snapshot shortcut arcs
    long artificial_cap = 0;
  };

  // Per-snapshot kernel: base arcs plus shortcuts, with adjacency.
  struct Kern {
    const NodeBase* base = nullptr;
    std::vector<KArc> arcs;
    std::vector<std::vector<int>> adj;  // by kernel vertex: arc indices
    // r instance list (expanded from snap.r_pairs multiset, in order):
    // (boundary-out real arc, boundary-in real arc, shortcut kernel arc).
    struct RInst {
      int f_real = 0, e_real = 0;
      int f_karc = -1, e_karc = -1, s_karc = -1;
    };
    std::vector<RInst> rinsts;
    std::vector<std::pair<int, int>> dinsts;  // expanded d instances (real ids)
    std::map<int, int> karc_of_real;          // real arc id -> kernel arc
  };

  struct Ent {
    enum Kind { Internal, Outgoing, Incoming, Marker, Connector } kind =
        Internal;
    int agent = -1;
    int start = -1, end = -1;         // kernel vertices
    int pin_first = -1, pin_last = -1;  // kernel arc indices
    bool shortcuts_ok = false;
    int conn_child = -1;              // complex slot it must not re-cross
    int inst = -1;  // Marker: own d instance index; Connector: child r index
    std::pair<int, int> conn_pair{-1, -1};  // Connector: (f_real, e_real)
    bool droppable = false;           // min-max: may stay unrouted
  };

  struct Config {  // winning flow, captured for reconstruction
    std::vector<Ent> ents;
    std::vector<std::optional<std::vector<int>>> paths;  // kernel arc seqs
    std::vector<GenSnap> child_snaps;  // per complex slot
    std::vector<GenSnap> simple_snaps;  // per simple child (plain mode)
    Kern kern;
  };

  struct BaseCost {  // plain mode: simple-child term of a node
    Cost cost;
    std::vector<GenSnap> argmin;  // per simple child
  };

  using ChildLookup = std::function<Cost(Vertex, const GenSnap&)>;

  void tick(unsigned long long weight = 1);
  int lca(int a, int b) const;
  Cost compute_record(Vertex v, const GenSnap& snap, const ChildLookup& look,
                      bool allow_cache, Config* capture);
  const NodeBase& node_base(Vertex v) const;
  Kern make_kern(const NodeBase& nb, const GenSnap& snap) const;
  std::vector<Ent> base_entities(const NodeBase& nb, const Kern& k,
                                 const GenSnap& snap) const;
  void entity_menu(const Kern& k, const Ent& e,
                   std::vector<std::vector<int>>& menu);
  bool snap_valid(Vertex v, const GenSnap& snap) const;
  BaseCost base_cost(Vertex v, const ChildLookup& look, bool allow_cache);
  void derive_snapshots(const NodeBase& nb, const Kern& k,
                        const std::vector<Ent>& ents,
                        const std::vector<std::optional<std::vector<int>>>& paths,
                        std::vector<GenSnap>& out) const;
  Realization reconstruct(Vertex v, const GenSnap& snap);

  const Instance& inst_;
  const SpanningTreeLayout& layout_;
  bool minmax_ = false;
  int alpha_ = 0;
  SearchBudget budget_;
  unsigned long long states_ = 0;

  int n_ = 0;
  int root_ = 0;
  std::vector<int> parent_, depth_;
  std::vector<std::vector<int>> children_;
  std::vector<NodeContext> ctx_;
  std::vector<int> caps_;
  std::vector<int> arc_lca_;  // charging node per arc

  mutable std::vector<std::optional<NodeBase>> bases_;
  std::vector<std::map<GenSnap, Cost>> memo_;
  std::vector<std::optional<BaseCost>> base_memo_;
  mutable bool missing_child_ = false;
};

}  // namespace soac::dp
