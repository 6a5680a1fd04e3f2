#include "soac/dp_soac.hpp"

#include <algorithm>

#include "dp_engine.hpp"

namespace soac {

namespace {

std::vector<int> tree_children(const SpanningTreeLayout& layout, Vertex v) {
  std::vector<int> out;
  for (int u = 0; u < layout.vertex_count; ++u)
    if (u != layout.root && layout.parent[u] == v) out.push_back(u);
  return out;
}

}  // namespace

Precheck feasibility_precheck(const Instance& inst,
                              const SpanningTreeLayout& layout) {
  dp::Engine e(inst, layout, false, 0, {});
  return e.precheck_ok() ? Precheck::Ok : Precheck::NoInstance;
}

std::vector<Snapshot> enumerate_snapshots(const Instance& inst,
                                          const SpanningTreeLayout& layout,
                                          Vertex v) {
  dp::Engine e(inst, layout, false, 0, {});
  std::vector<Snapshot> out;
  for (const dp::GenSnap& g : e.enumerate(v)) out.push_back(dp::snap_to_soac(g));
  return out;
}

SubInstance build_subinstance(const Instance& inst,
                              const SpanningTreeLayout& layout, Vertex v,
                              const Snapshot& snap) {
  validate_instance(inst);
  validate_layout(inst, layout);
  NodeContext cx = node_context(inst, layout, v);

  std::vector<char> is_out(inst.graph.arcs.size(), 0),
      is_in(inst.graph.arcs.size(), 0);
  for (size_t i = 0; i < cx.boundary_arcs.size(); ++i)
    (cx.boundary_out[i] ? is_out : is_in)[cx.boundary_arcs[i]] = 1;
  auto check_pairs = [&](const std::vector<std::pair<int, int>>& sel,
                         const std::vector<int>& agents, bool out_side) {
    if (sel.size() != agents.size())
      throw ModelError("snapshot does not cover the node's boundary agents");
    for (size_t i = 0; i < sel.size(); ++i) {
      if (sel[i].first != agents[i])
        throw ModelError("snapshot agents disagree with the node's");
      const std::vector<char>& side = out_side ? is_out : is_in;
      int a = sel[i].second;
      if (a < 0 || a >= (int)side.size() || !side[a])
        throw ModelError("snapshot arc is not a boundary arc of this side");
    }
  };
  check_pairs(snap.s_out, cx.outgoing_agents, true);
  check_pairs(snap.s_in, cx.incoming_agents, false);
  for (auto [e, f] : snap.d_pairs)
    if (e < 0 || e >= (int)is_in.size() || !is_in[e] || !is_out[f])
      throw ModelError("malformed dip pair");
  for (auto [f, e] : snap.r_pairs)
    if (f < 0 || f >= (int)is_out.size() || !is_out[f] || !is_in[e])
      throw ModelError("malformed excursion pair");

  SubInstance sub;
  sub.sub_of_vertex.assign(inst.graph.vertex_count, -1);
  auto addv = [&](int x) {
    if (sub.sub_of_vertex[x] < 0) {
      sub.sub_of_vertex[x] = (int)sub.vertex_of_sub.size();
      sub.vertex_of_sub.push_back(x);
    }
    return sub.sub_of_vertex[x];
  };
  for (int x = 0; x < inst.graph.vertex_count; ++x)
    if (cx.in_subtree[x]) addv(x);
  for (int a : cx.boundary_arcs) {
    const Arc& ar = inst.graph.arcs[a];
    addv(cx.in_subtree[ar.tail] ? ar.head : ar.tail);
  }
  sub.instance.graph.vertex_count = (int)sub.vertex_of_sub.size();

  sub.sub_of_arc.assign(inst.graph.arcs.size(), -1);
  for (size_t a = 0; a < inst.graph.arcs.size(); ++a) {
    const Arc& ar = inst.graph.arcs[a];
    bool both = cx.in_subtree[ar.tail] && cx.in_subtree[ar.head];
    bool bd = is_out[a] || is_in[a];
    if (!both && !bd) continue;
    sub.sub_of_arc[a] = (int)sub.instance.graph.arcs.size();
    sub.arc_of_sub.push_back((int)a);
    sub.instance.graph.arcs.push_back(
        {sub.sub_of_vertex[ar.tail], sub.sub_of_vertex[ar.head]});
    sub.instance.latencies.push_back(inst.latencies[a]);
    sub.charged_arc.push_back(both ? 1 : 0);
  }
  for (auto [f, e] : snap.r_pairs) {
    int id = (int)sub.instance.graph.arcs.size();
    sub.arc_of_sub.push_back(-1);
    sub.instance.graph.arcs.push_back(
        {sub.sub_of_vertex[inst.graph.arcs[f].head],
         sub.sub_of_vertex[inst.graph.arcs[e].tail]});
    sub.instance.latencies.push_back({Rat(0)});
    sub.charged_arc.push_back(0);
    sub.shortcut_arcs.push_back(id);
  }

  auto add_agent = [&](int src, int tgt, int orig, int pf, int pl) {
    sub.instance.agents.push_back({src, tgt});
    sub.agent_of_sub.push_back(orig);
    sub.pinned_first.push_back(pf);
    sub.pinned_last.push_back(pl);
  };
  for (size_t i = 0; i < inst.agents.size(); ++i) {
    const Agent& ag = inst.agents[i];
    if (cx.in_subtree[ag.source] && cx.in_subtree[ag.target])
      add_agent(sub.sub_of_vertex[ag.source], sub.sub_of_vertex[ag.target],
                (int)i, -1, -1);
  }
  for (auto [agent, arc] : snap.s_out)
    add_agent(sub.sub_of_vertex[inst.agents[agent].source],
              sub.sub_of_vertex[inst.graph.arcs[arc].head], agent, -1,
              sub.sub_of_arc[arc]);
  for (auto [agent, arc] : snap.s_in)
    add_agent(sub.sub_of_vertex[inst.graph.arcs[arc].tail],
              sub.sub_of_vertex[inst.agents[agent].target], agent,
              sub.sub_of_arc[arc], -1);
  for (auto [e, f] : snap.d_pairs)
    add_agent(sub.sub_of_vertex[inst.graph.arcs[e].tail],
              sub.sub_of_vertex[inst.graph.arcs[f].head], -1,
              sub.sub_of_arc[e], sub.sub_of_arc[f]);
  return sub;
}

RecordTable leaf_record(const Instance& inst, const SpanningTreeLayout& layout,
                        Vertex v) {
  if (!tree_children(layout, v).empty())
    throw ModelError("node is not a leaf of the layout tree");
  dp::Engine e(inst, layout, false, 0, {});
  RecordTable out;
  for (const dp::GenSnap& g : e.enumerate(v))
    out[dp::snap_to_soac(g)] = e.record_against(v, g, {});
  return out;
}

Kernel kernelize(const Instance& inst, const SpanningTreeLayout& layout,
                 Vertex v, const Snapshot& snap) {
  dp::Engine e(inst, layout, false, 0, {});
  return e.public_kernel(v, dp::snap_from_soac(e.node_ctx(v), snap));
}

RecordTable internal_record(
    const Instance& inst, const SpanningTreeLayout& layout, Vertex v,
    const std::map<Vertex, RecordTable>& child_records) {
  dp::Engine e(inst, layout, false, 0, {});
  std::map<Vertex, std::map<dp::GenSnap, Cost>> tables;
  for (const auto& [w, rt] : child_records) {
    auto& t = tables[w];
    for (const auto& [s, c] : rt)
      t.emplace(dp::snap_from_soac(e.node_ctx(w), s), c);
  }
  RecordTable out;
  for (const dp::GenSnap& g : e.enumerate(v))
    out[dp::snap_to_soac(g)] = e.record_against(v, g, tables);
  return out;
}

SolveResult solve_soac_dp(const Instance& inst,
                          const SpanningTreeLayout& layout,
                          const SearchBudget& budget) {
  validate_instance(inst);
  dp::Engine e(inst, layout, false, 0, budget);
  return e.solve();
}

}  // namespace soac
