#include "soac/dp_minmax.hpp"

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

Precheck minmax_precheck(const Instance& inst, const SpanningTreeLayout& layout,
                         int alpha) {
  dp::Engine e(inst, layout, true, alpha, {});
  return e.precheck_ok() ? Precheck::Ok : Precheck::NoInstance;
}

std::vector<MinMaxSnapshot> enumerate_minmax_snapshots(
    const Instance& inst, const SpanningTreeLayout& layout, Vertex v,
    int alpha) {
  dp::Engine e(inst, layout, true, alpha, {});
  return e.enumerate(v);
}

MinMaxRecordTable minmax_leaf_record(const Instance& inst,
                                     const SpanningTreeLayout& layout, Vertex v,
                                     int alpha) {
  if (!tree_children(layout, v).empty())
    throw ModelError("node is not a leaf of the layout tree");
  dp::Engine e(inst, layout, true, alpha, {});
  MinMaxRecordTable out;
  for (const dp::GenSnap& g : e.enumerate(v))
    out[g] = e.record_against(v, g, {});
  return out;
}

MinMaxRecordTable minmax_internal_record(
    const Instance& inst, const SpanningTreeLayout& layout, Vertex v,
    const std::map<Vertex, MinMaxRecordTable>& child_records, int alpha) {
  dp::Engine e(inst, layout, true, alpha, {});
  std::map<Vertex, std::map<dp::GenSnap, Cost>> tables(child_records.begin(),
                                                       child_records.end());
  MinMaxRecordTable out;
  for (const dp::GenSnap& g : e.enumerate(v))
    out[g] = e.record_against(v, g, tables);
  return out;
}

SolveResult solve_minmax_dp(const Instance& inst,
                            const SpanningTreeLayout& layout, int alpha,
                            const SearchBudget& budget) {
  validate_instance(inst);
  dp::Engine e(inst, layout, true, alpha, budget);
  return e.solve();
}

}  // namespace soac
