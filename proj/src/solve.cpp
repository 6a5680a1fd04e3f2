#include "soac/solve.hpp"

#include <algorithm>
#include <cassert>

#include "soac/dp_minmax.hpp"
#include "soac/dp_soac.hpp"

namespace soac {

namespace {

struct Part {
  Instance sub;
  std::vector<int> orig_arc;
  std::vector<int> orig_agent;
};

Part make_part(const Instance& inst, const Components& comps, int c) {
  Part p;
  std::vector<int> vmap(inst.graph.vertex_count, -1);
  for (int x = 0; x < inst.graph.vertex_count; ++x)
    if (comps.component_of[x] == c) vmap[x] = p.sub.graph.vertex_count++;
  for (size_t a = 0; a < inst.graph.arcs.size(); ++a) {
    const Arc& ar = inst.graph.arcs[a];
    if (vmap[ar.tail] < 0) continue;
    assert(vmap[ar.head] >= 0);  // arc endpoints share a component
    p.sub.graph.arcs.push_back({vmap[ar.tail], vmap[ar.head]});
    p.sub.latencies.push_back(inst.latencies[a]);
    p.orig_arc.push_back((int)a);
  }
  for (size_t i = 0; i < inst.agents.size(); ++i) {
    const Agent& ag = inst.agents[i];
    if (vmap[ag.source] < 0 || vmap[ag.target] < 0) continue;
    if (comps.component_of[ag.source] != comps.component_of[ag.target])
      continue;
    p.sub.agents.push_back({vmap[ag.source], vmap[ag.target]});
    p.orig_agent.push_back((int)i);
  }
  return p;
}

void merge_witness(FlowAssignment& merged, const Part& part,
                   const FlowAssignment& w) {
  for (size_t i = 0; i < part.orig_agent.size(); ++i) {
    if (!w.paths[i]) continue;
    Path mapped;
    for (int sa : *w.paths[i]) mapped.push_back(part.orig_arc[sa]);
    merged.paths[part.orig_agent[i]] = std::move(mapped);
  }
}

}  // namespace

SolveReport solve_instance(const Instance& inst, const SolveOptions& opt) {
  validate_instance(inst);
  if (opt.alpha && *opt.alpha < 0) throw ModelError("negative unrouted budget");
  Components comps = skeleton_components(inst);
  SolveReport rep;
  rep.components = comps.count;

  if (opt.layout) {
    rep.width = edge_cut_width(inst, *opt.layout).width;
    rep.result = opt.alpha ? solve_minmax_dp(inst, *opt.layout, *opt.alpha,
                                             opt.budget)
                           : solve_soac_dp(inst, *opt.layout, opt.budget);
    return rep;
  }

  long cross = 0;
  for (const Agent& ag : inst.agents)
    if (comps.component_of[ag.source] != comps.component_of[ag.target]) cross++;

  std::vector<Part> parts;
  std::vector<SpanningTreeLayout> lays;
  for (int c = 0; c < comps.count; ++c) {
    parts.push_back(make_part(inst, comps, c));
    FindLayoutResult fl =
        find_layout(parts.back().sub, std::nullopt, opt.layout_search);
    rep.width = std::max(rep.width, fl.width);
    lays.push_back(fl.layout);
  }

  SolveResult total;
  total.cost = Cost(0);
  FlowAssignment merged;
  merged.paths.assign(inst.agents.size(), std::nullopt);
  bool feasible = true;

  if (!opt.alpha) {
    if (cross > 0) feasible = false;
    for (int c = 0; feasible && c < comps.count; ++c) {
      SolveResult r = solve_soac_dp(parts[c].sub, lays[c], opt.budget);
      total.states_visited += r.states_visited;
      if (r.cost.is_infinite()) {
        feasible = false;
        break;
      }
      total.cost += r.cost;
      merge_witness(merged, parts[c], *r.witness);
    }
  } else {
    long rem = *opt.alpha - cross;
    if (rem < 0) {
      feasible = false;
    } else {
      // per-component cost as a function of its share of the budget, then an
      // exact distribution of the remainder over the components
      std::vector<std::vector<SolveResult>> runs(comps.count);
      for (int c = 0; c < comps.count; ++c) {
        long cap = std::min<long>(rem, (long)parts[c].sub.agents.size());
        for (long a = 0; a <= cap; ++a) {
          runs[c].push_back(
              solve_minmax_dp(parts[c].sub, lays[c], (int)a, opt.budget));
          total.states_visited += runs[c].back().states_visited;
        }
      }
      auto cost_at = [&](int c, long a) -> const SolveResult& {
        long cap = (long)runs[c].size() - 1;
        return runs[c][std::min(a, cap)];
      };
      std::vector<std::vector<Cost>> f(comps.count + 1,
                                       std::vector<Cost>(rem + 1));
      std::vector<std::vector<long>> pick(comps.count,
                                          std::vector<long>(rem + 1, 0));
      for (long b = 0; b <= rem; ++b) f[0][b] = Cost(0);
      for (int c = 0; c < comps.count; ++c)
        for (long b = 0; b <= rem; ++b) {
          Cost best = Cost::infinity();
          for (long a = 0; a <= b; ++a) {
            Cost cand = f[c][b - a] + cost_at(c, a).cost;
            if (cand < best) {
              best = cand;
              pick[c][b] = a;
            }
          }
          f[c + 1][b] = best;
        }
      if (f[comps.count][rem].is_infinite()) {
        feasible = false;
      } else {
        total.cost = f[comps.count][rem];
        long b = rem;
        for (int c = comps.count - 1; c >= 0; --c) {
          long a = pick[c][b];
          merge_witness(merged, parts[c], *cost_at(c, a).witness);
          b -= a;
        }
      }
    }
  }

  if (feasible) {
    total.witness = std::move(merged);
    rep.result = std::move(total);
  } else {
    rep.result.cost = Cost::infinity();
    rep.result.states_visited = total.states_visited;
  }
  return rep;
}

}  // namespace soac
