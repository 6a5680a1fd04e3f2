#include "soac/model.hpp"

#include <algorithm>

namespace soac {

std::vector<int> capacities(const Instance& inst) {
  std::vector<int> caps(inst.latencies.size());
  for (size_t a = 0; a < inst.latencies.size(); ++a)
    caps[a] = static_cast<int>(inst.latencies[a].size());
  return caps;
}

int max_capacity(const Instance& inst) {
  int c = 0;
  for (const auto& tab : inst.latencies) c = std::max(c, static_cast<int>(tab.size()));
  return c;
}

void validate_instance(const Instance& inst) {
  const int n = inst.graph.vertex_count;
  if (n < 0) throw ModelError("negative vertex count");
  if (inst.latencies.size() != inst.graph.arcs.size())
    throw ModelError("latency table count does not match arc count");
  for (size_t a = 0; a < inst.graph.arcs.size(); ++a) {
    const Arc& arc = inst.graph.arcs[a];
    if (arc.tail < 0 || arc.tail >= n || arc.head < 0 || arc.head >= n)
      throw ModelError("arc " + std::to_string(a) + " endpoint out of range");
    if (arc.tail == arc.head)
      throw ModelError("arc " + std::to_string(a) + " is a self-loop");
  }
  for (size_t i = 0; i < inst.agents.size(); ++i) {
    const Agent& ag = inst.agents[i];
    if (ag.source < 0 || ag.source >= n || ag.target < 0 || ag.target >= n)
      throw ModelError("agent " + std::to_string(i) + " endpoint out of range");
  }
  if (inst.alpha && *inst.alpha < 0) throw ModelError("alpha must be >= 0");
}

void validate_flow(const Instance& inst, const FlowAssignment& flow,
                   bool allow_unrouted) {
  if (flow.paths.size() != inst.agents.size())
    throw ModelError("flow has " + std::to_string(flow.paths.size()) +
                     " entries for " + std::to_string(inst.agents.size()) +
                     " agents");
  const auto& arcs = inst.graph.arcs;
  for (size_t i = 0; i < flow.paths.size(); ++i) {
    const std::string who = "agent " + std::to_string(i);
    if (!flow.paths[i]) {
      if (!allow_unrouted) throw ModelError(who + " is unrouted");
      continue;
    }
    const Path& p = *flow.paths[i];
    const Agent& ag = inst.agents[i];
    if (p.empty()) {
      if (ag.source != ag.target)
        throw ModelError(who + " has an empty path but distinct endpoints");
      continue;
    }
    Vertex at = ag.source;
    std::vector<Vertex> seen = {at};
    for (int aid : p) {
      if (aid < 0 || aid >= static_cast<int>(arcs.size()))
        throw ModelError(who + " uses a nonexistent arc");
      if (arcs[aid].tail != at)
        throw ModelError(who + " path does not chain head to tail");
      at = arcs[aid].head;
      if (std::find(seen.begin(), seen.end(), at) != seen.end())
        throw ModelError(who + " path revisits vertex " + std::to_string(at));
      seen.push_back(at);
    }
    if (at != ag.target) throw ModelError(who + " path ends off target");
  }
}

LoadReport loads_and_cost(const Instance& inst, const FlowAssignment& flow) {
  validate_flow(inst, flow, /*allow_unrouted=*/true);
  LoadReport rep;
  rep.loads.assign(inst.graph.arcs.size(), 0);
  for (const auto& p : flow.paths)
    if (p)
      for (int aid : *p) ++rep.loads[aid];
  Rat total = 0;
  for (size_t a = 0; a < rep.loads.size(); ++a) {
    const int f = rep.loads[a];
    if (f == 0) continue;
    if (f > static_cast<int>(inst.latencies[a].size())) {
      rep.cost = Cost::infinity();
      return rep;
    }
    total += Rat(f) * inst.latencies[a][f - 1];
  }
  rep.cost = Cost(total);
  return rep;
}

}  // namespace soac
