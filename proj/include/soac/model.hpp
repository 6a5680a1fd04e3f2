// Core problem model: a directed multigraph with per-arc finite latency
// tables, a list of agents, and flow assignments routing each agent along a
// simple path.  An arc's capacity is the length of its latency table; loading
// an arc beyond its capacity makes the whole assignment cost Infinity.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soac/cost.hpp"

namespace soac {

using Vertex = int;

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;
};

struct Digraph {
  int vertex_count = 0;
  std::vector<Arc> arcs;  // parallel arcs allowed, self-loops rejected
};

struct Agent {
  Vertex source = 0;
  Vertex target = 0;  // source == target is legal; its only path is empty
};

struct Instance {
  Digraph graph;
  // latencies[a][x-1] is the per-agent latency of arc a under load x.
  // Entries are finite; loads above latencies[a].size() mean Infinity.
  std::vector<std::vector<Rat>> latencies;
  std::vector<Agent> agents;  // agent identity is the list index
  std::optional<Rat> lambda;  // decision threshold: is opt <= lambda?
  std::optional<int> alpha;   // min-max mode: up to alpha agents unrouted
};

// A path is the arc-id sequence from source to target; empty means the agent
// stays put (only legal when source == target).
using Path = std::vector<int>;

struct FlowAssignment {
  // paths[i] routes agent i; nullopt marks the agent Unrouted.
  std::vector<std::optional<Path>> paths;
};

struct LoadReport {
  std::vector<int> loads;  // per arc, number of routed agents using it
  Cost cost;               // sum over arcs of load * latency(load)
};

std::vector<int> capacities(const Instance& inst);
int max_capacity(const Instance& inst);  // c_max; 0 when there are no arcs

// Structural sanity of the instance itself (arc endpoints in range, no
// self-loops, agents in range, alpha >= 0).  Throws ModelError.
void validate_instance(const Instance& inst);

// Structural validity of a flow: one entry per agent, every path starts at
// the agent's source, ends at its target, chains head-to-tail over existing
// arcs and repeats no vertex.  Unrouted entries are rejected unless
// allow_unrouted.  Throws ModelError naming the offending agent.
void validate_flow(const Instance& inst, const FlowAssignment& flow,
                   bool allow_unrouted);

// Loads and exact total cost of a structurally valid flow.  Cost is Infinity
// iff some arc is loaded beyond its capacity.
LoadReport loads_and_cost(const Instance& inst, const FlowAssignment& flow);

}  // namespace soac
