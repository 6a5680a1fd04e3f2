#include "soac/oracle.hpp"

#include <algorithm>

namespace soac {
namespace {

struct PathDfs {
  const Digraph& g;
  const std::vector<char>* enabled;
  int max_len;
  Vertex target;
  std::vector<std::vector<int>> out;  // per vertex, arc ids ascending
  std::vector<char> on_path;
  Path cur;
  std::vector<Path> found;

  PathDfs(const Digraph& g_, const std::vector<char>* en, int ml, Vertex t)
      : g(g_), enabled(en), max_len(ml), target(t) {
    out.resize(g.vertex_count);
    for (size_t a = 0; a < g.arcs.size(); ++a)
      out[g.arcs[a].tail].push_back(static_cast<int>(a));
    on_path.assign(g.vertex_count, 0);
  }

  void run(Vertex v) {
    if (v == target) found.push_back(cur);
    if (static_cast<int>(cur.size()) >= max_len) return;
    on_path[v] = 1;
    for (int aid : out[v]) {
      if (enabled && !(*enabled)[aid]) continue;
      const Vertex to = g.arcs[aid].head;
      if (on_path[to]) continue;
      cur.push_back(aid);
      run(to);
      cur.pop_back();
    }
    on_path[v] = 0;
  }
};

}  // namespace

std::vector<Path> enumerate_simple_paths(const Digraph& g, Vertex s, Vertex t,
                                         int max_len,
                                         const std::vector<char>* arc_enabled) {
  if (s < 0 || s >= g.vertex_count || t < 0 || t >= g.vertex_count)
    throw ModelError("path endpoints out of range");
  if (max_len < 0) max_len = g.vertex_count - 1;
  PathDfs dfs(g, arc_enabled, max_len, t);
  if (s == t) {
    // The empty path is the unique simple path from a vertex to itself:
    // any nonempty return walk would revisit the start.
    dfs.found.push_back({});
    return dfs.found;
  }
  dfs.run(s);
  return dfs.found;
}

namespace {

// Shared backtracking core: route the agents listed in `routed` (in order)
// over precomputed per-agent path menus, tracking loads and the exact running
// cost.  Only capacity violations prune.
struct AssignmentSearch {
  const Instance& inst;
  const SearchBudget& budget;
  std::vector<int> caps;
  std::vector<std::vector<Path>> menu;  // per agent
  unsigned long long states = 0;

  std::vector<int> load;
  Rat running = 0;
  std::vector<int> chosen;  // menu index per routed slot

  Cost best = Cost::infinity();
  std::vector<int> best_chosen;

  explicit AssignmentSearch(const Instance& i, const SearchBudget& b)
      : inst(i), budget(b), caps(capacities(i)) {
    std::vector<char> usable(inst.graph.arcs.size());
    for (size_t a = 0; a < usable.size(); ++a) usable[a] = caps[a] > 0;
    menu.resize(inst.agents.size());
    for (size_t i2 = 0; i2 < inst.agents.size(); ++i2)
      menu[i2] = enumerate_simple_paths(inst.graph, inst.agents[i2].source,
                                        inst.agents[i2].target, -1, &usable);
  }

  void tick() {
    if (++states > budget.max_states)
      throw ResourceError("oracle enumeration exceeded budget of " +
                          std::to_string(budget.max_states) + " states");
  }

  // Applies path; returns false (fully undone) if a capacity bound breaks.
  bool push(const Path& p) {
    for (size_t j = 0; j < p.size(); ++j) {
      const int a = p[j];
      if (load[a] + 1 > caps[a]) {
        for (size_t k = 0; k < j; ++k) {
          const int b = p[k];
          running -= Rat(load[b]) * inst.latencies[b][load[b] - 1];
          --load[b];
          if (load[b] > 0) running += Rat(load[b]) * inst.latencies[b][load[b] - 1];
        }
        return false;
      }
      if (load[a] > 0) running -= Rat(load[a]) * inst.latencies[a][load[a] - 1];
      ++load[a];
      running += Rat(load[a]) * inst.latencies[a][load[a] - 1];
    }
    return true;
  }

  void pop(const Path& p) {
    for (int a : p) {
      running -= Rat(load[a]) * inst.latencies[a][load[a] - 1];
      --load[a];
      if (load[a] > 0) running += Rat(load[a]) * inst.latencies[a][load[a] - 1];
    }
  }

  void rec(const std::vector<int>& routed, size_t idx) {
    if (idx == routed.size()) {
      if (Cost(running) < best) {
        best = Cost(running);
        best_chosen = chosen;
      }
      return;
    }
    const int agent = routed[idx];
    for (size_t m = 0; m < menu[agent].size(); ++m) {
      tick();
      if (!push(menu[agent][m])) continue;
      chosen.push_back(static_cast<int>(m));
      rec(routed, idx + 1);
      chosen.pop_back();
      pop(menu[agent][m]);
    }
  }

  // Minimum cost over assignments of exactly the given agents.
  std::pair<Cost, std::vector<int>> solve(const std::vector<int>& routed) {
    load.assign(inst.graph.arcs.size(), 0);
    running = 0;
    chosen.clear();
    best = Cost::infinity();
    best_chosen.clear();
    rec(routed, 0);
    return {best, best_chosen};
  }
};

}  // namespace

SolveResult solve_soac_oracle(const Instance& inst, const SearchBudget& budget) {
  validate_instance(inst);
  AssignmentSearch search(inst, budget);
  std::vector<int> all(inst.agents.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  auto [cost, chosen] = search.solve(all);
  SolveResult res;
  res.cost = cost;
  res.states_visited = search.states;
  if (!cost.is_infinite()) {
    FlowAssignment w;
    w.paths.resize(inst.agents.size());
    for (size_t i = 0; i < all.size(); ++i)
      w.paths[all[i]] = search.menu[all[i]][chosen[i]];
    res.witness = std::move(w);
  }
  return res;
}

SolveResult solve_minmax_oracle(const Instance& inst, int alpha,
                                const SearchBudget& budget) {
  validate_instance(inst);
  if (alpha < 0) throw ModelError("alpha must be >= 0");
  const int m = static_cast<int>(inst.agents.size());
  alpha = std::min(alpha, m);
  AssignmentSearch search(inst, budget);

  SolveResult res;
  res.cost = Cost::infinity();
  // Drop sets tried by increasing size, lexicographically within a size, so
  // ties favour routing more agents and dropping lower-indexed ones last.
  std::vector<int> drop;
  auto try_current = [&]() {
    std::vector<int> routed;
    size_t d = 0;
    for (int i = 0; i < m; ++i) {
      if (d < drop.size() && drop[d] == i) {
        ++d;
        continue;
      }
      routed.push_back(i);
    }
    auto [cost, chosen] = search.solve(routed);
    if (cost < res.cost) {
      res.cost = cost;
      FlowAssignment w;
      w.paths.resize(m);
      for (size_t i = 0; i < routed.size(); ++i)
        w.paths[routed[i]] = search.menu[routed[i]][chosen[i]];
      res.witness = std::move(w);
    }
  };
  // All drop sets of size k, ascending indices.
  for (int k = 0; k <= alpha; ++k) {
    drop.assign(k, 0);
    for (int i = 0; i < k; ++i) drop[i] = i;
    while (true) {
      if (k == 0) {
        try_current();
        break;
      }
      try_current();
      int pos = k - 1;
      while (pos >= 0 && drop[pos] == m - k + pos) --pos;
      if (pos < 0) break;
      ++drop[pos];
      for (int j = pos + 1; j < k; ++j) drop[j] = drop[j - 1] + 1;
    }
  }
  res.states_visited = search.states;
  if (res.cost.is_infinite()) res.witness.reset();
  return res;
}

}  // namespace soac
