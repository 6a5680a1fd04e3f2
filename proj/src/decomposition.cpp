#include "soac/decomposition.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

namespace soac {

EdgeUV make_edge(int a, int b) {
  if (a == b) throw ModelError("undirected self-loop");
  return a < b ? EdgeUV{a, b} : EdgeUV{b, a};
}

std::vector<EdgeUV> skeleton_edges(const Instance& inst) {
  std::vector<EdgeUV> edges;
  edges.reserve(inst.graph.arcs.size());
  for (const Arc& a : inst.graph.arcs) edges.push_back(make_edge(a.tail, a.head));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

namespace {

struct TreeView {
  int root = 0;
  std::vector<int> depth;
  std::vector<std::vector<int>> children;
  std::vector<int> postorder;  // children before parents
};

TreeView check_tree(int n, const std::vector<int>& parent) {
  if (static_cast<int>(parent.size()) != n)
    throw ModelError("parent array size does not match vertex count");
  TreeView t;
  t.root = -1;
  for (int v = 0; v < n; ++v) {
    if (parent[v] < 0 || parent[v] >= n)
      throw ModelError("parent of vertex " + std::to_string(v) + " out of range");
    if (parent[v] == v) {
      if (t.root >= 0) throw ModelError("tree has more than one root");
      t.root = v;
    }
  }
  if (n > 0 && t.root < 0) throw ModelError("tree has no root");
  t.depth.assign(n, -1);
  if (n > 0) t.depth[t.root] = 0;
  for (int v = 0; v < n; ++v) {
    if (t.depth[v] >= 0) continue;
    // Walk up until a resolved vertex; detect cycles by step count.
    std::vector<int> chain;
    int x = v, steps = 0;
    while (t.depth[x] < 0) {
      chain.push_back(x);
      x = parent[x];
      if (++steps > n) throw ModelError("parent array contains a cycle");
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      t.depth[*it] = t.depth[parent[*it]] + 1;
  }
  t.children.assign(n, {});
  for (int v = 0; v < n; ++v)
    if (v != t.root) t.children[parent[v]].push_back(v);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return t.depth[a] > t.depth[b]; });
  t.postorder = order;
  return t;
}

std::vector<EdgeUV> tree_edge_set(int n, const std::vector<int>& parent, int root) {
  std::vector<EdgeUV> te;
  for (int v = 0; v < n; ++v)
    if (v != root) te.push_back(make_edge(v, parent[v]));
  std::sort(te.begin(), te.end());
  return te;
}

}  // namespace

WidthReport edge_cut_width(int vertex_count, const std::vector<int>& parent,
                           const std::vector<EdgeUV>& h_edges) {
  TreeView t = check_tree(vertex_count, parent);
  std::vector<EdgeUV> te = tree_edge_set(vertex_count, parent, t.root);
  WidthReport rep;
  rep.local_edges.assign(vertex_count, {});
  for (const EdgeUV& e : h_edges) {
    if (std::binary_search(te.begin(), te.end(), e)) continue;
    // Mark every vertex on the tree path between the endpoints, inclusive.
    int a = e.u, b = e.v;
    std::vector<int> left, right;
    while (a != b) {
      if (t.depth[a] < t.depth[b]) std::swap(a, b), std::swap(left, right);
      left.push_back(a);
      a = parent[a];
    }
    left.push_back(a);  // the meeting vertex
    for (int v : left) rep.local_edges[v].push_back(e);
    for (int v : right) rep.local_edges[v].push_back(e);
  }
  rep.width = 1;
  for (auto& le : rep.local_edges) {
    std::sort(le.begin(), le.end());
    rep.width = std::max(rep.width, 1 + static_cast<int>(le.size()));
  }
  return rep;
}

namespace {

std::vector<EdgeUV> h_edge_set(const Instance& inst,
                               const SpanningTreeLayout& layout) {
  std::vector<EdgeUV> h = skeleton_edges(inst);
  h.insert(h.end(), layout.extra_edges.begin(), layout.extra_edges.end());
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

}  // namespace

WidthReport edge_cut_width(const Instance& inst, const SpanningTreeLayout& layout) {
  return edge_cut_width(layout.vertex_count, layout.parent, h_edge_set(inst, layout));
}

void validate_layout(const Instance& inst, const SpanningTreeLayout& layout) {
  if (layout.vertex_count != inst.graph.vertex_count)
    throw ModelError("layout vertex count does not match the instance");
  TreeView t = check_tree(layout.vertex_count, layout.parent);
  if (layout.root != t.root)
    throw ModelError("declared root does not match the parent array");
  if (layout.vertex_count > 1 && t.children[t.root].size() != 1)
    throw ModelError("root must be a leaf of the tree");
  std::vector<EdgeUV> skel = skeleton_edges(inst);
  std::set<EdgeUV> seen(skel.begin(), skel.end());
  for (const EdgeUV& e : layout.extra_edges) {
    if (e.u < 0 || e.v >= layout.vertex_count || e.u >= e.v)
      throw ModelError("extra edge malformed or out of range");
    if (!seen.insert(e).second)
      throw ModelError("extra edge duplicates an existing supergraph edge");
  }
  for (int v = 0; v < layout.vertex_count; ++v) {
    if (v == layout.root) continue;
    if (!seen.count(make_edge(v, layout.parent[v])))
      throw ModelError("tree edge " + std::to_string(v) + "-" +
                       std::to_string(layout.parent[v]) +
                       " is not a supergraph edge");
  }
}

Components skeleton_components(const Instance& inst) {
  const int n = inst.graph.vertex_count;
  std::vector<int> dsu(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  for (const Arc& a : inst.graph.arcs) dsu[find(a.tail)] = find(a.head);
  Components comp;
  comp.component_of.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    if (comp.component_of[r] < 0) comp.component_of[r] = comp.count++;
    comp.component_of[v] = comp.component_of[r];
  }
  return comp;
}

namespace {

// ---- layout search ---------------------------------------------------------

struct TreeCandidate {
  std::vector<int> parent;  // rooted anywhere; width does not depend on root
  int width = 0;
};

int width_of_parent(int n, const std::vector<int>& parent,
                    const std::vector<EdgeUV>& h) {
  return edge_cut_width(n, parent, h).width;
}

std::vector<int> bfs_parent(int n, const std::vector<EdgeUV>& edges, int start) {
  std::vector<std::vector<int>> adj(n);
  for (const EdgeUV& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<int> parent(n, -1);
  std::vector<int> queue = {start};
  parent[start] = start;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int w : adj[v])
      if (parent[w] < 0) {
        parent[w] = v;
        queue.push_back(w);
      }
  }
  if (static_cast<int>(queue.size()) != n)
    throw ModelError("skeleton is disconnected; build layouts per component");
  return parent;
}

// Re-root the tree at the lowest-id leaf and return the final layout.
SpanningTreeLayout finish_layout(int n, const std::vector<int>& parent,
                                 const std::vector<EdgeUV>& extras) {
  SpanningTreeLayout lay;
  lay.vertex_count = n;
  lay.extra_edges = extras;
  std::sort(lay.extra_edges.begin(), lay.extra_edges.end());
  if (n == 1) {
    lay.parent = {0};
    lay.root = 0;
    return lay;
  }
  std::vector<std::vector<int>> adj(n);
  TreeView t = check_tree(n, parent);
  for (int v = 0; v < n; ++v)
    if (v != t.root) {
      adj[v].push_back(parent[v]);
      adj[parent[v]].push_back(v);
    }
  int leaf = -1;
  for (int v = 0; v < n && leaf < 0; ++v)
    if (adj[v].size() == 1) leaf = v;
  std::vector<int> np(n, -1);
  np[leaf] = leaf;
  std::vector<int> queue = {leaf};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int w : adj[v])
      if (np[w] < 0) {
        np[w] = v;
        queue.push_back(w);
      }
  }
  lay.parent = np;
  lay.root = leaf;
  return lay;
}

// Exhaustive spanning-tree scan.  Returns the minimum width tree; `aborted`
// reports whether the cap cut the scan short.  Stops early when a tree meets
// the width budget.
std::optional<TreeCandidate> exhaustive_scan(int n, const std::vector<EdgeUV>& h,
                                             std::optional<int> budget,
                                             unsigned long long cap,
                                             bool& aborted) {
  const int m = static_cast<int>(h.size());
  std::vector<int> chosen;
  std::optional<TreeCandidate> best;
  unsigned long long emitted = 0;
  bool satisfied = false;
  aborted = false;

  std::vector<int> dsu(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };

  std::function<void(int)> rec = [&](int i) {
    if (aborted || satisfied) return;
    if (static_cast<int>(chosen.size()) == n - 1) {
      if (++emitted > cap) {
        aborted = true;
        return;
      }
      std::vector<std::vector<int>> adj(n);
      for (int ei : chosen) {
        adj[h[ei].u].push_back(h[ei].v);
        adj[h[ei].v].push_back(h[ei].u);
      }
      std::vector<int> parent(n, -1);
      parent[0] = 0;
      std::vector<int> queue = {0};
      for (size_t qi = 0; qi < queue.size(); ++qi)
        for (int w : adj[queue[qi]])
          if (parent[w] < 0) {
            parent[w] = queue[qi];
            queue.push_back(w);
          }
      int wd = width_of_parent(n, parent, h);
      if (!best || wd < best->width) best = TreeCandidate{parent, wd};
      if (budget && best->width <= *budget) satisfied = true;
      return;
    }
    if (i == m) return;
    if (m - i < n - 1 - static_cast<int>(chosen.size())) return;  // not enough left
    // Include edge i unless it closes a cycle.
    std::vector<int> saved = dsu;
    int ru = find(h[i].u), rv = find(h[i].v);
    if (ru != rv) {
      dsu[ru] = rv;
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
      dsu = saved;
    }
    rec(i + 1);  // exclude edge i
  };
  if (n - 1 <= m) rec(0);
  if (aborted) return std::nullopt;
  return best;  // nullopt here means the skeleton has no spanning tree
}

// Greedy improvement: try replacing one tree edge on the path of a non-tree
// edge by that edge; accept the first strict width improvement and restart.
void swap_improve(int n, const std::vector<EdgeUV>& h, std::vector<int>& parent,
                  int& width) {
  std::vector<EdgeUV> te;
  bool improved = true;
  while (improved) {
    improved = false;
    TreeView t = check_tree(n, parent);
    te = tree_edge_set(n, parent, t.root);
    for (const EdgeUV& e : h) {
      if (std::binary_search(te.begin(), te.end(), e)) continue;
      // Tree path endpoints -> candidate tree edges to drop.
      int a = e.u, b = e.v;
      std::vector<EdgeUV> path_edges;
      while (a != b) {
        if (t.depth[a] < t.depth[b]) std::swap(a, b);
        path_edges.push_back(make_edge(a, parent[a]));
        a = parent[a];
      }
      for (const EdgeUV& drop : path_edges) {
        std::vector<EdgeUV> nt;
        nt.reserve(te.size());
        for (const EdgeUV& x : te)
          if (!(x == drop)) nt.push_back(x);
        nt.push_back(e);
        std::vector<int> np = bfs_parent(n, nt, 0);
        int w2 = width_of_parent(n, np, h);
        if (w2 < width) {
          parent = np;
          width = w2;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
  }
}

}  // namespace

FindLayoutResult find_layout(const Instance& inst, std::optional<int> width_budget,
                             const FindLayoutOptions& opt) {
  validate_instance(inst);
  const int n = inst.graph.vertex_count;
  if (n == 0) throw ModelError("cannot lay out an empty graph");
  std::vector<EdgeUV> skel = skeleton_edges(inst);

  FindLayoutResult res;
  if (n == 1) {
    res.layout = finish_layout(1, {0}, {});
    res.width = 1;
    res.within_budget = !width_budget || 1 <= *width_budget;
    res.exhaustive = true;
    return res;
  }

  const int m = static_cast<int>(skel.size());
  bool try_exhaustive = opt.mode == LayoutMode::Exhaustive ||
                        (opt.mode == LayoutMode::Auto && (n <= 10 || m <= 13));
  if (try_exhaustive) {
    bool aborted = false;
    auto cand = exhaustive_scan(n, skel, width_budget, opt.tree_cap, aborted);
    if (!cand && !aborted)
      throw ModelError("skeleton is disconnected; build layouts per component");
    if (!cand && opt.mode == LayoutMode::Exhaustive)
      throw ResourceError("exhaustive layout scan exceeded the tree cap");
    if (cand) {
      res.layout = finish_layout(n, cand->parent, {});
      res.width = cand->width;
      res.within_budget = !width_budget || res.width <= *width_budget;
      res.exhaustive = true;
      return res;
    }
  }

  // Heuristic: BFS trees from a few deterministic starts, greedy edge swaps,
  // last-resort extra supergraph edges while the budget is unmet.
  std::mt19937 rng(opt.seed);
  std::optional<TreeCandidate> best;
  const int starts = std::min(n, 8);
  for (int s = 0; s < starts; ++s) {
    std::vector<int> parent = bfs_parent(n, skel, s);
    int width = width_of_parent(n, parent, skel);
    swap_improve(n, skel, parent, width);
    if (!best || width < best->width) best = TreeCandidate{parent, width};
    if (width_budget && best->width <= *width_budget) break;
  }

  std::vector<EdgeUV> extras;
  if (opt.allow_extra_edges && width_budget && best->width > *width_budget) {
    // Candidate extras: chords of the current tree between vertices at tree
    // distance two, not already in the supergraph.  Adopt only improvements.
    for (int round = 0; round < 3 && best->width > *width_budget; ++round) {
      TreeView t = check_tree(n, best->parent);
      std::set<EdgeUV> have(skel.begin(), skel.end());
      for (const EdgeUV& e : extras) have.insert(e);
      std::vector<EdgeUV> cands;
      for (int v = 0; v < n; ++v) {
        if (v == t.root) continue;
        int p = best->parent[v];
        if (p == t.root) continue;
        EdgeUV e = make_edge(v, best->parent[p]);
        if (!have.count(e)) cands.push_back(e);
      }
      std::sort(cands.begin(), cands.end());
      bool adopted = false;
      for (const EdgeUV& e : cands) {
        std::vector<EdgeUV> h2(skel);
        h2.insert(h2.end(), extras.begin(), extras.end());
        h2.push_back(e);
        std::sort(h2.begin(), h2.end());
        std::vector<int> parent = bfs_parent(n, h2, 0);
        int width = width_of_parent(n, parent, h2);
        swap_improve(n, h2, parent, width);
        if (width < best->width) {
          extras.push_back(e);
          best = TreeCandidate{parent, width};
          adopted = true;
          break;
        }
      }
      if (!adopted) break;
    }
  }
  (void)rng;

  res.layout = finish_layout(n, best->parent, extras);
  res.width = best->width;
  res.within_budget = !width_budget || res.width <= *width_budget;
  res.exhaustive = false;
  res.used_extra_edges = !extras.empty();
  return res;
}

NodeContext node_context(const Instance& inst, const SpanningTreeLayout& layout,
                         Vertex v) {
  validate_layout(inst, layout);
  const int n = layout.vertex_count;
  if (v < 0 || v >= n) throw ModelError("node_context vertex out of range");
  TreeView t = check_tree(n, layout.parent);

  NodeContext ctx;
  ctx.v = v;
  ctx.in_subtree.assign(n, 0);
  // Collect v's subtree.
  std::vector<int> stack = {v};
  ctx.in_subtree[v] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int c : t.children[x]) {
      ctx.in_subtree[c] = 1;
      stack.push_back(c);
    }
  }
  for (size_t a = 0; a < inst.graph.arcs.size(); ++a) {
    const Arc& arc = inst.graph.arcs[a];
    const bool ti = ctx.in_subtree[arc.tail], hi = ctx.in_subtree[arc.head];
    if (ti == hi) continue;
    ctx.boundary_arcs.push_back(static_cast<int>(a));
    ctx.boundary_out.push_back(ti);
  }
  for (size_t i = 0; i < inst.agents.size(); ++i) {
    const bool si = ctx.in_subtree[inst.agents[i].source];
    const bool ti = ctx.in_subtree[inst.agents[i].target];
    if (si && !ti) ctx.outgoing_agents.push_back(static_cast<int>(i));
    if (!si && ti) ctx.incoming_agents.push_back(static_cast<int>(i));
  }

  std::vector<EdgeUV> h = h_edge_set(inst, layout);
  std::vector<EdgeUV> te = tree_edge_set(n, layout.parent, layout.root);
  for (int w : t.children[v]) {
    // Child subtree mask.
    std::vector<char> sub(n, 0);
    sub[w] = 1;
    std::vector<int> st = {w};
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int c : t.children[x]) {
        sub[c] = 1;
        st.push_back(c);
      }
    }
    bool complex_child = false;
    for (const EdgeUV& e : h) {
      if (std::binary_search(te.begin(), te.end(), e)) continue;
      if (static_cast<bool>(sub[e.u]) != static_cast<bool>(sub[e.v])) {
        complex_child = true;
        break;
      }
    }
    (complex_child ? ctx.complex_children : ctx.simple_children).push_back(w);
  }
  return ctx;
}

}  // namespace soac
