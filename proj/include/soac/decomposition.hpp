// Spanning-tree layouts and their edge-cut width.  A layout is a spanning
// tree T of a supergraph H of the instance skeleton (skeleton edges plus
// optional extra edges), rooted at a leaf of T.  The local edges of a vertex
// v are the non-tree edges of H whose tree path passes through v; the width
// is 1 + the largest local-edge count.
#pragma once

#include <optional>
#include <vector>

#include "soac/model.hpp"

namespace soac {

struct EdgeUV {
  int u = 0, v = 0;  // canonical u < v
  friend bool operator==(const EdgeUV&, const EdgeUV&) = default;
  friend auto operator<=>(const EdgeUV&, const EdgeUV&) = default;
};

EdgeUV make_edge(int a, int b);

// One undirected edge per unordered vertex pair joined by at least one arc.
std::vector<EdgeUV> skeleton_edges(const Instance& inst);

struct SpanningTreeLayout {
  int vertex_count = 0;
  std::vector<int> parent;          // parent[root] == root
  int root = 0;                     // must be a leaf of the tree
  std::vector<EdgeUV> extra_edges;  // supergraph edges beyond the skeleton
};

struct WidthReport {
  int width = 1;
  std::vector<std::vector<EdgeUV>> local_edges;  // per vertex
};

// Width of an arbitrary (edge set, tree) pair.  parent must describe a valid
// tree over the same vertex set; throws ModelError otherwise.
WidthReport edge_cut_width(int vertex_count, const std::vector<int>& parent,
                           const std::vector<EdgeUV>& h_edges);
WidthReport edge_cut_width(const Instance& inst, const SpanningTreeLayout& layout);

// Tree well-formed, root a leaf, every tree edge present in H, extras sane.
void validate_layout(const Instance& inst, const SpanningTreeLayout& layout);

enum class LayoutMode { Auto, Exhaustive, Heuristic };

struct FindLayoutOptions {
  LayoutMode mode = LayoutMode::Auto;
  bool allow_extra_edges = true;
  // Auto mode runs the exhaustive spanning-tree scan only on small skeletons
  // (<= 10 vertices or <= 13 edges) and only while the tree count stays
  // under this cap; otherwise it falls back to the heuristic.
  unsigned long long tree_cap = 200'000ULL;
  unsigned seed = 0;  // heuristic restarts; the default search is seed 0
};

struct FindLayoutResult {
  SpanningTreeLayout layout;
  int width = 1;
  bool within_budget = true;  // false: best effort, budget not met
  bool exhaustive = false;
  bool used_extra_edges = false;
};

// Best layout found for a connected skeleton.  With a width budget the search
// stops early once met; without one it simply returns the best width found.
FindLayoutResult find_layout(const Instance& inst,
                             std::optional<int> width_budget = std::nullopt,
                             const FindLayoutOptions& opt = {});

struct NodeContext {
  Vertex v = 0;
  std::vector<char> in_subtree;     // per vertex, membership of v's subtree
  std::vector<int> boundary_arcs;   // arc ids with exactly one endpoint inside
  std::vector<char> boundary_out;   // parallel: arc leaves the subtree
  std::vector<int> outgoing_agents; // source inside, target outside
  std::vector<int> incoming_agents; // target inside, source outside
  std::vector<int> simple_children; // no non-tree H-edge crosses their subtree
  std::vector<int> complex_children;
};

NodeContext node_context(const Instance& inst, const SpanningTreeLayout& layout,
                         Vertex v);

// Weakly-connected components of the instance skeleton; isolated vertices
// form their own components.  component_of[v] in [0, count).
struct Components {
  int count = 0;
  std::vector<int> component_of;
};
Components skeleton_components(const Instance& inst);

}  // namespace soac
