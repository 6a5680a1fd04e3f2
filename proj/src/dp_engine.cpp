#include "dp_engine.hpp"

#include <algorithm>
#include <cassert>
#include <iostream>

namespace soac::dp {

namespace {

template <typename T>
bool sorted_unique(const std::vector<T>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;
  return true;
}

GenSnap canon(GenSnap g) {
  std::sort(g.a_out.begin(), g.a_out.end());
  std::sort(g.a_in.begin(), g.a_in.end());
  std::sort(g.s_out.begin(), g.s_out.end());
  std::sort(g.s_in.begin(), g.s_in.end());
  std::sort(g.d_pairs.begin(), g.d_pairs.end());
  std::sort(g.r_pairs.begin(), g.r_pairs.end());
  return g;
}

}  // namespace

GenSnap snap_from_soac(const NodeContext& ctx, const Snapshot& s) {
  GenSnap g;
  g.a_out = ctx.outgoing_agents;
  g.a_in = ctx.incoming_agents;
  g.alpha_local = 0;
  g.s_out = s.s_out;
  g.s_in = s.s_in;
  g.d_pairs = s.d_pairs;
  g.r_pairs = s.r_pairs;
  return canon(std::move(g));
}

Snapshot snap_to_soac(const GenSnap& g) {
  Snapshot s;
  s.s_out = g.s_out;
  s.s_in = g.s_in;
  s.d_pairs = g.d_pairs;
  s.r_pairs = g.r_pairs;
  return s;
}

Engine::Engine(const Instance& inst, const SpanningTreeLayout& layout,
               bool minmax, int alpha, const SearchBudget& budget)
    : inst_(inst), layout_(layout), minmax_(minmax), alpha_(alpha),
      budget_(budget) {
  validate_layout(inst, layout);
  if (minmax_ && alpha_ < 0) throw ModelError("negative unrouted budget");
  n_ = layout.vertex_count;
  root_ = layout.root;
  parent_ = layout.parent;
  children_.assign(n_, {});
  for (int v = 0; v < n_; ++v)
    if (v != root_) children_[parent_[v]].push_back(v);
  depth_.assign(n_, 0);
  {
    std::vector<int> stack{root_};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : children_[v]) {
        depth_[w] = depth_[v] + 1;
        stack.push_back(w);
      }
    }
  }
  ctx_.reserve(n_);
  for (int v = 0; v < n_; ++v) ctx_.push_back(node_context(inst, layout, v));
  caps_ = capacities(inst);
  arc_lca_.reserve(inst.graph.arcs.size());
  for (const Arc& a : inst_.graph.arcs) arc_lca_.push_back(lca(a.tail, a.head));
  bases_.assign(n_, std::nullopt);
  memo_.assign(n_, {});
  base_memo_.assign(n_, std::nullopt);
}

void Engine::tick(unsigned long long weight) {
  states_ += weight;
  if (states_ > budget_.max_states)
    throw ResourceError(
        "tree solver exceeded its state budget; "
        "the brute-force oracle may still handle this instance");
}

int Engine::lca(int a, int b) const {
  while (depth_[a] > depth_[b]) a = parent_[a];
  while (depth_[b] > depth_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

bool Engine::precheck_ok() const {
  // Every outgoing agent of a subtree needs one unit of outgoing cut
  // capacity for its first crossing (minus the unrouted budget in min-max
  // mode); symmetrically for incoming agents.  Counting capacity exactly
  // keeps the test sound in the presence of parallel boundary arcs.
  for (int v = 0; v < n_; ++v) {
    const NodeContext& cx = ctx_[v];
    long out_cap = 0, in_cap = 0;
    for (size_t i = 0; i < cx.boundary_arcs.size(); ++i) {
      if (cx.boundary_out[i])
        out_cap += caps_[cx.boundary_arcs[i]];
      else
        in_cap += caps_[cx.boundary_arcs[i]];
    }
    long slack = minmax_ ? alpha_ : 0;
    if ((long)cx.outgoing_agents.size() > out_cap + slack) return false;
    if ((long)cx.incoming_agents.size() > in_cap + slack) return false;
  }
  return true;
}

const Engine::NodeBase& Engine::node_base(Vertex v) const {
  if (bases_[v]) return *bases_[v];
  const NodeContext& cx = ctx_[v];
  NodeBase nb;
  nb.v = v;
  if (minmax_) {
    nb.cplx = children_[v];
  } else {
    nb.cplx = cx.complex_children;
    nb.simp = cx.simple_children;
  }
  int nc = (int)nb.cplx.size();

  nb.kv_of_vertex.assign(n_, -1);
  auto addv = [&](int orig, int region) {
    if (nb.kv_of_vertex[orig] < 0) {
      nb.kv_of_vertex[orig] = (int)nb.vertex_of_kv.size();
      nb.vertex_of_kv.push_back(orig);
      nb.region_of_kv.push_back(region);
    }
    return nb.kv_of_vertex[orig];
  };
  nb.kv_v = addv(v, -1);
  for (int a : cx.boundary_arcs) {
    const Arc& ar = inst_.graph.arcs[a];
    int outside = cx.in_subtree[ar.tail] ? ar.head : ar.tail;
    addv(outside, -1);
  }
  nb.in_kvs.assign(nc, {});
  for (int s = 0; s < nc; ++s) {
    const NodeContext& cw = ctx_[nb.cplx[s]];
    for (size_t i = 0; i < cw.boundary_arcs.size(); ++i) {
      const Arc& ar = inst_.graph.arcs[cw.boundary_arcs[i]];
      int inside = cw.boundary_out[i] ? ar.tail : ar.head;
      int kv = addv(inside, s);
      if (std::find(nb.in_kvs[s].begin(), nb.in_kvs[s].end(), kv) ==
          nb.in_kvs[s].end())
        nb.in_kvs[s].push_back(kv);
    }
    int wout = (int)nb.vertex_of_kv.size();
    nb.vertex_of_kv.push_back(-1);
    nb.region_of_kv.push_back(s);
    nb.wout.push_back(wout);
    int win = (int)nb.vertex_of_kv.size();
    nb.vertex_of_kv.push_back(-1);
    nb.region_of_kv.push_back(s);
    nb.win.push_back(win);
  }

  long art = (long)inst_.agents.size();
  for (int a : cx.boundary_arcs) art += caps_[a];
  for (int s = 0; s < nc; ++s)
    for (int a : ctx_[nb.cplx[s]].boundary_arcs) art += caps_[a];
  nb.artificial_cap = std::max(art, 1L);

  auto mark_roles = [&](KArc& ka, const Arc& ar) {
    for (int s = 0; s < nc; ++s) {
      const auto& sub = ctx_[nb.cplx[s]].in_subtree;
      bool ti = sub[ar.tail] != 0, hi = sub[ar.head] != 0;
      if (ti && !hi) ka.out_of = s;
      if (hi && !ti) ka.into = s;
    }
  };

  for (size_t i = 0; i < cx.boundary_arcs.size(); ++i) {
    int a = cx.boundary_arcs[i];
    const Arc& ar = inst_.graph.arcs[a];
    KArc ka;
    ka.tail = nb.kv_of_vertex[ar.tail];
    ka.head = nb.kv_of_vertex[ar.head];
    assert(ka.tail >= 0 && ka.head >= 0);
    ka.real = a;
    ka.cap = caps_[a];
    ka.lat = &inst_.latencies[a];
    ka.charged = false;
    ka.bd_v = true;
    ka.bd_out = cx.boundary_out[i] != 0;
    ka.kind = KArc::Real;
    mark_roles(ka, ar);
    nb.arcs.push_back(ka);
  }
  for (size_t a = 0; a < inst_.graph.arcs.size(); ++a) {
    if (arc_lca_[a] != v) continue;
    const Arc& ar = inst_.graph.arcs[a];
    int kt = nb.kv_of_vertex[ar.tail], kh = nb.kv_of_vertex[ar.head];
    if (kt < 0 || kh < 0) {
      // only arcs between v and a simple child land here; they are priced in
      // the node's base term together with that child's table
      assert(!minmax_);
      continue;
    }
    KArc ka;
    ka.tail = kt;
    ka.head = kh;
    ka.real = (int)a;
    ka.cap = caps_[a];
    ka.lat = &inst_.latencies[a];
    ka.charged = true;
    ka.kind = KArc::Real;
    mark_roles(ka, ar);
    nb.arcs.push_back(ka);
  }
  for (int s = 0; s < nc; ++s) {
    for (int x : nb.in_kvs[s])
      for (int y : nb.in_kvs[s]) {
        if (x == y) continue;
        KArc ka;
        ka.tail = x;
        ka.head = y;
        ka.cap = nb.artificial_cap;
        ka.kind = KArc::Marker;
        ka.child = s;
        nb.arcs.push_back(ka);
      }
    for (int x : nb.in_kvs[s]) {
      KArc wo;
      wo.tail = nb.wout[s];
      wo.head = x;
      wo.cap = nb.artificial_cap;
      wo.kind = KArc::WOut;
      wo.child = s;
      nb.arcs.push_back(wo);
      KArc wi;
      wi.tail = x;
      wi.head = nb.win[s];
      wi.cap = nb.artificial_cap;
      wi.kind = KArc::WIn;
      wi.child = s;
      nb.arcs.push_back(wi);
    }
  }
  bases_[v] = std::move(nb);
  return *bases_[v];
}

Engine::Kern Engine::make_kern(const NodeBase& nb, const GenSnap& snap) const {
  Kern k;
  k.base = &nb;
  k.arcs = nb.arcs;
  for (size_t i = 0; i < k.arcs.size(); ++i)
    if (k.arcs[i].real >= 0) k.karc_of_real[k.arcs[i].real] = (int)i;
  k.dinsts = snap.d_pairs;
  for (size_t i = 0; i < snap.r_pairs.size(); ++i) {
    auto [f, e] = snap.r_pairs[i];
    Kern::RInst ri;
    ri.f_real = f;
    ri.e_real = e;
    ri.f_karc = k.karc_of_real.at(f);
    ri.e_karc = k.karc_of_real.at(e);
    ri.s_karc = (int)k.arcs.size();
    KArc s;
    s.tail = nb.kv_of_vertex[inst_.graph.arcs[f].head];
    s.head = nb.kv_of_vertex[inst_.graph.arcs[e].tail];
    assert(s.tail >= 0 && s.head >= 0);
    s.cap = 1;
    s.kind = KArc::Shortcut;
    s.rinst = (int)i;
    k.arcs.push_back(s);
    k.rinsts.push_back(ri);
  }
  k.adj.assign(nb.vertex_of_kv.size(), {});
  for (size_t i = 0; i < k.arcs.size(); ++i)
    k.adj[k.arcs[i].tail].push_back((int)i);
  return k;
}

bool Engine::snap_valid(Vertex v, const GenSnap& g) const {
  const NodeContext& cx = ctx_[v];
  if (!sorted_unique(g.a_out) || !sorted_unique(g.a_in)) return false;
  auto subset_of = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  if (!subset_of(g.a_out, cx.outgoing_agents)) return false;
  if (!subset_of(g.a_in, cx.incoming_agents)) return false;
  if (minmax_) {
    if (g.alpha_local < 0 || g.alpha_local > alpha_) return false;
  } else {
    if (g.a_out != cx.outgoing_agents || g.a_in != cx.incoming_agents)
      return false;
    if (g.alpha_local != 0) return false;
  }
  std::vector<char> is_out(inst_.graph.arcs.size(), 0),
      is_in(inst_.graph.arcs.size(), 0);
  for (size_t i = 0; i < cx.boundary_arcs.size(); ++i)
    (cx.boundary_out[i] ? is_out : is_in)[cx.boundary_arcs[i]] = 1;
  auto arcs_match = [&](const std::vector<std::pair<int, int>>& sel,
                        const std::vector<int>& agents,
                        const std::vector<char>& side) {
    if (sel.size() != agents.size()) return false;
    for (size_t i = 0; i < sel.size(); ++i) {
      if (sel[i].first != agents[i]) return false;
      int a = sel[i].second;
      if (a < 0 || a >= (int)side.size() || !side[a]) return false;
    }
    return true;
  };
  if (!arcs_match(g.s_out, g.a_out, is_out)) return false;
  if (!arcs_match(g.s_in, g.a_in, is_in)) return false;
  auto reverse_parallel = [&](int x, int y) {
    const Arc& ax = inst_.graph.arcs[x];
    const Arc& ay = inst_.graph.arcs[y];
    return ax.tail == ay.head && ax.head == ay.tail;
  };
  if (!std::is_sorted(g.d_pairs.begin(), g.d_pairs.end())) return false;
  if (!std::is_sorted(g.r_pairs.begin(), g.r_pairs.end())) return false;
  for (auto [e, f] : g.d_pairs) {
    if (e < 0 || e >= (int)is_in.size() || !is_in[e]) return false;
    if (f < 0 || f >= (int)is_out.size() || !is_out[f]) return false;
    if (reverse_parallel(e, f)) return false;
  }
  for (auto [f, e] : g.r_pairs) {
    if (f < 0 || f >= (int)is_out.size() || !is_out[f]) return false;
    if (e < 0 || e >= (int)is_in.size() || !is_in[e]) return false;
    if (reverse_parallel(f, e)) return false;
  }
  std::map<int, int> use;
  for (auto& [agent, a] : g.s_out) use[a]++;
  for (auto& [agent, a] : g.s_in) use[a]++;
  for (auto [e, f] : g.d_pairs) {
    use[e]++;
    use[f]++;
  }
  for (auto [f, e] : g.r_pairs) {
    use[f]++;
    use[e]++;
  }
  for (auto& [a, n] : use)
    if (n > caps_[a]) return false;
  return true;
}

std::vector<Engine::Ent> Engine::base_entities(const NodeBase& nb,
                                               const Kern& k,
                                               const GenSnap& snap) const {
  [[maybe_unused]] const NodeContext& cx = ctx_[nb.v];
  int nc = (int)nb.cplx.size();
  auto place_src = [&](Vertex x) {
    if (x == nb.v) return nb.kv_v;
    for (int s = 0; s < nc; ++s)
      if (ctx_[nb.cplx[s]].in_subtree[x]) return nb.wout[s];
    assert(cx.in_subtree[x]);  // folded simple subtree
    return nb.kv_v;
  };
  auto place_tgt = [&](Vertex x) {
    if (x == nb.v) return nb.kv_v;
    for (int s = 0; s < nc; ++s)
      if (ctx_[nb.cplx[s]].in_subtree[x]) return nb.win[s];
    assert(cx.in_subtree[x]);
    return nb.kv_v;
  };

  std::vector<Ent> es;
  for (size_t i = 0; i < inst_.agents.size(); ++i) {
    const Agent& ag = inst_.agents[i];
    if (lca(ag.source, ag.target) != nb.v) continue;
    Ent e;
    e.kind = Ent::Internal;
    e.agent = (int)i;
    e.start = place_src(ag.source);
    e.end = place_tgt(ag.target);
    e.shortcuts_ok = true;
    e.droppable = minmax_;
    es.push_back(e);
  }
  for (auto [agent, arc] : snap.s_out) {
    Ent e;
    e.kind = Ent::Outgoing;
    e.agent = agent;
    e.start = place_src(inst_.agents[agent].source);
    e.end = nb.kv_of_vertex[inst_.graph.arcs[arc].head];
    e.pin_last = k.karc_of_real.at(arc);
    es.push_back(e);
  }
  for (auto [agent, arc] : snap.s_in) {
    Ent e;
    e.kind = Ent::Incoming;
    e.agent = agent;
    e.start = nb.kv_of_vertex[inst_.graph.arcs[arc].tail];
    e.end = place_tgt(inst_.agents[agent].target);
    e.pin_first = k.karc_of_real.at(arc);
    es.push_back(e);
  }
  for (size_t i = 0; i < k.dinsts.size(); ++i) {
    auto [ein, fout] = k.dinsts[i];
    Ent e;
    e.kind = Ent::Marker;
    e.start = nb.kv_of_vertex[inst_.graph.arcs[ein].tail];
    e.end = nb.kv_of_vertex[inst_.graph.arcs[fout].head];
    e.pin_first = k.karc_of_real.at(ein);
    e.pin_last = k.karc_of_real.at(fout);
    e.inst = (int)i;
    es.push_back(e);
  }
  return es;
}

void Engine::entity_menu(const Kern& k, const Ent& e,
                         std::vector<std::vector<int>>& menu) {
  menu.clear();
  std::vector<char> visited(k.base->vertex_of_kv.size(), 0);
  std::vector<int> path;
  visited[e.start] = 1;

  std::function<void(int, int, int)> dfs = [&](int cur, int must_follow,
                                               int must_exit) {
    tick();
    if (cur == e.end && e.pin_last < 0 && must_follow < 0 && must_exit < 0 &&
        (e.pin_first < 0 || !path.empty())) {
      // a simple path cannot leave its end vertex and come back
      menu.push_back(path);
      return;
    }
    for (int karc : k.adj[cur]) {
      const KArc& a = k.arcs[karc];
      if (must_follow >= 0 && karc != must_follow) continue;
      bool forced = must_follow >= 0;
      bool selfloop = a.tail == a.head;  // shortcut of a zero-hop excursion

      auto advance = [&](int nf, int ne) {
        path.push_back(karc);
        if (!selfloop) visited[a.head] = 1;
        if (karc == e.pin_last) {
          if (a.head == e.end && nf < 0 && ne < 0) menu.push_back(path);
        } else {
          dfs(a.head, nf, ne);
        }
        if (!selfloop) visited[a.head] = 0;
        path.pop_back();
      };

      if (a.kind == KArc::Shortcut) {
        if (!forced) continue;  // reachable only inside its flanked triple
        if (!selfloop && visited[a.head]) continue;
        advance(k.rinsts[a.rinst].e_karc, -1);
        continue;
      }
      if (visited[a.head]) continue;
      if (path.empty() && e.pin_first >= 0 && karc != e.pin_first) continue;
      if (must_exit >= 0 && !(a.kind == KArc::Real && a.out_of == must_exit))
        continue;
      if (e.kind == Ent::Connector && karc != e.pin_first &&
          karc != e.pin_last) {
        // an excursion's outside part may not touch its own subtree again
        if (a.kind == KArc::Real &&
            (a.out_of == e.conn_child || a.into == e.conn_child))
          continue;
        if ((a.kind == KArc::Marker || a.kind == KArc::WOut ||
             a.kind == KArc::WIn) &&
            a.child == e.conn_child)
          continue;
      }
      switch (a.kind) {
        case KArc::Real:
          if (a.bd_v) {
            if (karc == e.pin_last) {
              advance(-1, -1);
            } else if (forced) {
              // the closing boundary-in arc of a flanked triple
              advance(-1, -1);
            } else if (path.empty() && karc == e.pin_first && !a.bd_out) {
              advance(-1, -1);
            } else if (a.bd_out && e.shortcuts_ok &&
                       (karc == e.pin_first ? path.empty() : true)) {
              // leaving the subtree must consume one excursion instance
              for (size_t i = 0; i < k.rinsts.size(); ++i)
                if (k.rinsts[i].f_karc == karc)
                  advance(k.rinsts[i].s_karc, -1);
            }
          } else {
            advance(-1, -1);
          }
          break;
        case KArc::Marker: {
          if (path.empty()) break;
          const KArc& p = k.arcs[path.back()];
          if (!(p.kind == KArc::Real && p.into == a.child)) break;
          advance(-1, a.child);
        } break;
        case KArc::WOut:
          if (!path.empty()) break;
          advance(-1, a.child);
          break;
        case KArc::WIn: {
          if (a.head != e.end) break;
          if (path.empty()) break;
          const KArc& p = k.arcs[path.back()];
          if (!(p.kind == KArc::Real && p.into == a.child)) break;
          advance(-1, -1);
        } break;
        case KArc::Shortcut:
          break;
      }
    }
  };
  dfs(e.start, -1, -1);
}

Engine::BaseCost Engine::base_cost(Vertex v, const ChildLookup& look,
                                   bool allow_cache) {
  if (allow_cache && base_memo_[v]) return *base_memo_[v];
  BaseCost out;
  out.cost = Cost(0);
  for (int w : ctx_[v].simple_children) {
    const NodeContext& cw = ctx_[w];
    std::vector<int> out_arcs, in_arcs;
    for (size_t i = 0; i < cw.boundary_arcs.size(); ++i)
      (cw.boundary_out[i] ? out_arcs : in_arcs).push_back(cw.boundary_arcs[i]);
    Cost best = Cost::infinity();
    GenSnap best_snap;
    std::map<int, int> load;
    GenSnap psi;
    psi.a_out = cw.outgoing_agents;
    psi.a_in = cw.incoming_agents;

    std::function<void(size_t)> place_in = [&](size_t i) {
      tick();
      if (i == cw.incoming_agents.size()) {
        Cost c = look(w, psi);
        if (c.is_infinite()) return;
        for (auto& [a, x] : load)
          if (x > 0) c += Cost(Rat(x) * inst_.latencies[a][x - 1]);
        if (c < best) {
          best = c;
          best_snap = psi;
        }
        return;
      }
      for (int a : in_arcs) {
        if (load[a] + 1 > caps_[a]) continue;
        load[a]++;
        psi.s_in.push_back({cw.incoming_agents[i], a});
        place_in(i + 1);
        psi.s_in.pop_back();
        load[a]--;
      }
    };
    std::function<void(size_t)> place_out = [&](size_t i) {
      tick();
      if (i == cw.outgoing_agents.size()) {
        place_in(0);
        return;
      }
      for (int a : out_arcs) {
        if (load[a] + 1 > caps_[a]) continue;
        load[a]++;
        psi.s_out.push_back({cw.outgoing_agents[i], a});
        place_out(i + 1);
        psi.s_out.pop_back();
        load[a]--;
      }
    };
    place_out(0);

    if (best.is_infinite()) {
      out.cost = Cost::infinity();
      out.argmin.clear();
      if (allow_cache) base_memo_[v] = out;
      return out;
    }
    out.cost += best;
    out.argmin.push_back(best_snap);
  }
  if (allow_cache) base_memo_[v] = out;
  return out;
}

void Engine::derive_snapshots(
    const NodeBase& nb, const Kern& k, const std::vector<Ent>& ents,
    const std::vector<std::optional<std::vector<int>>>& paths,
    std::vector<GenSnap>& out) const {
  int nc = (int)nb.cplx.size();
  out.assign(nc, GenSnap{});
  for (size_t i = 0; i < ents.size(); ++i) {
    if (!paths[i]) continue;
    const Ent& e = ents[i];
    std::vector<std::vector<std::pair<char, int>>> ev(nc);
    for (int karc : *paths[i]) {
      const KArc& a = k.arcs[karc];
      if (a.kind != KArc::Real) continue;
      if (a.out_of >= 0) ev[a.out_of].push_back({1, a.real});
      if (a.into >= 0) ev[a.into].push_back({0, a.real});
    }
    for (int s = 0; s < nc; ++s) {
      auto& es = ev[s];
      if (e.kind == Ent::Connector && e.conn_child == s) {
        assert(es.size() == 2 && es[0].first == 1 && es[1].first == 0);
        assert(std::make_pair(es[0].second, es[1].second) == e.conn_pair);
        out[s].r_pairs.push_back(e.conn_pair);
        continue;
      }
      if (es.empty()) continue;
      size_t lo = 0, hi = es.size();
      if (e.start == nb.wout[s]) {
        assert(es[0].first == 1);
        out[s].s_out.push_back({e.agent, es[0].second});
        lo = 1;
      }
      if (e.end == nb.win[s]) {
        assert(es.back().first == 0);
        out[s].s_in.push_back({e.agent, es.back().second});
        hi -= 1;
      }
      assert((hi - lo) % 2 == 0);
      for (size_t j = lo; j + 1 < hi; j += 2) {
        assert(es[j].first == 0 && es[j + 1].first == 1);
        out[s].d_pairs.push_back({es[j].second, es[j + 1].second});
      }
    }
  }
  for (int s = 0; s < nc; ++s) {
    std::sort(out[s].s_out.begin(), out[s].s_out.end());
    std::sort(out[s].s_in.begin(), out[s].s_in.end());
    std::sort(out[s].d_pairs.begin(), out[s].d_pairs.end());
    assert(std::is_sorted(out[s].r_pairs.begin(), out[s].r_pairs.end()));
    for (auto& [agent, arc] : out[s].s_out) out[s].a_out.push_back(agent);
    for (auto& [agent, arc] : out[s].s_in) out[s].a_in.push_back(agent);
  }
}

Cost Engine::compute_record(Vertex v, const GenSnap& snap,
                            const ChildLookup& look, bool allow_cache,
                            Config* capture) {
  if (!snap_valid(v, snap)) return Cost::infinity();
  const NodeBase& nb = node_base(v);
  const NodeContext& cx = ctx_[v];
  int nc = (int)nb.cplx.size();

  BaseCost bc;
  bc.cost = Cost(0);
  if (!nb.simp.empty()) {
    bc = base_cost(v, look, allow_cache);
    if (bc.cost.is_infinite()) return Cost::infinity();
  }

  Kern kern = make_kern(nb, snap);
  std::vector<Ent> base = base_entities(nb, kern, snap);
  std::vector<std::vector<std::vector<int>>> base_menus(base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    entity_menu(kern, base[i], base_menus[i]);
    if (!base[i].droppable && base_menus[i].empty()) return Cost::infinity();
  }

  // candidate excursion pairs of each complex child
  std::vector<std::vector<std::pair<int, int>>> pair_dom(nc);
  for (int s = 0; s < nc; ++s) {
    const NodeContext& cw = ctx_[nb.cplx[s]];
    std::vector<int> fs, es;
    for (size_t i = 0; i < cw.boundary_arcs.size(); ++i)
      (cw.boundary_out[i] ? fs : es).push_back(cw.boundary_arcs[i]);
    for (int f : fs)
      for (int e : es) {
        const Arc& af = inst_.graph.arcs[f];
        const Arc& ae = inst_.graph.arcs[e];
        if (af.tail == ae.head && af.head == ae.tail) continue;
        pair_dom[s].push_back({f, e});
      }
    std::sort(pair_dom[s].begin(), pair_dom[s].end());
  }

  Cost best = Cost::infinity();
  std::vector<int> loads(kern.arcs.size(), 0);
  std::vector<Ent> ents = base;
  std::vector<std::vector<std::vector<int>>> menus = base_menus;
  std::vector<std::optional<std::vector<int>>> paths;

  long dropped_bd = (long)(cx.outgoing_agents.size() - snap.a_out.size()) +
                    (long)(cx.incoming_agents.size() - snap.a_in.size());

  auto finalize = [&]() {
    for (const auto& ri : kern.rinsts)
      if (loads[ri.s_karc] != 1) return;  // every claimed excursion happens
    Cost total = bc.cost;
    for (size_t i = 0; i < kern.arcs.size(); ++i) {
      const KArc& a = kern.arcs[i];
      if (a.charged && loads[i] > 0)
        total += Cost(Rat(loads[i]) * (*a.lat)[loads[i] - 1]);
    }
    std::vector<GenSnap> kids;
    derive_snapshots(nb, kern, ents, paths, kids);
    long unrouted = 0;
    for (size_t i = 0; i < ents.size(); ++i)
      if (!paths[i]) unrouted++;
    long t = snap.alpha_local - unrouted - dropped_bd;
    if (t < 0) return;
    if (nc == 0) {
      if (t != 0) return;
      if (total < best) {
        best = total;
        if (capture) {
          capture->ents = ents;
          capture->paths = paths;
          capture->child_snaps = kids;
          capture->simple_snaps = bc.argmin;
          capture->kern = kern;
        }
      }
      return;
    }
    std::vector<int> beta(nc, 0);
    std::function<void(int, long)> compose = [&](int s, long rem) {
      tick();
      if (s == nc - 1) {
        beta[s] = (int)rem;
        std::vector<GenSnap> fin = kids;
        for (int q = 0; q < nc; ++q) {
          const NodeContext& cq = ctx_[nb.cplx[q]];
          fin[q].alpha_local =
              beta[q] +
              (int)(cq.outgoing_agents.size() - fin[q].a_out.size()) +
              (int)(cq.incoming_agents.size() - fin[q].a_in.size());
          if (fin[q].alpha_local > alpha_) return;
        }
        Cost sum = total;
        for (int q = 0; q < nc; ++q) {
          sum += look(nb.cplx[q], fin[q]);
          if (sum.is_infinite()) return;
        }
        if (sum < best) {
          best = sum;
          if (capture) {
            capture->ents = ents;
            capture->paths = paths;
            capture->child_snaps = fin;
            capture->simple_snaps = bc.argmin;
            capture->kern = kern;
          }
        }
        return;
      }
      for (long b = 0; b <= rem; ++b) {
        beta[s] = (int)b;
        compose(s + 1, rem - b);
      }
    };
    compose(0, t);
  };

  std::function<void(size_t)> route = [&](size_t idx) {
    tick();
    if (idx == ents.size()) {
      finalize();
      return;
    }
    for (const auto& p : menus[idx]) {
      bool ok = true;
      for (int karc : p)
        if (loads[karc] + 1 > kern.arcs[karc].cap) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (int karc : p) loads[karc]++;
      paths[idx] = p;
      route(idx + 1);
      paths[idx] = std::nullopt;
      for (int karc : p) loads[karc]--;
    }
    if (ents[idx].droppable) route(idx + 1);  // leave the agent unrouted
  };

  // connector configurations: one multiset of excursion pairs per complex
  // child, bounded by the boundary arcs' capacities
  std::map<int, int> conn_use;
  std::vector<std::vector<std::pair<int, int>>> chosen(nc);
  std::function<void(int, size_t)> config = [&](int s, size_t pi) {
    tick();
    if (s == nc) {
      ents.resize(base.size());
      menus.resize(base.size());
      for (int q = 0; q < nc; ++q)
        for (size_t j = 0; j < chosen[q].size(); ++j) {
          auto [f, e] = chosen[q][j];
          Ent c;
          c.kind = Ent::Connector;
          c.conn_child = q;
          c.conn_pair = {f, e};
          c.inst = (int)j;
          c.start = nb.kv_of_vertex[inst_.graph.arcs[f].tail];
          c.end = nb.kv_of_vertex[inst_.graph.arcs[e].head];
          c.pin_first = kern.karc_of_real.at(f);
          c.pin_last = kern.karc_of_real.at(e);
          c.shortcuts_ok = true;
          ents.push_back(c);
          menus.emplace_back();
          entity_menu(kern, ents.back(), menus.back());
          if (menus.back().empty()) return;  // excursion unrealizable
        }
      paths.assign(ents.size(), std::nullopt);
      route(0);
      return;
    }
    if (pi == pair_dom[s].size()) {
      config(s + 1, 0);
      return;
    }
    auto [f, e] = pair_dom[s][pi];
    config(s, pi + 1);  // zero copies first
    int added = 0;
    while (conn_use[f] + 1 <= caps_[f] && conn_use[e] + 1 <= caps_[e]) {
      conn_use[f]++;
      conn_use[e]++;
      chosen[s].push_back({f, e});
      added++;
      config(s, pi + 1);
    }
    for (int j = 0; j < added; ++j) {
      conn_use[f]--;
      conn_use[e]--;
      chosen[s].pop_back();
    }
  };
  config(0, 0);
  return best;
}

Cost Engine::record(Vertex v, const GenSnap& snap0) {
  GenSnap snap = canon(snap0);
  auto it = memo_[v].find(snap);
  if (it != memo_[v].end()) return it->second;
  ChildLookup look = [this](Vertex w, const GenSnap& ps) {
    return record(w, ps);
  };
  Cost c = compute_record(v, snap, look, true, nullptr);
  memo_[v].emplace(snap, c);
  return c;
}

Cost Engine::record_against(
    Vertex v, const GenSnap& snap0,
    const std::map<Vertex, std::map<GenSnap, Cost>>& tables) {
  GenSnap snap = canon(snap0);
  ChildLookup look = [&](Vertex w, const GenSnap& ps) -> Cost {
    auto it = tables.find(w);
    if (it != tables.end()) {
      auto jt = it->second.find(ps);
      if (jt != it->second.end()) return jt->second;
    }
    missing_child_ = true;
    std::cerr << "note: derived snapshot of child " << w
              << " absent from its table; treated as infeasible\n";
    return Cost::infinity();
  };
  return compute_record(v, snap, look, false, nullptr);
}

std::vector<GenSnap> Engine::enumerate(Vertex v) {
  const NodeContext& cx = ctx_[v];
  std::vector<int> outs, ins;
  for (size_t i = 0; i < cx.boundary_arcs.size(); ++i)
    (cx.boundary_out[i] ? outs : ins).push_back(cx.boundary_arcs[i]);
  std::vector<std::pair<int, int>> pd, pr;
  for (int e : ins)
    for (int f : outs) {
      const Arc& ae = inst_.graph.arcs[e];
      const Arc& af = inst_.graph.arcs[f];
      if (ae.tail == af.head && ae.head == af.tail) continue;
      pd.push_back({e, f});
      pr.push_back({f, e});
    }
  std::sort(pd.begin(), pd.end());
  std::sort(pr.begin(), pr.end());

  std::vector<GenSnap> result;
  std::map<int, int> use;
  GenSnap g;

  // Agents that can only be dropped inside this subtree: both endpoints here.
  long n_local = 0;
  for (const Agent& ag : inst_.agents)
    if (cx.in_subtree[ag.source] && cx.in_subtree[ag.target]) ++n_local;

  auto emit = [&]() {
    if (minmax_) {
      // alpha_local counts every unrouted agent with an endpoint in the
      // subtree, so it is bounded below by the dropped boundary agents and
      // above by them plus the fully-local ones.
      const long dropped =
          (long)(cx.outgoing_agents.size() - g.a_out.size()) +
          (long)(cx.incoming_agents.size() - g.a_in.size());
      const long hi = std::min<long>(alpha_, dropped + n_local);
      for (long al = dropped; al <= hi; ++al) {
        g.alpha_local = (int)al;
        result.push_back(g);
        tick();
      }
    } else {
      g.alpha_local = 0;
      result.push_back(g);
      tick();
    }
  };
  std::function<void(size_t)> gen_r = [&](size_t i) {
    tick();
    if (i == pr.size()) {
      emit();
      return;
    }
    gen_r(i + 1);
    auto [f, e] = pr[i];
    int added = 0;
    while (use[f] + 1 <= caps_[f] && use[e] + 1 <= caps_[e]) {
      use[f]++;
      use[e]++;
      g.r_pairs.push_back({f, e});
      added++;
      gen_r(i + 1);
    }
    for (int j = 0; j < added; ++j) {
      use[f]--;
      use[e]--;
      g.r_pairs.pop_back();
    }
  };
  std::function<void(size_t)> gen_d = [&](size_t i) {
    tick();
    if (i == pd.size()) {
      gen_r(0);
      return;
    }
    gen_d(i + 1);
    auto [e, f] = pd[i];
    int added = 0;
    while (use[e] + 1 <= caps_[e] && use[f] + 1 <= caps_[f]) {
      use[e]++;
      use[f]++;
      g.d_pairs.push_back({e, f});
      added++;
      gen_d(i + 1);
    }
    for (int j = 0; j < added; ++j) {
      use[e]--;
      use[f]--;
      g.d_pairs.pop_back();
    }
  };
  std::function<void(size_t)> gen_sin = [&](size_t i) {
    tick();
    if (i == g.a_in.size()) {
      gen_d(0);
      return;
    }
    for (int a : ins) {
      if (use[a] + 1 > caps_[a]) continue;
      use[a]++;
      g.s_in.push_back({g.a_in[i], a});
      gen_sin(i + 1);
      g.s_in.pop_back();
      use[a]--;
    }
  };
  std::function<void(size_t)> gen_sout = [&](size_t i) {
    tick();
    if (i == g.a_out.size()) {
      gen_sin(0);
      return;
    }
    for (int a : outs) {
      if (use[a] + 1 > caps_[a]) continue;
      use[a]++;
      g.s_out.push_back({g.a_out[i], a});
      gen_sout(i + 1);
      g.s_out.pop_back();
      use[a]--;
    }
  };

  auto run_domains = [&]() { gen_sout(0); };
  if (!minmax_) {
    g.a_out = cx.outgoing_agents;
    g.a_in = cx.incoming_agents;
    run_domains();
  } else {
    size_t no = cx.outgoing_agents.size(), ni = cx.incoming_agents.size();
    if (no > 20 || ni > 20)
      throw ResourceError("too many boundary agents to enumerate snapshots");
    for (unsigned long mo = 0; mo < (1UL << no); ++mo) {
      g.a_out.clear();
      for (size_t b = 0; b < no; ++b)
        if (mo & (1UL << b)) g.a_out.push_back(cx.outgoing_agents[b]);
      for (unsigned long mi = 0; mi < (1UL << ni); ++mi) {
        g.a_in.clear();
        for (size_t b = 0; b < ni; ++b)
          if (mi & (1UL << b)) g.a_in.push_back(cx.incoming_agents[b]);
        run_domains();
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

Kernel Engine::public_kernel(Vertex v, const GenSnap& snap0) const {
  GenSnap snap = canon(snap0);
  if (!snap_valid(v, snap))
    throw ModelError("snapshot is not valid at this node");
  const NodeBase& nb = node_base(v);
  Kern k = make_kern(nb, snap);

  Kernel out;
  out.v = v;
  out.vertex_of_kv = nb.vertex_of_kv;
  out.kv_of_v = nb.kv_v;
  out.w_out_kv = nb.wout;
  out.w_in_kv = nb.win;
  out.instance.graph.vertex_count = (int)nb.vertex_of_kv.size();
  for (const KArc& a : k.arcs) {
    out.instance.graph.arcs.push_back({a.tail, a.head});
    switch (a.kind) {
      case KArc::Real:
        out.arc_kind.push_back(a.bd_v ? Kernel::ArcKind::Boundary
                                      : Kernel::ArcKind::Real);
        out.instance.latencies.push_back(*a.lat);
        break;
      case KArc::Marker:
        out.arc_kind.push_back(Kernel::ArcKind::Marker);
        out.instance.latencies.push_back(
            std::vector<Rat>(nb.artificial_cap, Rat(0)));
        break;
      case KArc::WOut:
        out.arc_kind.push_back(Kernel::ArcKind::WOut);
        out.instance.latencies.push_back(
            std::vector<Rat>(nb.artificial_cap, Rat(0)));
        break;
      case KArc::WIn:
        out.arc_kind.push_back(Kernel::ArcKind::WIn);
        out.instance.latencies.push_back(
            std::vector<Rat>(nb.artificial_cap, Rat(0)));
        break;
      case KArc::Shortcut:
        out.arc_kind.push_back(Kernel::ArcKind::Shortcut);
        out.instance.latencies.push_back({Rat(0)});
        break;
    }
    out.arc_of_karc.push_back(a.real);
    out.arc_charged.push_back(a.charged ? 1 : 0);
  }
  for (const Ent& e : base_entities(nb, k, snap))
    out.instance.agents.push_back({e.start, e.end});
  return out;
}

Realization Engine::reconstruct(Vertex v, const GenSnap& snap) {
  Config cfg;
  ChildLookup look = [this](Vertex w, const GenSnap& ps) {
    return record(w, ps);
  };
  Cost c = compute_record(v, canon(snap), look, true, &cfg);
  if (c.is_infinite())
    throw Error("witness reconstruction reached an infeasible record");
  const NodeBase& nb = node_base(v);
  int nc = (int)nb.cplx.size();

  std::vector<Realization> rc(nc);
  for (int s = 0; s < nc; ++s)
    rc[s] = reconstruct(nb.cplx[s], cfg.child_snaps[s]);
  std::vector<Realization> rs;
  for (size_t j = 0; j < nb.simp.size(); ++j)
    rs.push_back(reconstruct(nb.simp[j], cfg.simple_snaps[j]));

  std::vector<std::vector<char>> d_used(nc), c_used(nc);
  for (int s = 0; s < nc; ++s) {
    d_used[s].assign(cfg.child_snaps[s].d_pairs.size(), 0);
    c_used[s].assign(cfg.child_snaps[s].r_pairs.size(), 0);
  }

  auto consume_d = [&](int s, int e_real, int f_real) {
    const auto& dp = cfg.child_snaps[s].d_pairs;
    for (size_t i = 0; i < dp.size(); ++i) {
      if (d_used[s][i] || dp[i] != std::make_pair(e_real, f_real)) continue;
      d_used[s][i] = 1;
      const auto& full = rc[s].d_realizations[i];
      if (full.size() < 2 || full.front().real_arc != e_real ||
          full.back().real_arc != f_real)
        throw Error("dip realization does not match its instance");
      return std::vector<Token>(full.begin() + 1, full.end() - 1);
    }
    throw Error("no unconsumed dip instance for a crossing pair");
  };
  auto retag = [&](int s, const std::vector<Token>& in) {
    std::vector<Token> out;
    out.reserve(in.size());
    for (const Token& t : in) {
      if (t.own_r >= 0) {
        Token n;
        n.child_r = {s, t.own_r};
        out.push_back(n);
      } else if (t.child_r.first >= 0) {
        throw Error("unresolved reference escaped a child realization");
      } else {
        out.push_back(t);
      }
    }
    return out;
  };

  auto expand = [&](const Ent& e, const std::vector<int>& P) {
    std::vector<Token> out;
    size_t i = 0;
    for (int s = 0; s < nc; ++s) {
      if (e.start != nb.wout[s]) continue;
      // the agent starts inside this child: its partial path there ends with
      // the crossing arc, which the loop below emits itself
      auto part = retag(s, rc[s].agent_paths.at(e.agent));
      assert(!P.empty() && cfg.kern.arcs[P[0]].kind == KArc::WOut);
      assert(part.size() >= 1);
      out.insert(out.end(), part.begin(), part.end() - 1);
      i = 1;
      break;
    }
    for (; i < P.size(); ++i) {
      const KArc& a = cfg.kern.arcs[P[i]];
      switch (a.kind) {
        case KArc::Shortcut: {
          Token t;
          t.own_r = a.rinst;
          out.push_back(t);
        } break;
        case KArc::Marker: {
          int prev = cfg.kern.arcs[P[i - 1]].real;
          assert(i + 1 < P.size());
          int next = cfg.kern.arcs[P[i + 1]].real;
          auto interior = consume_d(a.child, prev, next);
          out.insert(out.end(), interior.begin(), interior.end());
        } break;
        case KArc::WIn: {
          // the agent ends inside this child: replace the crossing arc just
          // emitted with the child's whole incoming partial path
          auto part = retag(a.child, rc[a.child].agent_paths.at(e.agent));
          assert(!out.empty() && !part.empty());
          out.pop_back();
          out.insert(out.end(), part.begin(), part.end());
        } break;
        case KArc::WOut:
          assert(false && "out-vertex arc beyond the first position");
          break;
        case KArc::Real: {
          Token t;
          t.real_arc = a.real;
          out.push_back(t);
          if (a.into >= 0 && i + 1 < P.size()) {
            const KArc& b = cfg.kern.arcs[P[i + 1]];
            bool deferred = (b.kind == KArc::Marker && b.child == a.into) ||
                            (b.kind == KArc::WIn && b.child == a.into);
            if (!deferred) {
              // zero-hop dip: enters and leaves at the same inside vertex
              assert(b.kind == KArc::Real && b.out_of == a.into);
              auto interior = consume_d(a.into, a.real, b.real);
              if (!interior.empty())
                throw Error("zero-hop dip with a nonempty interior");
            }
          }
        } break;
      }
    }
    return out;
  };

  Realization out;
  std::vector<std::vector<std::vector<Token>>> conn_streams(nc);
  for (int s = 0; s < nc; ++s)
    conn_streams[s].assign(cfg.child_snaps[s].r_pairs.size(), {});
  out.d_realizations.assign(cfg.kern.dinsts.size(), {});

  for (size_t i = 0; i < cfg.ents.size(); ++i) {
    const Ent& e = cfg.ents[i];
    if (!cfg.paths[i]) {
      assert(e.droppable);
      out.unrouted.insert(e.agent);
      continue;
    }
    auto stream = expand(e, *cfg.paths[i]);
    switch (e.kind) {
      case Ent::Internal:
      case Ent::Outgoing:
      case Ent::Incoming:
        out.agent_paths[e.agent] = std::move(stream);
        break;
      case Ent::Marker:
        out.d_realizations[e.inst] = std::move(stream);
        break;
      case Ent::Connector:
        conn_streams[e.conn_child][e.inst] = std::move(stream);
        break;
    }
  }

  // simple subtrees: splice boundary agents' partial paths, import the rest
  for (size_t j = 0; j < nb.simp.size(); ++j) {
    int w = nb.simp[j];
    const NodeContext& cw = ctx_[w];
    for (int a : cw.outgoing_agents) {
      auto& part = rs[j].agent_paths.at(a);
      auto& mine = out.agent_paths.at(a);
      part.insert(part.end(), mine.begin(), mine.end());
      mine = std::move(part);
    }
    for (int a : cw.incoming_agents) {
      auto& part = rs[j].agent_paths.at(a);
      auto& mine = out.agent_paths.at(a);
      mine.insert(mine.end(), part.begin(), part.end());
    }
    for (auto& [a, stream] : rs[j].agent_paths) {
      const Agent& ag = inst_.agents[a];
      if (cw.in_subtree[ag.source] && cw.in_subtree[ag.target])
        out.agent_paths[a] = std::move(stream);
    }
    assert(rs[j].unrouted.empty());
  }
  // complex subtrees: import whole agents and unrouted marks
  for (int s = 0; s < nc; ++s) {
    const NodeContext& cw = ctx_[nb.cplx[s]];
    for (auto& [a, stream] : rc[s].agent_paths) {
      const Agent& ag = inst_.agents[a];
      if (cw.in_subtree[ag.source] && cw.in_subtree[ag.target])
        out.agent_paths[a] = retag(s, stream);
    }
    for (int a : rc[s].unrouted) out.unrouted.insert(a);
  }
  // substitute the children's excursion interiors for their references
  auto resolve = [&](std::vector<Token>& stream) {
    std::vector<Token> res;
    for (const Token& t : stream) {
      if (t.child_r.first < 0) {
        res.push_back(t);
        continue;
      }
      auto [s, i] = t.child_r;
      if (c_used[s][i]) throw Error("excursion interior consumed twice");
      c_used[s][i] = 1;
      const auto& conn = conn_streams[s][i];
      if (conn.size() < 2) throw Error("malformed excursion realization");
      res.insert(res.end(), conn.begin() + 1, conn.end() - 1);
    }
    stream = std::move(res);
  };
  for (auto& [a, stream] : out.agent_paths) resolve(stream);
  for (auto& stream : out.d_realizations)
    for (const Token& t : stream)
      if (t.child_r.first >= 0 || t.own_r >= 0)
        throw Error("dip realization carries an unresolved reference");

  for (int s = 0; s < nc; ++s) {
    for (char u : d_used[s])
      if (!u) throw Error("dip instance left unconsumed");
    for (char u : c_used[s])
      if (!u) throw Error("excursion instance left unconsumed");
  }
  return out;
}

SolveResult Engine::solve() {
  SolveResult res;
  res.cost = Cost::infinity();
  if (!precheck_ok()) {
    res.states_visited = states_;
    return res;
  }
  GenSnap g;
  g.a_out = ctx_[root_].outgoing_agents;
  g.a_in = ctx_[root_].incoming_agents;
  assert(g.a_out.empty() && g.a_in.empty());
  int best_alpha = 0;
  if (!minmax_) {
    res.cost = record(root_, g);
  } else {
    for (int al = 0; al <= alpha_; ++al) {
      g.alpha_local = al;
      Cost c = record(root_, g);
      if (c < res.cost) {
        res.cost = c;
        best_alpha = al;
      }
    }
    g.alpha_local = best_alpha;
  }
  if (!res.cost.is_infinite()) {
    Realization r = reconstruct(root_, g);
    FlowAssignment flow;
    flow.paths.assign(inst_.agents.size(), std::nullopt);
    for (size_t a = 0; a < inst_.agents.size(); ++a) {
      if (r.unrouted.count((int)a)) continue;
      auto it = r.agent_paths.find((int)a);
      if (it == r.agent_paths.end())
        throw Error("agent missing from the reconstructed assignment");
      Path p;
      for (const Token& t : it->second) {
        if (t.real_arc < 0)
          throw Error("unresolved reference in a root-level path");
        p.push_back(t.real_arc);
      }
      flow.paths[a] = std::move(p);
    }
    validate_flow(inst_, flow, minmax_);
    LoadReport lr = loads_and_cost(inst_, flow);
    if (!(lr.cost == res.cost))
      throw Error("reconstructed assignment does not reproduce the record");
    res.witness = std::move(flow);
  }
  res.states_visited = states_;
  return res;
}

}  // namespace soac::dp
