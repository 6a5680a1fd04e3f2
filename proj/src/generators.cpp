#include "soac/generators.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <random>

namespace soac {
namespace {

std::vector<Rat> zeros(long count) {
  if (count < 0) count = 0;
  return std::vector<Rat>(static_cast<size_t>(count), Rat(0));
}

// 1/1, 1/2, ..., 1/count: routing x agents over this arc costs exactly 1.
std::vector<Rat> harmonic(long count) {
  std::vector<Rat> t;
  t.reserve(static_cast<size_t>(std::max(0L, count)));
  for (long x = 1; x <= count; ++x) t.push_back(Rat(1, x));
  return t;
}

void push_arc(Instance& inst, int tail, int head, std::vector<Rat> lat) {
  inst.graph.arcs.push_back({tail, head});
  inst.latencies.push_back(std::move(lat));
}

}  // namespace

void validate_muks(const MuksInstance& muks) {
  const size_t d = muks.target.size();
  if (d == 0) throw ModelError("muks needs dimension >= 1");
  if (muks.vectors.empty()) throw ModelError("muks needs at least one vector");
  // k beyond n is well-formed, just unsatisfiable.
  if (muks.k < 0) throw ModelError("muks k must be >= 0");
  for (long t : muks.target)
    if (t < 0) throw ModelError("muks target entries must be >= 0");
  for (const auto& v : muks.vectors) {
    if (v.size() != d) throw ModelError("muks vector dimension mismatch");
    for (long x : v)
      if (x < 0) throw ModelError("muks vector entries must be >= 0");
  }
}

bool decide_muks(const MuksInstance& muks) {
  validate_muks(muks);
  const int n = static_cast<int>(muks.vectors.size());
  if (n > 25) throw ResourceError("decide_muks limited to 25 vectors");
  const size_t d = muks.target.size();
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    if (static_cast<int>(__builtin_popcountl(mask)) < muks.k) continue;
    bool fits = true;
    for (size_t j = 0; j < d && fits; ++j) {
      long sum = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1UL << i)) sum += muks.vectors[i][j];
      fits = sum <= muks.target[j];
    }
    if (fits) return true;
  }
  return false;
}

Instance gen_muks_k2n(const MuksInstance& muks) {
  validate_muks(muks);
  const int n = static_cast<int>(muks.vectors.size());
  const int d = static_cast<int>(muks.target.size());
  std::vector<long> row(n, 0), col(d, 0);
  long total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      row[i] += muks.vectors[i][j];
      col[j] += muks.vectors[i][j];
      total += muks.vectors[i][j];
    }

  Instance inst;
  const int hub0 = n, hub1 = n + 1;
  auto tgt = [&](int j) { return n + 2 + j; };
  inst.graph.vertex_count = n + 2 + d;
  for (int i = 0; i < n; ++i) {
    push_arc(inst, i, hub0, zeros(row[i]));
    push_arc(inst, i, hub1, harmonic(row[i]));
  }
  for (int j = 0; j < d; ++j) {
    push_arc(inst, hub0, tgt(j), zeros(std::min(muks.target[j], total)));
    push_arc(inst, hub1, tgt(j), zeros(col[j]));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      for (long c = 0; c < muks.vectors[i][j]; ++c)
        inst.agents.push_back({i, tgt(j)});
  return inst;
}

namespace {

// Arcs from `root` down to the given leaves forming an almost-complete
// binary tree: all levels full except the last, which fills left to right.
void build_out_tree(Instance& inst, int root, const std::vector<int>& leaves,
                    long cap, int& fresh,
                    const std::vector<long>* leaf_caps = nullptr) {
  auto leaf_arc = [&](int from, size_t leaf_idx) {
    long c = leaf_caps ? (*leaf_caps)[leaf_idx] : cap;
    push_arc(inst, from, leaves[leaf_idx], zeros(c));
  };
  // Recurse over index ranges [lo, hi).
  std::function<void(int, size_t, size_t)> rec = [&](int node, size_t lo, size_t hi) {
    const size_t len = hi - lo;
    size_t left;
    if (len == 2) {
      left = 1;
    } else {
      size_t full = 1;
      while (full < len) full <<= 1;  // 2^h >= len
      full >>= 1;                     // 2^(h-1)
      const size_t ell = len - full;
      left = full / 2 + std::min(ell, full / 2);
    }
    for (int side = 0; side < 2; ++side) {
      const size_t a = side == 0 ? lo : lo + left;
      const size_t b = side == 0 ? lo + left : hi;
      if (b - a == 1) {
        leaf_arc(node, a);
      } else {
        const int u = fresh++;
        push_arc(inst, node, u, zeros(cap));
        rec(u, a, b);
      }
    }
  };
  if (leaves.size() == 1) {
    leaf_arc(root, 0);
    return;
  }
  rec(root, 0, leaves.size());
}

}  // namespace

Instance gen_muks_planar_dag(const MuksInstance& muks) {
  validate_muks(muks);
  const int n = static_cast<int>(muks.vectors.size());
  const int d = static_cast<int>(muks.target.size());
  std::vector<long> row(n, 0);
  long total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      row[i] += muks.vectors[i][j];
      total += muks.vectors[i][j];
    }
  const long cap = std::max(total, 1L);

  Instance inst;
  auto src = [&](int i) { return i; };                    // i in [0, n)
  auto chain = [&](int i) { return n + i; };              // h_1.. = chain(0)..chain(n)
  auto chain2 = [&](int i) { return 2 * n + 1 + i; };     // h'_1.. likewise
  const int tgt0 = 3 * n + 2;
  auto tgt = [&](int j) { return tgt0 + j; };
  int fresh = tgt0 + d;

  inst.graph.vertex_count = fresh;  // grown below as tree internals appear
  for (int i = 0; i < n; ++i) {
    push_arc(inst, chain(i), chain(i + 1), zeros(cap));
    push_arc(inst, chain2(i), chain2(i + 1), zeros(cap));
    push_arc(inst, src(i), chain(i), zeros(row[i]));
    push_arc(inst, src(i), chain2(i), harmonic(row[i]));
  }
  std::vector<int> leaves(d);
  for (int j = 0; j < d; ++j) leaves[j] = tgt(j);
  std::vector<long> leaf_caps(d);
  for (int j = 0; j < d; ++j) leaf_caps[j] = std::min(muks.target[j], total);
  // The capacitated arcs sit where the free side's tree meets the targets;
  // the mirrored tree reuses the identical leaf order.
  build_out_tree(inst, chain(n), leaves, cap, fresh, &leaf_caps);
  build_out_tree(inst, chain2(n), leaves, cap, fresh);
  inst.graph.vertex_count = fresh;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      for (long c = 0; c < muks.vectors[i][j]; ++c)
        inst.agents.push_back({src(i), tgt(j)});
  return inst;
}

void validate_edp(const EdpInstance& edp) {
  if (edp.right < 1) throw ModelError("edp needs at least one right vertex");
  const int n = 3 + edp.right;
  for (auto [a, b] : edp.pairs) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ModelError("edp terminal out of range");
    if (a == b) throw ModelError("edp terminal pair is degenerate");
  }
}

bool decide_edp(const EdpInstance& edp) {
  validate_edp(edp);
  const int n = 3 + edp.right;
  // Base edges of the complete bipartite graph, indexed for the used-set.
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < 3; ++u)
    for (int v = 3; v < n; ++v) edges.push_back({u, v});
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge id)
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].first].push_back({edges[e].second, static_cast<int>(e)});
    adj[edges[e].second].push_back({edges[e].first, static_cast<int>(e)});
  }
  std::vector<char> edge_used(edges.size(), 0);
  std::vector<char> on_path(n, 0);

  std::function<bool(size_t)> route = [&](size_t pi) {
    if (pi == edp.pairs.size()) return true;
    const auto [s, t] = edp.pairs[pi];
    std::function<bool(int)> walk = [&](int v) {
      if (v == t) return route(pi + 1);
      on_path[v] = 1;
      for (auto [w, e] : adj[v]) {
        if (edge_used[e] || on_path[w]) continue;
        edge_used[e] = 1;
        if (walk(w)) {
          edge_used[e] = 0;
          on_path[v] = 0;
          return true;
        }
        edge_used[e] = 0;
      }
      on_path[v] = 0;
      return false;
    };
    return walk(s);
  };
  return route(0);
}

Instance gen_edp_gadget(const EdpInstance& edp) {
  validate_edp(edp);
  const int base = 3 + edp.right;
  Instance inst;
  int fresh = base;
  auto unit = [&](int tail, int head) { push_arc(inst, tail, head, {Rat(0)}); };
  for (int u = 0; u < 3; ++u)
    for (int v = 3; v < base; ++v) {
      const int up = fresh++, b = fresh++, c = fresh++, vp = fresh++;
      unit(u, up);
      unit(up, u);
      unit(v, vp);
      unit(vp, v);
      unit(up, b);
      unit(vp, b);
      unit(b, c);
      unit(c, up);
      unit(c, vp);
    }
  inst.graph.vertex_count = fresh;
  for (auto [s, t] : edp.pairs) inst.agents.push_back({s, t});
  return inst;
}

void validate_one_in_three(const CnfFormula& f) {
  const int n = f.variable_count;
  if (n < 1) throw ModelError("formula needs at least one variable");
  std::vector<int> occur(n, 0);
  for (const auto& cl : f.clauses) {
    for (int v : cl) {
      if (v < 0 || v >= n) throw ModelError("clause variable out of range");
      ++occur[v];
    }
    if (cl[0] == cl[1] || cl[0] == cl[2] || cl[1] == cl[2])
      throw ModelError("clause variables must be distinct");
  }
  for (int v = 0; v < n; ++v)
    if (occur[v] != 3)
      throw ModelError("variable " + std::to_string(v) +
                       " must occur in exactly three clauses");
}

bool decide_one_in_three(const CnfFormula& f) {
  validate_one_in_three(f);
  const int n = f.variable_count;
  if (n > 25) throw ResourceError("decide_one_in_three limited to 25 variables");
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    bool good = true;
    for (const auto& cl : f.clauses) {
      int trues = 0;
      for (int v : cl) trues += (mask >> v) & 1;
      if (trues != 1) {
        good = false;
        break;
      }
    }
    if (good) return true;
  }
  return false;
}

Instance gen_one_in_three(const CnfFormula& f) {
  validate_one_in_three(f);
  const int n = f.variable_count;
  const int m = static_cast<int>(f.clauses.size());
  Instance inst;
  auto xv = [&](int i) { return i; };
  auto xt = [&](int i) { return n + i; };
  auto xf = [&](int i) { return 2 * n + i; };
  auto ct = [&](int j) { return 3 * n + j; };
  auto cf = [&](int j) { return 3 * n + m + j; };
  auto cl = [&](int j) { return 3 * n + 2 * m + j; };
  inst.graph.vertex_count = 3 * n + 3 * m;

  // Choosing a polarity costs 1 per agent unless all three of a variable's
  // agents agree: 1*1 = 1, 2*1 = 2, 3*0 = 0.
  const std::vector<Rat> split_penalty = {Rat(1), Rat(1), Rat(0)};
  for (int i = 0; i < n; ++i) {
    push_arc(inst, xv(i), xt(i), split_penalty);
    push_arc(inst, xv(i), xf(i), split_penalty);
  }
  for (int j = 0; j < m; ++j)
    for (int v : f.clauses[j]) {
      push_arc(inst, xt(v), ct(j), zeros(1));
      push_arc(inst, xf(v), cf(j), zeros(1));
    }
  for (int j = 0; j < m; ++j) {
    push_arc(inst, ct(j), cl(j), zeros(1));  // exactly one literal true
    push_arc(inst, cf(j), cl(j), zeros(2));  // the other two false
  }
  for (int j = 0; j < m; ++j)
    for (int v : f.clauses[j]) inst.agents.push_back({xv(v), cl(j)});
  return inst;
}

Instance gen_random(const RandomSpec& spec) {
  if (spec.vertex_count < 1) throw ModelError("random: vertex_count >= 1");
  if (spec.vertex_count > 1 && spec.arc_count < spec.vertex_count - 1)
    throw ModelError("random: arc_count too small to connect the skeleton");
  if (spec.vertex_count == 1 && spec.arc_count != 0)
    throw ModelError("random: a single vertex admits no arcs");
  if (spec.agent_count < 0 || spec.max_cap < 1 || spec.latency_range < 1)
    throw ModelError("random: bad parameters");
  if (spec.agent_count > 0 && spec.vertex_count < 2)
    throw ModelError("random: agents need two distinct vertices");

  std::mt19937_64 rng(spec.seed);
  // Implementation-independent draw so a seed pins the instance bytes.
  auto draw = [&](long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
  };

  Instance inst;
  const int n = spec.vertex_count;
  inst.graph.vertex_count = n;
  std::vector<std::vector<int>> pair_count(n, std::vector<int>(n, 0));
  auto add_random_arc = [&](int a, int b) {
    if (draw(0, 1)) std::swap(a, b);
    push_arc(inst, a, b, {});
    ++pair_count[std::min(a, b)][std::max(a, b)];
  };
  // Random spanning connection first, then filler arcs with at most two arcs
  // per unordered pair (keeps every cut's arc count within the width bound).
  for (int v = 1; v < n; ++v) add_random_arc(static_cast<int>(draw(0, v - 1)), v);
  int want = spec.arc_count - (n - 1);
  for (int tries = 0; want > 0 && tries < 250; ++tries) {
    int a = static_cast<int>(draw(0, n - 1));
    int b = static_cast<int>(draw(0, n - 1));
    if (a == b || pair_count[std::min(a, b)][std::max(a, b)] >= 2) continue;
    add_random_arc(a, b);
    --want;
  }
  for (auto& lat : inst.latencies) {
    const long cap = draw(1, spec.max_cap);
    for (long x = 0; x < cap; ++x) {
      const long num = draw(0, spec.latency_range);
      const long den = draw(1, spec.latency_range);
      Rat r(num, den);
      r.canonicalize();
      lat.push_back(r);
    }
  }
  for (int i = 0; i < spec.agent_count; ++i) {
    int s = static_cast<int>(draw(0, n - 1));
    int t = static_cast<int>(draw(0, n - 1));
    while (t == s) t = static_cast<int>(draw(0, n - 1));
    inst.agents.push_back({s, t});
  }
  return inst;
}

}  // namespace soac
