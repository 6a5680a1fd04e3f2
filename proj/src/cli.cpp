#include "soac/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "soac/dp_minmax.hpp"
#include "soac/dp_soac.hpp"
#include "soac/format.hpp"
#include "soac/generators.hpp"
#include "soac/model.hpp"
#include "soac/oracle.hpp"
#include "soac/solve.hpp"

namespace soac {

namespace {

std::string slurp(const std::string& path, std::istream& in) {
  if (path == "-")
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

ParsedFile load(const std::string& path, std::istream& in) {
  return parse_instance_text(slurp(path, in));
}

long long ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void print_witness(std::ostream& out, const SolveResult& r) {
  if (!r.witness) return;
  for (size_t i = 0; i < r.witness->paths.size(); ++i) {
    out << "agent " << i << ":";
    const auto& p = r.witness->paths[i];
    if (!p) {
      out << " unrouted";
    } else if (p->empty()) {
      out << " -";
    } else {
      for (int a : *p) out << ' ' << a;
    }
    out << "\n";
  }
}

int decide(std::ostream& out, const Instance& inst, const Cost& c) {
  if (!inst.lambda) return 0;
  bool yes = !c.is_infinite() && c.value() <= *inst.lambda;
  out << "decision: " << (yes ? "yes" : "no") << "\n";
  return yes ? 0 : 1;
}

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError("empty integer list");
  return out;
}

int cmd_oracle(const std::string& file, std::istream& in, std::ostream& out) {
  ParsedFile pf = load(file, in);
  validate_instance(pf.instance);
  int alpha = pf.instance.alpha.value_or(0);
  auto t0 = std::chrono::steady_clock::now();
  SolveResult r = alpha > 0 ? solve_minmax_oracle(pf.instance, alpha)
                            : solve_soac_oracle(pf.instance);
  long long ms = ms_since(t0);
  out << "cost: " << cost_to_string(r.cost) << "\n";
  print_witness(out, r);
  out << "states: " << r.states_visited << "\n";
  out << "time_ms: " << ms << "\n";
  return decide(out, pf.instance, r.cost);
}

int cmd_dp(const std::string& file, const std::string& layout_file,
           std::optional<int> alpha_override, bool force_oracle,
           std::istream& in, std::ostream& out) {
  ParsedFile pf = load(file, in);
  validate_instance(pf.instance);
  int alpha = alpha_override ? *alpha_override : pf.instance.alpha.value_or(0);
  if (force_oracle) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult r = solve_minmax_oracle(pf.instance, alpha);
    long long ms = ms_since(t0);
    out << "cost: " << cost_to_string(r.cost) << "\n";
    print_witness(out, r);
    out << "states: " << r.states_visited << "\n";
    out << "time_ms: " << ms << "\n";
    return decide(out, pf.instance, r.cost);
  }
  SolveOptions so;
  if (!layout_file.empty()) {
    ParsedFile lf = load(layout_file, in);
    if (!lf.layout) throw ParseError("file " + layout_file + " has no layout");
    so.layout = lf.layout;
  } else if (pf.layout) {
    so.layout = pf.layout;
  }
  if (alpha > 0 || alpha_override) so.alpha = alpha;
  auto t0 = std::chrono::steady_clock::now();
  SolveReport rep = solve_instance(pf.instance, so);
  long long ms = ms_since(t0);
  out << "cost: " << cost_to_string(rep.result.cost) << "\n";
  print_witness(out, rep.result);
  out << "width: " << rep.width << "\n";
  out << "components: " << rep.components << "\n";
  out << "states: " << rep.result.states_visited << "\n";
  out << "time_ms: " << ms << "\n";
  return decide(out, pf.instance, rep.result.cost);
}

int cmd_decompose(const std::string& file, std::optional<int> budget,
                  bool exact, std::istream& in, std::ostream& out,
                  std::ostream& err) {
  ParsedFile pf = load(file, in);
  validate_instance(pf.instance);
  FindLayoutOptions o;
  if (exact) o.mode = LayoutMode::Exhaustive;
  FindLayoutResult r = find_layout(pf.instance, budget, o);
  out << serialize_instance(pf.instance, &r.layout);
  err << "width: " << r.width << "\n";
  err << "search: " << (r.exhaustive ? "exhaustive" : "heuristic") << "\n";
  if (budget && !r.within_budget) {
    err << "no layout within budget " << *budget << " (best " << r.width
        << ")\n";
    return 1;
  }
  return 0;
}

int cmd_gen_out(const Instance& inst, std::ostream& out) {
  out << serialize_instance(inst);
  return 0;
}

int cmd_bench(const std::string& dir, bool inject_fault, std::ostream& out,
              std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".soac")
      files.push_back(de.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    out << "bench: no .soac instances in " << dir << "\n";
    return 0;
  }
  bool first = true;
  for (const auto& f : files) {
    std::ifstream fin(f, std::ios::binary);
    ParsedFile pf = parse_instance_text(std::string(
        std::istreambuf_iterator<char>(fin), std::istreambuf_iterator<char>()));
    validate_instance(pf.instance);
    int alpha = pf.instance.alpha.value_or(0);

    auto t0 = std::chrono::steady_clock::now();
    SolveResult ro = alpha > 0 ? solve_minmax_oracle(pf.instance, alpha)
                               : solve_soac_oracle(pf.instance);
    long long oracle_ms = ms_since(t0);

    SolveOptions so;
    so.layout = pf.layout;
    if (alpha > 0) so.alpha = alpha;
    auto t1 = std::chrono::steady_clock::now();
    SolveReport rd = solve_instance(pf.instance, so);
    long long dp_ms = ms_since(t1);

    Cost dp_cost = rd.result.cost;
    if (inject_fault && first)
      dp_cost = dp_cost.is_infinite() ? Cost(0) : dp_cost + Cost(1);
    first = false;
    if (!(dp_cost == ro.cost)) {
      err << "disagreement on " << f.filename().string()
          << ": oracle " << cost_to_string(ro.cost) << ", tree solver "
          << cost_to_string(dp_cost) << "\n";
      return 1;
    }
    out << f.filename().string() << " cost: " << cost_to_string(ro.cost)
        << " oracle_ms: " << oracle_ms << " dp_ms: " << dp_ms << "\n";
  }
  out << "bench: " << files.size() << " instances agree\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err) {
  CLI::App app{"exact solvers for atomic congestion routing"};
  app.require_subcommand(1);

  std::string file, layout_file, bench_dir;
  int alpha = 0, budget_k = 0;
  bool exact = false, use_oracle = false, use_dp = false, inject = false;

  auto* sc_oracle =
      app.add_subcommand("oracle", "exhaustive reference solver");
  sc_oracle->add_option("file", file, "instance file ('-' = stdin)")
      ->required();

  auto* sc_dp = app.add_subcommand("dp", "width-parameterized solver");
  sc_dp->add_option("file", file, "instance file ('-' = stdin)")->required();
  sc_dp->add_option("--layout", layout_file,
                    "take the layout from this file instead");

  auto* sc_mm =
      app.add_subcommand("minmax", "solver with an unrouted-agent budget");
  sc_mm->add_option("file", file, "instance file ('-' = stdin)")->required();
  auto* mm_alpha =
      sc_mm->add_option("--alpha", alpha, "unrouted budget (>= 0)");
  auto* mm_oracle =
      sc_mm->add_flag("--oracle", use_oracle, "use the exhaustive solver");
  sc_mm->add_flag("--dp", use_dp, "use the tree solver (default)")
      ->excludes(mm_oracle);
  sc_mm->add_option("--layout", layout_file,
                    "take the layout from this file instead");

  auto* sc_dec = app.add_subcommand("decompose", "search a tree layout");
  sc_dec->add_option("file", file, "instance file ('-' = stdin)")->required();
  auto* dec_budget =
      sc_dec->add_option("--budget", budget_k, "required maximum width");
  sc_dec->add_flag("--exact", exact, "force exhaustive spanning-tree search");

  auto* sc_gen = app.add_subcommand("gen", "emit a generated instance");
  sc_gen->require_subcommand(1);
  std::vector<std::string> vecs{"1", "2"};
  std::string target = "2";
  int muks_k = 1;
  auto add_muks_opts = [&](CLI::App* s) {
    s->add_option("--vec", vecs, "item vector, comma-separated entries");
    s->add_option("--target", target, "capacity vector");
    s->add_option("--k", muks_k, "minimum number of selected items");
  };
  auto* g_k2n = sc_gen->add_subcommand("muks-k2n", "hub-pair selection family");
  add_muks_opts(g_k2n);
  auto* g_pl =
      sc_gen->add_subcommand("muks-planar", "planar DAG selection family");
  add_muks_opts(g_pl);
  auto* g_edp =
      sc_gen->add_subcommand("edp", "edge-disjoint-paths gadget family");
  int edp_right = 1;
  std::vector<std::string> edp_pairs{"0,1"};
  g_edp->add_option("--right", edp_right, "right-side vertex count");
  g_edp->add_option("--pair", edp_pairs, "terminal pair 'u,v'");
  auto* g_sat = sc_gen->add_subcommand("sat13", "one-in-three gate family");
  int sat_vars = 3;
  std::vector<std::string> sat_clauses{"0,1,2", "0,1,2", "0,1,2"};
  g_sat->add_option("--vars", sat_vars, "variable count");
  g_sat->add_option("--clause", sat_clauses, "clause 'a,b,c'");
  auto* g_rand = sc_gen->add_subcommand("random", "seeded random instance");
  RandomSpec rs;
  g_rand->add_option("--vertices", rs.vertex_count, "vertex count");
  g_rand->add_option("--arcs", rs.arc_count, "arc count");
  g_rand->add_option("--agents", rs.agent_count, "agent count");
  g_rand->add_option("--max-cap", rs.max_cap, "largest capacity");
  g_rand->add_option("--lat-range", rs.latency_range, "latency value range");
  g_rand->add_option("--seed", rs.seed, "random seed");

  auto* sc_bench =
      app.add_subcommand("bench", "compare oracle and tree solver on a directory");
  sc_bench->add_option("dir", bench_dir, "directory of .soac files")
      ->required();
  sc_bench->add_flag("--inject-fault", inject)->group("");

  std::vector<std::string> argv_s;
  argv_s.push_back("soac");
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_s.size());
  for (const auto& s : argv_s) argv.push_back(s.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    int ec = app.exit(e, out, err);
    return ec == 0 ? 0 : 2;
  }

  try {
    if (sc_oracle->parsed()) return cmd_oracle(file, in, out);
    if (sc_dp->parsed())
      return cmd_dp(file, layout_file, std::nullopt, false, in, out);
    if (sc_mm->parsed()) {
      std::optional<int> a;
      if (*mm_alpha) a = alpha;
      if (!a) {
        if (file == "-") {
          err << "minmax on stdin requires --alpha\n";
          return 2;
        }
        // fall back to the file's own alpha; re-parsed inside cmd_dp
        ParsedFile pf = load(file, in);
        if (!pf.instance.alpha) {
          err << "minmax needs --alpha or an alpha line in the file\n";
          return 2;
        }
        a = *pf.instance.alpha;
      }
      if (*a < 0) {
        err << "--alpha must be >= 0\n";
        return 2;
      }
      return cmd_dp(file, layout_file, a, use_oracle && !use_dp, in, out);
    }
    if (sc_dec->parsed()) {
      std::optional<int> b;
      if (*dec_budget) b = budget_k;
      return cmd_decompose(file, b, exact, in, out, err);
    }
    if (g_k2n->parsed() || g_pl->parsed()) {
      MuksInstance m;
      for (const auto& v : vecs) m.vectors.push_back(parse_longs(v));
      m.target = parse_longs(target);
      m.k = muks_k;
      validate_muks(m);
      return cmd_gen_out(
          g_k2n->parsed() ? gen_muks_k2n(m) : gen_muks_planar_dag(m), out);
    }
    if (g_edp->parsed()) {
      EdpInstance e;
      e.right = edp_right;
      for (const auto& p : edp_pairs) {
        auto xs = parse_longs(p);
        if (xs.size() != 2) throw ParseError("pair needs two vertex ids");
        e.pairs.push_back({(int)xs[0], (int)xs[1]});
      }
      validate_edp(e);
      return cmd_gen_out(gen_edp_gadget(e), out);
    }
    if (g_sat->parsed()) {
      CnfFormula f;
      f.variable_count = sat_vars;
      for (const auto& c : sat_clauses) {
        auto xs = parse_longs(c);
        if (xs.size() != 3) throw ParseError("clause needs three variables");
        f.clauses.push_back({(int)xs[0], (int)xs[1], (int)xs[2]});
      }
      validate_one_in_three(f);
      return cmd_gen_out(gen_one_in_three(f), out);
    }
    if (g_rand->parsed()) return cmd_gen_out(gen_random(rs), out);
    if (sc_bench->parsed()) return cmd_bench(bench_dir, inject, out, err);
  } catch (const ResourceError& e) {
    err << "resource budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand selected\n";
  return 2;
}

}  // namespace soac
