#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "soac/cli.hpp"
#include "soac/format.hpp"
#include "soac/generators.hpp"

using namespace soac;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args,
              const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

// Scratch directory for file-based subcommands; fresh per process.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("soac_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& content) {
    fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
  }
};

const char* kPlain =
    "soac 1\n"
    "vertices 3\n"
    "arc 0 1 lat 2\n"
    "arc 1 2 lat 1/3\n"
    "agent 0 2\n";

std::string complete_graph(int n) {
  std::ostringstream s;
  s << "soac 1\nvertices " << n << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s << "arc " << i << " " << j << " lat 1\n";
  return s.str();
}

}  // namespace

TEST_CASE("solvers print identical cost lines") {
  Scratch sc;
  std::string inst = serialize_instance(gen_random({6, 8, 3, 2, 3, 11}));
  std::string f = sc.file("r.soac", inst);
  RunResult o = run({"oracle", f});
  RunResult d = run({"dp", f});
  CHECK(o.code == 0);
  CHECK(d.code == 0);
  CHECK(first_line(o.out).substr(0, 5) == "cost:");
  CHECK(first_line(o.out) == first_line(d.out));

  // minmax with a zero budget is the plain solver.
  RunResult m = run({"minmax", f, "--alpha", "0"});
  CHECK(m.code == 0);
  CHECK(first_line(m.out) == first_line(d.out));
}

TEST_CASE("generated selection instance reproduces its optimum") {
  // Default family: items (1), (2), capacity 2, pick at least one; the free
  // tree carries the pick, the remaining item pays exactly 1.
  RunResult g = run({"gen", "muks-k2n"});
  REQUIRE(g.code == 0);
  RunResult o = run({"oracle", "-"}, g.out);
  CHECK(o.code == 0);
  CHECK(first_line(o.out) == "cost: 1");
}

TEST_CASE("generator output is canonical bytes") {
  RunResult g = run({"gen", "random", "--vertices", "6", "--arcs", "8",
                     "--agents", "2", "--seed", "5"});
  REQUIRE(g.code == 0);
  ParsedFile pf = parse_instance_text(g.out);
  CHECK(serialize_instance(pf.instance) == g.out);

  // Same seed, same bytes; different seed, different bytes.
  RunResult g2 = run({"gen", "random", "--vertices", "6", "--arcs", "8",
                      "--agents", "2", "--seed", "5"});
  CHECK(g2.out == g.out);
  RunResult g3 = run({"gen", "random", "--vertices", "6", "--arcs", "8",
                      "--agents", "2", "--seed", "6"});
  CHECK(g3.out != g.out);
}

TEST_CASE("decomposition output round-trips and stabilizes") {
  Scratch sc;
  std::string f = sc.file("p.soac", kPlain);
  RunResult d1 = run({"decompose", f});
  REQUIRE(d1.code == 0);
  CHECK(d1.err.find("width:") != std::string::npos);

  // The emitted file is canonical and already carries the layout.
  ParsedFile pf = parse_instance_text(d1.out);
  REQUIRE(pf.layout.has_value());
  CHECK(serialize_instance(pf.instance, &*pf.layout) == d1.out);

  // Decomposing the decomposition changes nothing.
  std::string f2 = sc.file("p2.soac", d1.out);
  RunResult d2 = run({"decompose", f2});
  CHECK(d2.code == 0);
  CHECK(d2.out == d1.out);

  // A solver run that takes its layout from a file.
  RunResult viafile = run({"dp", f, "--layout", f2});
  RunResult plain = run({"dp", f});
  CHECK(viafile.code == 0);
  CHECK(first_line(viafile.out) == first_line(plain.out));
  CHECK(first_line(plain.out) == "cost: 7/3");
}

TEST_CASE("decision thresholds map to exit codes") {
  Scratch sc;
  std::string yes = sc.file("y.soac", std::string(kPlain) + "lambda 3\n");
  std::string no = sc.file("n.soac", std::string(kPlain) + "lambda 2\n");
  RunResult ry = run({"dp", yes});
  CHECK(ry.code == 0);
  CHECK(ry.out.find("decision: yes\n") != std::string::npos);
  RunResult rn = run({"oracle", no});
  CHECK(rn.code == 1);  // 7/3 > 2
  CHECK(rn.out.find("decision: no\n") != std::string::npos);
}

TEST_CASE("usage and parse failures exit with 2") {
  Scratch sc;
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"oracle"}).code == 2);  // missing required file
  CHECK(run({"oracle", (sc.dir / "absent.soac").string()}).code == 2);
  CHECK(run({"minmax", "-", "--alpha", "-1"}, kPlain).code == 2);
  CHECK(run({"minmax", "-"}, kPlain).code == 2);  // stdin needs --alpha

  std::string bad = sc.file("bad.soac", "soac 1\nvertices 2\narc 0 0 lat 1\n");
  RunResult r = run({"dp", bad});
  CHECK(r.code == 2);
  CHECK(!r.err.empty());

  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("minmax takes alpha from the file when present") {
  Scratch sc;
  // Two demands on one unit arc; the file grants one drop.
  std::string f = sc.file("mm.soac",
                          "soac 1\n"
                          "vertices 2\n"
                          "arc 0 1 lat 3/2\n"
                          "agent 0 1\n"
                          "agent 0 1\n"
                          "alpha 1\n");
  RunResult r = run({"minmax", f});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "cost: 3/2");
  RunResult ro = run({"minmax", f, "--oracle"});
  CHECK(ro.code == 0);
  CHECK(first_line(ro.out) == "cost: 3/2");
  // Overriding the file's alpha wins.
  RunResult r0 = run({"minmax", f, "--alpha", "0"});
  CHECK(first_line(r0.out) == "cost: infeasible");
}

TEST_CASE("disconnected inputs solve per component") {
  Scratch sc;
  std::string f = sc.file("2c.soac",
                          "soac 1\n"
                          "vertices 4\n"
                          "arc 0 1 lat 2\n"
                          "arc 2 3 lat 5\n"
                          "agent 0 1\n"
                          "agent 2 3\n");
  RunResult r = run({"dp", f});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "cost: 7");
  CHECK(r.out.find("components: 2\n") != std::string::npos);

  std::string x = sc.file("x.soac",
                          "soac 1\n"
                          "vertices 4\n"
                          "arc 0 1 lat 2\n"
                          "arc 2 3 lat 5\n"
                          "agent 0 3\n");
  RunResult rx = run({"dp", x});
  CHECK(first_line(rx.out) == "cost: infeasible");
}

TEST_CASE("unmet width budgets are reported on exit 1") {
  Scratch sc;
  std::string k4 = sc.file("k4.soac", complete_graph(4));
  RunResult r = run({"decompose", k4, "--budget", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("no layout within budget 3 (best 4)") != std::string::npos);
  CHECK(run({"decompose", k4, "--budget", "4"}).code == 0);
}

TEST_CASE("exhaustive layout search refuses oversized inputs") {
  Scratch sc;
  // K8 has 8^6 spanning trees, past the enumeration cap.
  std::string k8 = sc.file("k8.soac", complete_graph(8));
  RunResult r = run({"decompose", k8, "--exact"});
  CHECK(r.code == 3);
  CHECK(r.err.find("resource budget exceeded") != std::string::npos);
}

TEST_CASE("benchmark harness compares the two solvers") {
  Scratch sc;
  sc.file("a.soac", serialize_instance(gen_random({5, 7, 2, 2, 3, 21})));
  sc.file("b.soac", serialize_instance(gen_random({6, 8, 3, 1, 4, 22})));
  // One min-max entry via its alpha line.
  sc.file("c.soac",
          "soac 1\n"
          "vertices 2\n"
          "arc 0 1 lat 1\n"
          "agent 0 1\n"
          "agent 0 1\n"
          "alpha 1\n");
  sc.file("notes.txt", "ignored: wrong extension\n");

  RunResult ok = run({"bench", sc.dir.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("bench: 3 instances agree\n") != std::string::npos);

  // A corrupted record must trip the comparison, not pass silently.
  RunResult bad = run({"bench", sc.dir.string(), "--inject-fault"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("disagreement") != std::string::npos);

  fs::path empty = sc.dir / "empty";
  fs::create_directories(empty);
  RunResult none = run({"bench", empty.string()});
  CHECK(none.code == 0);
  CHECK(none.out.find("no .soac instances") != std::string::npos);
}
