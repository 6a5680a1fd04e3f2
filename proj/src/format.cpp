#include "soac/format.hpp"

#include <algorithm>
#include <sstream>

namespace soac {
namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

int parse_int(const std::string& tok, int line_no) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (...) {
    throw ParseError(line_no, "expected an integer, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(line_no, "expected an integer, got '" + tok + "'");
  return v;
}

}  // namespace

ParsedFile parse_instance_text(const std::string& text) {
  ParsedFile out;
  Instance& inst = out.instance;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false, saw_vertices = false;
  std::optional<std::vector<int>> tree_line;
  std::optional<int> root_line;
  std::vector<EdgeUV> extras;
  int n = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> t = tokenize(line);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t.size() != 2 || t[0] != "soac" || t[1] != "1")
        throw ParseError(line_no, "expected header 'soac 1'");
      saw_header = true;
      continue;
    }
    const std::string& kw = t[0];
    auto need_vertices = [&]() {
      if (!saw_vertices)
        throw ParseError(line_no, "'" + kw + "' before 'vertices'");
    };
    if (kw == "vertices") {
      if (saw_vertices) throw ParseError(line_no, "duplicate 'vertices'");
      if (t.size() != 2) throw ParseError(line_no, "usage: vertices N");
      n = parse_int(t[1], line_no);
      if (n < 1) throw ParseError(line_no, "vertex count must be >= 1");
      inst.graph.vertex_count = n;
      saw_vertices = true;
    } else if (kw == "arc") {
      need_vertices();
      if (t.size() < 4 || t[3] != "lat")
        throw ParseError(line_no, "usage: arc TAIL HEAD lat R1 ... Rc");
      Arc a{parse_int(t[1], line_no), parse_int(t[2], line_no)};
      if (a.tail < 0 || a.tail >= n || a.head < 0 || a.head >= n)
        throw ParseError(line_no, "arc endpoint out of range");
      if (a.tail == a.head) throw ParseError(line_no, "self-loop arc");
      std::vector<Rat> lat;
      for (size_t i = 4; i < t.size(); ++i) {
        try {
          lat.push_back(rat_from_string(t[i]));
        } catch (const ParseError& e) {
          throw ParseError(line_no, e.what());
        }
      }
      inst.graph.arcs.push_back(a);
      inst.latencies.push_back(std::move(lat));
    } else if (kw == "agent") {
      need_vertices();
      if (t.size() != 3) throw ParseError(line_no, "usage: agent S T");
      Agent ag{parse_int(t[1], line_no), parse_int(t[2], line_no)};
      if (ag.source < 0 || ag.source >= n || ag.target < 0 || ag.target >= n)
        throw ParseError(line_no, "agent endpoint out of range");
      inst.agents.push_back(ag);
    } else if (kw == "lambda") {
      if (inst.lambda) throw ParseError(line_no, "duplicate 'lambda'");
      if (t.size() != 2) throw ParseError(line_no, "usage: lambda R");
      try {
        inst.lambda = rat_from_string(t[1]);
      } catch (const ParseError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (kw == "alpha") {
      if (inst.alpha) throw ParseError(line_no, "duplicate 'alpha'");
      if (t.size() != 2) throw ParseError(line_no, "usage: alpha N");
      int a = parse_int(t[1], line_no);
      if (a < 0) throw ParseError(line_no, "alpha must be >= 0");
      inst.alpha = a;
    } else if (kw == "tree") {
      need_vertices();
      if (tree_line) throw ParseError(line_no, "duplicate 'tree'");
      if (static_cast<int>(t.size()) != n + 1)
        throw ParseError(line_no, "tree needs one parent per vertex");
      std::vector<int> par(n);
      for (int v = 0; v < n; ++v) par[v] = parse_int(t[v + 1], line_no);
      tree_line = std::move(par);
    } else if (kw == "extra") {
      need_vertices();
      if (t.size() != 3) throw ParseError(line_no, "usage: extra U V");
      int u = parse_int(t[1], line_no), v = parse_int(t[2], line_no);
      if (u < 0 || u >= n || v < 0 || v >= n || u == v)
        throw ParseError(line_no, "extra edge malformed");
      extras.push_back(make_edge(u, v));
    } else if (kw == "root") {
      need_vertices();
      if (root_line) throw ParseError(line_no, "duplicate 'root'");
      if (t.size() != 2) throw ParseError(line_no, "usage: root R");
      root_line = parse_int(t[1], line_no);
    } else {
      throw ParseError(line_no, "unknown directive '" + kw + "'");
    }
  }
  if (!saw_header) throw ParseError("empty input: missing 'soac 1' header");
  if (!saw_vertices) throw ParseError("missing 'vertices'");

  if (tree_line || root_line || !extras.empty()) {
    if (!tree_line) throw ParseError("layout has no 'tree' line");
    if (!root_line) throw ParseError("layout has no 'root' line");
    SpanningTreeLayout lay;
    lay.vertex_count = n;
    lay.parent = *tree_line;
    lay.root = *root_line;
    int roots = 0;
    for (int v = 0; v < n; ++v) {
      if (lay.parent[v] == -1) {
        ++roots;
        if (v != lay.root) throw ParseError("tree root marker does not match 'root'");
        lay.parent[v] = v;
      } else if (lay.parent[v] < 0 || lay.parent[v] >= n) {
        throw ParseError("tree parent out of range");
      }
    }
    if (roots != 1) throw ParseError("tree must mark exactly one root with -1");
    lay.extra_edges = std::move(extras);
    std::sort(lay.extra_edges.begin(), lay.extra_edges.end());
    try {
      validate_layout(inst, lay);
    } catch (const ModelError& e) {
      throw ParseError(std::string("invalid layout: ") + e.what());
    }
    out.layout = std::move(lay);
  }
  try {
    validate_instance(inst);
  } catch (const ModelError& e) {
    throw ParseError(std::string("invalid instance: ") + e.what());
  }
  return out;
}

std::string serialize_instance(const Instance& inst,
                               const SpanningTreeLayout* layout) {
  std::ostringstream os;
  os << "soac 1\n";
  os << "vertices " << inst.graph.vertex_count << "\n";
  for (size_t a = 0; a < inst.graph.arcs.size(); ++a) {
    os << "arc " << inst.graph.arcs[a].tail << " " << inst.graph.arcs[a].head
       << " lat";
    for (const Rat& r : inst.latencies[a]) os << " " << rat_to_string(r);
    os << "\n";
  }
  for (const Agent& ag : inst.agents)
    os << "agent " << ag.source << " " << ag.target << "\n";
  if (inst.lambda) os << "lambda " << rat_to_string(*inst.lambda) << "\n";
  if (inst.alpha) os << "alpha " << *inst.alpha << "\n";
  if (layout) {
    os << "tree";
    for (int v = 0; v < layout->vertex_count; ++v)
      os << " " << (v == layout->root ? -1 : layout->parent[v]);
    os << "\n";
    std::vector<EdgeUV> ex = layout->extra_edges;
    std::sort(ex.begin(), ex.end());
    for (const EdgeUV& e : ex) os << "extra " << e.u << " " << e.v << "\n";
    os << "root " << layout->root << "\n";
  }
  return os.str();
}

}  // namespace soac
