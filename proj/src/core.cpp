#include "foldgrowth/core.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace fg {

int Graph::add_edge(int u, int v, std::string name) {
  check(u >= 0 && u < nv && v >= 0 && v < nv, errc::malformed, "edge endpoint out of range");
  int d = dedges();
  init.push_back(u);
  init.push_back(v);
  if (name.empty()) name = "e" + std::to_string(geoms());
  enames.push_back(std::move(name));
  return d;
}

int Graph::add_vertex(std::string name) {
  if (name.empty()) name = "v" + std::to_string(nv);
  vnames.push_back(std::move(name));
  return nv++;
}

std::string Graph::ename(int d) const {
  return forward(d) ? enames[geom(d)] : "~" + enames[geom(d)];
}

std::vector<std::vector<int>> Graph::stars() const {
  std::vector<std::vector<int>> st(nv);
  for (int d = 0; d < dedges(); ++d) st[init[d]].push_back(d);
  return st;
}

bool Graph::connected() const {
  if (nv == 0) return true;
  std::vector<char> seen(nv, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  auto st = stars();
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int d : st[v])
      if (!seen[term(d)]) {
        seen[term(d)] = 1;
        stack.push_back(term(d));
      }
  }
  return std::find(seen.begin(), seen.end(), 0) == seen.end();
}

bool Graph::minimal() const {
  std::vector<int> val(nv, 0);
  for (int d = 0; d < dedges(); ++d) val[init[d]]++;
  for (int v = 0; v < nv; ++v)
    if (val[v] < 2) return false;
  return true;
}

Graph rose(int n, const std::string& stem) {
  Graph g;
  g.add_vertex("v0");
  for (int i = 1; i <= n; ++i) g.add_edge(0, 0, stem + std::to_string(i));
  return g;
}

Orientation Orientation::standard(const Graph& g) {
  Orientation o;
  o.chosen.resize(g.geoms());
  for (int i = 0; i < g.geoms(); ++i) o.chosen[i] = 2 * i;
  return o;
}

Path make_path(const Graph& g, std::vector<int> edges) {
  check(!edges.empty(), errc::malformed, "make_path needs edges; use trivial_at");
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    check(g.term(edges[i]) == g.init[edges[i + 1]], errc::malformed,
          "mismatched edge chain at position " + std::to_string(i));
  Path p;
  p.at = g.init[edges[0]];
  p.edges = std::move(edges);
  return p;
}

int initial(const Path& p) { return p.at; }

int terminal(const Graph& g, const Path& p) {
  return p.trivial() ? p.at : g.term(p.edges.back());
}

bool closed(const Graph& g, const Path& p) { return initial(p) == terminal(g, p); }

bool is_tight(const Path& p) {
  for (size_t i = 0; i + 1 < p.edges.size(); ++i)
    if (p.edges[i + 1] == rev(p.edges[i])) return false;
  return true;
}

Path reverse_path(const Graph& g, const Path& p) {
  if (p.trivial()) return p;
  Path r;
  r.at = terminal(g, p);
  r.edges.reserve(p.edges.size());
  for (auto it = p.edges.rbegin(); it != p.edges.rend(); ++it) r.edges.push_back(rev(*it));
  return r;
}

Path concat(const Graph& g, const Path& a, const Path& b) {
  check(terminal(g, a) == initial(b), errc::malformed, "concat endpoint mismatch");
  if (a.trivial()) return b;
  if (b.trivial()) return a;
  Path c = a;
  c.edges.insert(c.edges.end(), b.edges.begin(), b.edges.end());
  return c;
}

Path power(const Graph& g, const Path& p, int n) {
  if (p.trivial() || n == 0) return Path::trivial_at(p.at);
  check(closed(g, p), errc::domain, "power of an open path");
  Path q = Path::trivial_at(p.at);
  for (int i = 0; i < n; ++i) q = concat(g, q, p);
  return q;
}

Path subpath(const Graph& g, const Path& p, int from, int to) {
  check(0 <= from && from <= to && to <= p.len(), errc::domain, "subpath range");
  if (from == to) {
    int v = from == p.len() ? terminal(g, p) : g.init[p.edges[from]];
    return Path::trivial_at(v);
  }
  return make_path(g, std::vector<int>(p.edges.begin() + from, p.edges.begin() + to));
}

Path rotate(const Graph& g, const Path& p, int k) {
  check(closed(g, p), errc::domain, "rotate needs a closed path");
  if (p.trivial()) return p;
  int n = p.len();
  k = ((k % n) + n) % n;
  if (k == 0) return p;
  std::vector<int> e(p.edges.begin() + k, p.edges.end());
  e.insert(e.end(), p.edges.begin(), p.edges.begin() + k);
  return make_path(g, std::move(e));
}

bool crosses(const Path& p, int geometric) {
  for (int d : p.edges)
    if (geom(d) == geometric) return true;
  return false;
}

std::string show(const Graph& g, const Path& p) {
  if (p.trivial()) return ".";
  std::string s;
  for (size_t i = 0; i < p.edges.size(); ++i) {
    if (i) s += ' ';
    s += g.ename(p.edges[i]);
  }
  return s;
}

Path parse_path(const Graph& g, const std::string& text) {
  std::map<std::string, int> byname;
  for (int i = 0; i < g.geoms(); ++i) byname[g.enames[i]] = 2 * i;
  std::istringstream in(text);
  std::vector<int> edges;
  std::string tok;
  while (in >> tok) {
    bool r = !tok.empty() && tok[0] == '~';
    std::string name = r ? tok.substr(1) : tok;
    auto it = byname.find(name);
    check(it != byname.end(), errc::malformed, "unknown edge '" + name + "'");
    edges.push_back(r ? rev(it->second) : it->second);
  }
  check(!edges.empty(), errc::malformed, "empty path text");
  return make_path(g, std::move(edges));
}

Path tighten(const Graph& g, const Path& p) {
  if (p.trivial()) return p;
  std::vector<int> out;
  out.reserve(p.edges.size());
  for (int d : p.edges) {
    if (!out.empty() && out.back() == rev(d))
      out.pop_back();
    else
      out.push_back(d);
  }
  if (out.empty()) return Path::trivial_at(p.at);
  Path q;
  q.at = g.init[out[0]];
  q.edges = std::move(out);
  return q;
}

bool cyclically_reduced(const Graph& g, const Path& p) {
  if (!is_tight(p)) return false;
  if (p.trivial()) return true;
  if (!closed(g, p)) return true;
  return p.edges.front() != rev(p.edges.back());
}

Path cyclic_reduction(const Graph& g, const Path& p) {
  check(closed(g, p), errc::domain, "cyclic reduction of an open path");
  Path q = tighten(g, p);
  while (!q.trivial() && q.edges.front() == rev(q.edges.back())) {
    if (q.len() == 2) return Path::trivial_at(g.term(q.edges[0]));
    q = subpath(g, q, 1, q.len() - 1);
  }
  return q;
}

Measure measure(const Graph& g, const Path& p) {
  Measure m;
  m.l = p.len();
  std::vector<long long> c(g.geoms(), 0);
  for (int d : p.edges) c[geom(d)] += forward(d) ? 1 : -1;
  for (long long x : c) m.l_ab += x < 0 ? -x : x;
  if (closed(g, p)) m.l_circ = cyclic_reduction(g, p).len();
  return m;
}

std::vector<long long> signed_crossings(const Graph& g, const Path& p, const Orientation& o) {
  std::vector<long long> c(g.geoms(), 0);
  for (int d : p.edges) {
    int sign = (d == o.chosen[geom(d)]) ? 1 : -1;
    c[geom(d)] += sign;
  }
  return c;
}

PrimitiveRoot primitive_root(const Graph& g, const Path& rho) {
  check(!rho.trivial(), errc::domain, "primitive root of a trivial path");
  check(closed(g, rho) && is_tight(rho), errc::domain, "primitive root needs a closed tight path");
  int n = rho.len();
  for (int period = 1; period <= n; ++period) {
    if (n % period) continue;
    bool ok = true;
    for (int i = period; i < n && ok; ++i)
      if (rho.edges[i] != rho.edges[i - period]) ok = false;
    // the candidate root must itself be closed or powers do not parse
    if (ok && g.term(rho.edges[period - 1]) == rho.at)
      return PrimitiveRoot{subpath(g, rho, 0, period), n / period};
  }
  return PrimitiveRoot{rho, 1};
}

// ---------------------------------------------------------------------------

int LabelledGraph::vlabel(int v) const {
  for (int d = 0; d < g.dedges(); ++d)
    if (g.init[d] == v) return base.init[lab[d]];
  // isolated vertex: the label is ambient; carriers built here never have one
  fail(errc::internal, "vertex label undefined for isolated vertex");
}

void check_labelled(const LabelledGraph& h) {
  check(static_cast<int>(h.lab.size()) == h.g.dedges(), errc::malformed, "label size mismatch");
  for (int d = 0; d < h.g.dedges(); ++d) {
    check(h.lab[d] >= 0 && h.lab[d] < h.base.dedges(), errc::malformed, "label out of range");
    check(h.lab[rev(d)] == rev(h.lab[d]), errc::malformed, "label does not commute with reversal");
  }
  for (int d = 0; d < h.g.dedges(); ++d)
    for (int d2 = 0; d2 < h.g.dedges(); ++d2)
      if (h.g.init[d] == h.g.init[d2] && h.base.init[h.lab[d]] != h.base.init[h.lab[d2]])
        fail(errc::malformed, "label does not commute with initial-vertex map");
}

bool is_immersion(const LabelledGraph& h) {
  auto st = h.g.stars();
  std::vector<char> seen(h.base.dedges(), 0);
  for (auto& s : st) {
    for (int d : s) {
      if (seen[h.lab[d]]) {
        for (int d2 : s) seen[h.lab[d2]] = 0;
        return false;
      }
      seen[h.lab[d]] = 1;
    }
    for (int d : s) seen[h.lab[d]] = 0;
  }
  return true;
}

bool is_cover(const LabelledGraph& h) {
  if (!is_immersion(h)) return false;
  auto st = h.g.stars();
  auto bst = h.base.stars();
  for (int v = 0; v < h.g.nv; ++v) {
    if (st[v].empty()) return false;
    if (st[v].size() != bst[h.base.init[h.lab[st[v][0]]]].size()) return false;
  }
  return true;
}

LabelledGraph line(const Graph& base, const Path& rho) {
  check(!rho.trivial(), errc::domain, "line of a trivial path");
  LabelledGraph h;
  h.base = base;
  for (int i = 0; i <= rho.len(); ++i) h.g.add_vertex();
  h.lab.resize(2 * rho.len());
  for (int i = 0; i < rho.len(); ++i) {
    int d = h.g.add_edge(i, i + 1);
    h.lab[d] = rho.edges[i];
    h.lab[rev(d)] = rev(rho.edges[i]);
  }
  h.ipt = 0;
  h.tpt = rho.len();
  return h;
}

LabelledGraph to_based(const LabelledGraph& h) {
  check(h.end_pointed(), errc::domain, "to_based needs an end-pointed graph");
  if (h.based()) return h;
  LabelledGraph q;
  q.base = h.base;
  int keep = std::min(h.ipt, h.tpt), drop = std::max(h.ipt, h.tpt);
  std::vector<int> vm(h.g.nv);
  for (int v = 0, nv = 0; v < h.g.nv; ++v) vm[v] = (v == drop) ? -1 : nv++;
  vm[drop] = vm[keep];
  for (int v = 0; v < h.g.nv; ++v)
    if (v != drop) q.g.add_vertex(h.g.vnames.empty() ? "" : h.g.vnames[v]);
  q.lab.resize(h.lab.size());
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    int d = 2 * ge;
    int nd = q.g.add_edge(vm[h.g.init[d]], vm[h.g.term(d)], h.g.enames[ge]);
    q.lab[nd] = h.lab[d];
    q.lab[rev(nd)] = h.lab[rev(d)];
  }
  q.ipt = q.tpt = vm[keep];
  return q;
}

LabelledGraph glue(const std::vector<LabelledGraph>& parts,
                   const std::vector<std::vector<GluePoint>>& classes,
                   std::vector<std::vector<int>>* vertex_maps) {
  check(!parts.empty(), errc::domain, "glue of nothing");
  for (size_t i = 1; i < parts.size(); ++i)
    check(parts[i].base.init == parts[0].base.init && parts[i].base.enames == parts[0].base.enames,
          errc::composition, "glue over different base graphs");
  // union-find over (part, vertex)
  std::vector<int> off(parts.size() + 1, 0);
  for (size_t i = 0; i < parts.size(); ++i) off[i + 1] = off[i] + parts[i].g.nv;
  std::vector<int> uf(off.back());
  for (size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (auto& cls : classes) {
    check(!cls.empty(), errc::composition, "empty glue class");
    int r = find(off[cls[0].part] + cls[0].vertex);
    for (auto& gp : cls) {
      int x = find(off[gp.part] + gp.vertex);
      uf[x] = r;
    }
  }
  // label agreement at glue points
  auto vl = [&](int part, int v) { return parts[part].vlabel(v); };
  for (auto& cls : classes)
    for (size_t j = 1; j < cls.size(); ++j)
      check(vl(cls[0].part, cls[0].vertex) == vl(cls[j].part, cls[j].vertex), errc::composition,
            "glue points carry different labels");

  LabelledGraph out;
  out.base = parts[0].base;
  std::vector<int> newid(off.back(), -1);
  for (int x = 0; x < off.back(); ++x) {
    int r = find(x);
    if (newid[r] < 0) newid[r] = out.g.add_vertex();
    newid[x] = newid[r];
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    for (int ge = 0; ge < p.g.geoms(); ++ge) {
      int d = 2 * ge;
      int nd = out.g.add_edge(newid[off[i] + p.g.init[d]], newid[off[i] + p.g.term(d)]);
      out.lab.resize(out.g.dedges());
      out.lab[nd] = p.lab[d];
      out.lab[rev(nd)] = p.lab[rev(d)];
    }
  }
  if (vertex_maps) {
    vertex_maps->assign(parts.size(), {});
    for (size_t i = 0; i < parts.size(); ++i) {
      (*vertex_maps)[i].resize(parts[i].g.nv);
      for (int v = 0; v < parts[i].g.nv; ++v) (*vertex_maps)[i][v] = newid[off[i] + v];
    }
  }
  return out;
}

LabelledGraph combine(const std::vector<LabelledGraph>& parts) {
  check(!parts.empty(), errc::domain, "combine of nothing");
  for (auto& p : parts) check(p.end_pointed(), errc::composition, "combine needs end-pointed parts");
  std::vector<std::vector<GluePoint>> classes;
  for (size_t i = 0; i + 1 < parts.size(); ++i)
    classes.push_back({{static_cast<int>(i), parts[i].tpt}, {static_cast<int>(i) + 1, parts[i + 1].ipt}});
  std::vector<std::vector<int>> vm;
  LabelledGraph out = glue(parts, classes, &vm);
  out.ipt = vm[0][parts[0].ipt];
  out.tpt = vm[parts.size() - 1][parts.back().tpt];
  return out;
}

LabelledGraph combine_based(const std::vector<LabelledGraph>& parts) {
  return to_based(combine(parts));
}

LabelledGraph circle(const Graph& base, const Path& rho) {
  return to_based(line(base, rho));
}

// BFS encoding from a fixed root; ties between equal labels broken by current
// ids, which is only reachable for non-immersed stars.
static std::vector<long long> bfs_code(const LabelledGraph& h, int root, std::vector<int>* order_out) {
  int n = h.g.nv;
  std::vector<int> ord(n, -1);
  int next = 0;
  ord[root] = next++;
  std::vector<int> queue{root};
  auto st = h.g.stars();
  for (auto& s : st)
    std::sort(s.begin(), s.end(), [&](int a, int b) {
      if (h.lab[a] != h.lab[b]) return h.lab[a] < h.lab[b];
      return a < b;
    });
  std::vector<long long> code;
  code.push_back(n);
  code.push_back(h.g.geoms());
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    code.push_back(-1);  // vertex separator
    for (int d : st[v]) {
      int w = h.g.term(d);
      if (ord[w] < 0) {
        ord[w] = next++;
        queue.push_back(w);
      }
      code.push_back(h.lab[d]);
      code.push_back(ord[w]);
    }
  }
  code.push_back(h.ipt >= 0 ? ord[h.ipt] : -2);
  code.push_back(h.tpt >= 0 ? ord[h.tpt] : -2);
  if (order_out) *order_out = ord;
  return code;
}

std::vector<long long> canonical_code(const LabelledGraph& h) {
  check(h.g.nv > 0, errc::domain, "canonical form of the empty graph");
  if (h.ipt >= 0) return bfs_code(h, h.ipt, nullptr);
  std::vector<long long> best;
  for (int v = 0; v < h.g.nv; ++v) {
    auto c = bfs_code(h, v, nullptr);
    if (best.empty() || c < best) best = std::move(c);
  }
  return best;
}

LabelledGraph canonical(const LabelledGraph& h) {
  int bestroot = h.ipt >= 0 ? h.ipt : 0;
  std::vector<long long> best;
  if (h.ipt >= 0) {
    best = bfs_code(h, h.ipt, nullptr);
  } else {
    for (int v = 0; v < h.g.nv; ++v) {
      auto c = bfs_code(h, v, nullptr);
      if (best.empty() || c < best) {
        best = std::move(c);
        bestroot = v;
      }
    }
  }
  std::vector<int> ord;
  bfs_code(h, bestroot, &ord);
  LabelledGraph out;
  out.base = h.base;
  for (int v = 0; v < h.g.nv; ++v) out.g.add_vertex();
  // emit geometric edges sorted by (new init, label, new term)
  struct E {
    int u, l, v, lr;
  };
  std::vector<E> es;
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    int d = 2 * ge;
    int u = ord[h.g.init[d]], v = ord[h.g.term(d)];
    int l = h.lab[d], lr = h.lab[rev(d)];
    if (std::tie(u, l) > std::tie(v, lr)) {
      std::swap(u, v);
      std::swap(l, lr);
    }
    es.push_back({u, l, v, lr});
  }
  std::sort(es.begin(), es.end(),
            [](const E& a, const E& b) { return std::tie(a.u, a.l, a.v) < std::tie(b.u, b.l, b.v); });
  out.lab.resize(2 * es.size());
  for (auto& e : es) {
    int nd = out.g.add_edge(e.u, e.v);
    out.lab[nd] = e.l;
    out.lab[rev(nd)] = e.lr;
  }
  if (h.ipt >= 0) out.ipt = ord[h.ipt];
  if (h.tpt >= 0) out.tpt = ord[h.tpt];
  return out;
}

bool labelled_iso(const LabelledGraph& a, const LabelledGraph& b) {
  if (a.g.nv != b.g.nv || a.g.geoms() != b.g.geoms()) return false;
  return canonical_code(a) == canonical_code(b);
}

std::string to_dot(const LabelledGraph& h) {
  std::ostringstream out;
  out << "digraph H {\n";
  for (int v = 0; v < h.g.nv; ++v) {
    out << "  n" << v;
    if (h.based() && v == h.ipt)
      out << " [shape=doublecircle]";
    else if (v == h.ipt)
      out << " [shape=box]";
    else if (v == h.tpt)
      out << " [shape=diamond]";
    else
      out << " [shape=circle]";
    out << ";\n";
  }
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    int d = 2 * ge;
    out << "  n" << h.g.init[d] << " -> n" << h.g.term(d) << " [label=\"" << h.base.ename(h.lab[d])
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

Path project(const LabelledGraph& h, const Path& p) {
  if (p.trivial()) return Path::trivial_at(h.vlabel(p.at));
  std::vector<int> edges;
  edges.reserve(p.edges.size());
  for (int d : p.edges) edges.push_back(h.lab[d]);
  return make_path(h.base, std::move(edges));
}

} // namespace fg
