#include "foldgrowth/rep.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fg {

Path EdgeMap::image_of_edge(const Graph& g, int d) const {
  int ge = geom(d);
  bool along = forward(d);  // orientation is the forward direction by construction
  if (fixed(ge)) return Path{g.init[d], {d}};
  const Path& u = *suffix[ge];
  Path img = Path{g.init[2 * ge], {2 * ge}};
  img = concat(g, img, u);
  return along ? img : reverse_path(g, img);
}

Path EdgeMap::apply(const Graph& g, const Path& p) const {
  if (p.trivial()) return p;
  Path out = Path::trivial_at(p.at);
  for (int d : p.edges) out = concat(g, out, image_of_edge(g, d));
  return out;
}

Path EdgeMap::map(const Graph& g, const Path& p) const { return tighten(g, apply(g, p)); }

Path EdgeMap::iterate(const Graph& g, const Path& p, int k) const {
  Path q = tighten(g, p);
  for (int i = 0; i < k; ++i) q = map(g, q);
  return q;
}

int Representative::height(const Path& p) const {
  int h = 0;
  for (int d : p.edges) h = std::max(h, geom(d) + 1);
  return h;
}

// --------------------------------------------------------------------------
// parsing

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    out.push_back(t);
  }
  return out;
}

// splitting probe: e.u stays cancellation-free at the junction under iteration
bool junction_splits(const Representative& r, int ge, int depth) {
  const Graph& g = r.graph;
  Path e = Path{g.init[2 * ge], {2 * ge}};
  const Path& u = *r.u(ge);
  for (int k = 0; k <= depth; ++k) {
    Path fe = r.f_iter(e, k);
    Path fu = r.f_iter(u, k);
    if (fe.trivial() || fu.trivial()) return false;
    if (fe.edges.back() == rev(fu.edges.front())) return false;
  }
  return true;
}

} // namespace

ParseResult parse_rep(const std::string& text, int probe_depth) {
  ParseResult res;
  Representative& r = res.rep;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> vat;
  std::map<std::string, int> eat;       // name -> geometric id
  std::vector<std::string> edge_order;  // declaration order
  struct MapLine {
    std::string edge;
    std::vector<std::string> toks;
  };
  std::vector<MapLine> maps;
  bool have_name = false, have_vertices = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    auto where = " at line " + std::to_string(lineno);
    if (toks[0] == "rep") {
      check(toks.size() == 2, errc::malformed, "rep line needs a name" + where);
      r.name = toks[1];
      have_name = true;
    } else if (toks[0] == "vertices") {
      check(!have_vertices, errc::malformed, "duplicate vertices line" + where);
      check(toks.size() >= 2, errc::malformed, "vertices line needs names" + where);
      for (size_t i = 1; i < toks.size(); ++i) {
        check(!vat.count(toks[i]), errc::malformed, "duplicate vertex " + toks[i] + where);
        vat[toks[i]] = r.graph.add_vertex(toks[i]);
      }
      have_vertices = true;
    } else if (toks[0] == "edge") {
      // edge <id> : <v> -> <v>
      check(toks.size() == 6 && toks[2] == ":" && toks[4] == "->", errc::malformed,
            "bad edge line" + where);
      if (!have_vertices && r.graph.nv == 0) vat["v0"] = r.graph.add_vertex("v0");
      check(!eat.count(toks[1]), errc::malformed, "duplicate edge " + toks[1] + where);
      check(vat.count(toks[3]) && vat.count(toks[5]), errc::malformed,
            "unknown vertex in edge line" + where);
      int ge = geom(r.graph.add_edge(vat[toks[3]], vat[toks[5]], toks[1]));
      eat[toks[1]] = ge;
      edge_order.push_back(toks[1]);
    } else if (toks[0] == "map") {
      check(toks.size() >= 4 && toks[2] == "->", errc::malformed, "bad map line" + where);
      MapLine m;
      m.edge = toks[1];
      m.toks.assign(toks.begin() + 3, toks.end());
      maps.push_back(std::move(m));
    } else {
      fail(errc::malformed, "unknown directive '" + toks[0] + "'" + where);
    }
  }
  check(have_name, errc::malformed, "missing rep line");
  check(r.graph.geoms() > 0, errc::malformed, "no edges declared");
  check(r.graph.connected(), errc::validation, "graph is not connected");
  if (!r.graph.minimal())
    res.warnings.push_back({false, "graph is not minimal (has a valence-1 vertex)"});

  r.orient = Orientation::standard(r.graph);
  r.fmap.suffix.assign(r.graph.geoms(), std::nullopt);

  auto edge_token = [&](const std::string& t) {
    bool rv = t[0] == '~';
    std::string name = rv ? t.substr(1) : t;
    check(eat.count(name), errc::malformed, "unknown edge '" + name + "' in map line");
    int d = 2 * eat[name];
    return rv ? rev(d) : d;
  };

  std::vector<char> mapped(r.graph.geoms(), 0);
  for (auto& m : maps) {
    check(eat.count(m.edge), errc::malformed, "map for unknown edge " + m.edge);
    int ge = eat[m.edge];
    check(!mapped[ge], errc::malformed, "duplicate map for edge " + m.edge);
    mapped[ge] = 1;
    check(edge_token(m.toks[0]) == 2 * ge, errc::validation,
          "map for " + m.edge + " does not start with the edge itself (TT shape)");
    if (m.toks.size() == 1) continue;  // fixed
    std::vector<int> rest;
    for (size_t i = 1; i < m.toks.size(); ++i) rest.push_back(edge_token(m.toks[i]));
    Path u = make_path(r.graph, std::move(rest));
    check(initial(u) == r.graph.term(2 * ge), errc::validation,
          "suffix of " + m.edge + " does not start at the edge terminal");
    check(closed(r.graph, u), errc::validation, "suffix of " + m.edge + " is not closed");
    check(is_tight(u), errc::validation, "suffix of " + m.edge + " is not tight");
    for (int d : u.edges)
      check(geom(d) < ge, errc::validation,
            "suffix of " + m.edge + " escapes the lower filtration (crosses " +
                r.graph.ename(d) + ")");
    r.fmap.suffix[ge] = u;
  }
  for (int ge = 0; ge < r.graph.geoms(); ++ge)
    check(mapped[ge], errc::malformed, "no map line for edge " + r.graph.enames[ge]);

  for (int ge = 0; ge < r.graph.geoms(); ++ge)
    if (!r.fmap.fixed(ge))
      check(junction_splits(r, ge, probe_depth), errc::validation,
            "junction cancellation detected for edge " + r.graph.enames[ge] +
                " within probe depth (splitting error)");
  return res;
}

Representative load_rep(const std::string& path, int probe_depth) {
  std::ifstream f(path);
  check(f.good(), errc::io, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_rep(ss.str(), probe_depth).rep;
}

std::string emit_rep(const Representative& r) {
  std::ostringstream out;
  out << "rep " << r.name << "\n";
  out << "vertices";
  for (auto& v : r.graph.vnames) out << ' ' << v;
  out << "\n";
  for (int ge = 0; ge < r.graph.geoms(); ++ge)
    out << "edge " << r.graph.enames[ge] << " : " << r.graph.vnames[r.graph.init[2 * ge]] << " -> "
        << r.graph.vnames[r.graph.term(2 * ge)] << "\n";
  for (int ge = 0; ge < r.graph.geoms(); ++ge) {
    out << "map " << r.graph.enames[ge] << " -> " << r.graph.enames[ge];
    if (!r.fmap.fixed(ge)) out << ' ' << show(r.graph, *r.u(ge));
    out << "\n";
  }
  return out.str();
}

// --------------------------------------------------------------------------

NielsenResult nielsen_class(const Representative& r, const Path& p, int period_bound) {
  Path t = tighten(r.graph, p);
  Path cur = t;
  for (int k = 1; k <= period_bound; ++k) {
    cur = r.f(cur);
    if (cur.edges == t.edges && (cur.trivial() ? cur.at == t.at : true)) {
      if (k == 1) return {NielsenClass::nielsen, 1};
      return {NielsenClass::periodic, k};
    }
  }
  return {NielsenClass::no, 0};
}

bool is_nielsen(const Representative& r, const Path& p) {
  return nielsen_class(r, p).cls == NielsenClass::nielsen;
}

FiltrationInfo analyze_growth(const Representative& r) {
  int n = r.strata();
  FiltrationInfo fi;
  fi.degree.assign(n, 0);
  for (int ge = 0; ge < n; ++ge) {
    if (r.fmap.fixed(ge)) {
      fi.degree[ge] = 0;
      continue;
    }
    const Path& u = *r.u(ge);
    auto nc = nielsen_class(r, u);
    check(nc.cls != NielsenClass::periodic, errc::validation,
          "suffix of " + r.graph.enames[ge] + " is a periodic Nielsen path of period " +
              std::to_string(nc.period) + " (TT2 violation)");
    if (nc.cls == NielsenClass::nielsen) {
      fi.degree[ge] = 1;
      continue;
    }
    int du = 1;
    for (int d : u.edges) du = std::max(du, fi.degree[geom(d)]);
    fi.degree[ge] = 1 + du;
  }
  // stable reorder by degree
  fi.order.resize(n);
  std::iota(fi.order.begin(), fi.order.end(), 0);
  std::stable_sort(fi.order.begin(), fi.order.end(),
                   [&](int a, int b) { return fi.degree[a] < fi.degree[b]; });
  // containment check in the new order
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[fi.order[i]] = i;
  for (int ge = 0; ge < n; ++ge) {
    if (r.fmap.fixed(ge)) continue;
    for (int d : r.u(ge)->edges)
      check(pos[geom(d)] < pos[ge], errc::validation,
            "efficient reorder impossible: suffix of " + r.graph.enames[ge] + " crosses " +
                r.graph.ename(d) + " of equal or higher class");
  }
  // efficiency containment for degree >= 2 classes: suffix degrees strictly lower
  for (int ge = 0; ge < n; ++ge) {
    if (r.fmap.fixed(ge) || fi.degree[ge] < 2) continue;
    for (int d : r.u(ge)->edges)
      check(fi.degree[geom(d)] < fi.degree[ge], errc::validation,
            "non-efficient input: suffix of " + r.graph.enames[ge] + " crosses its own stratum");
  }
  fi.eta = 0;
  for (int d : fi.degree) fi.eta = std::max(fi.eta, d);
  // breakpoints L_1..L_{eta+1}: 1-based position of the first edge of each class
  fi.breakpoints.clear();
  for (int deg = 1; deg <= fi.eta + 1; ++deg) {
    int p = n + 1;
    for (int i = 0; i < n; ++i)
      if (fi.degree[fi.order[i]] >= deg) {
        p = i + 1;
        break;
      }
    fi.breakpoints.push_back(p);
  }
  if (fi.eta >= 1)
    check(fi.eta < r.graph.rank(), errc::validation,
          "growth degree " + std::to_string(fi.eta) + " not below rank " +
              std::to_string(r.graph.rank()));
  return fi;
}

namespace {

// unique f-splitting of a Nielsen path into passive units; needs mu data of
// lower linear edges
std::vector<Path> passive_split(const Analyzed& a, const Path& nielsen);

Representative reorder_rep(const Representative& r, const std::vector<int>& order,
                           std::vector<int>& from_original) {
  Representative out;
  out.name = r.name;
  for (int v = 0; v < r.graph.nv; ++v)
    out.graph.add_vertex(r.graph.vnames.empty() ? "" : r.graph.vnames[v]);
  std::vector<int> newpos(order.size());
  for (size_t i = 0; i < order.size(); ++i) newpos[order[i]] = static_cast<int>(i);
  for (size_t i = 0; i < order.size(); ++i) {
    int ge = order[i];
    out.graph.add_edge(r.graph.init[2 * ge], r.graph.term(2 * ge), r.graph.enames[ge]);
  }
  out.orient = Orientation::standard(out.graph);
  out.fmap.suffix.assign(order.size(), std::nullopt);
  auto remap = [&](const Path& p) {
    Path q = p;
    for (auto& d : q.edges) d = 2 * newpos[geom(d)] + (d & 1);
    return q;
  };
  for (size_t i = 0; i < order.size(); ++i) {
    int ge = order[i];
    if (!r.fmap.fixed(ge)) out.fmap.suffix[i] = remap(*r.u(ge));
  }
  from_original = order;
  return out;
}

} // namespace

int Analyzed::degree_of_path(const Path& p) const {
  int d = 0;
  for (int e : p.edges) d = std::max(d, filt.degree[geom(e)]);
  return d;
}

int Analyzed::stratum_lo(int deg) const {
  for (int ge = 0; ge < rep.strata(); ++ge)
    if (filt.degree[ge] == deg) return ge;
  return -1;
}

int Analyzed::stratum_hi(int deg) const {
  for (int ge = rep.strata() - 1; ge >= 0; --ge)
    if (filt.degree[ge] == deg) return ge;
  return -1;
}

Analyzed analyze(const Representative& r) {
  FiltrationInfo fi = analyze_growth(r);
  Analyzed a;
  a.rep = reorder_rep(r, fi.order, a.from_original);
  // recompute info relative to the new order (identity permutation)
  a.filt = analyze_growth(a.rep);
  for (size_t i = 0; i < a.filt.order.size(); ++i)
    check(a.filt.order[i] == static_cast<int>(i), errc::internal, "reorder not idempotent");
  // linear data bottom-up
  for (int ge = 0; ge < a.rep.strata(); ++ge) {
    if (a.filt.degree[ge] != 1) continue;
    LinearData ld;
    auto pr = primitive_root(a.rep.graph, *a.rep.u(ge));
    ld.mu = pr.mu;
    ld.m = pr.m;
    ld.kappas = passive_split(a, ld.mu);
    a.linear.emplace(ge, std::move(ld));
  }
  return a;
}

namespace {

std::vector<Path> passive_split(const Analyzed& a, const Path& nielsen) {
  const Graph& g = a.rep.graph;
  std::vector<Path> units;
  int i = 0;
  while (i < nielsen.len()) {
    int d = nielsen.edges[i];
    int ge = geom(d);
    if (a.filt.degree[ge] == 0) {  // (FF) or (FR)
      units.push_back(subpath(g, nielsen, i, i + 1));
      ++i;
      continue;
    }
    check(a.filt.degree[ge] == 1 && forward(d), errc::internal,
          "passive split hit a non-passive prefix at " + g.ename(d));
    // (FE): e_a mu_a^dexp ~e_b with mu_a = mu_b, m_a = m_b
    const LinearData& la = a.linear.at(ge);
    int j = i + 1;
    // try forward powers then reverse powers of mu_a, then the closing edge
    auto try_close = [&](int jj, int dexp) -> int {
      if (jj >= nielsen.len()) return -1;
      int dd = nielsen.edges[jj];
      if (forward(dd) || a.filt.degree[geom(dd)] != 1) return -1;
      int b = geom(dd);
      const LinearData& lb = a.linear.at(b);
      if (lb.mu.edges != la.mu.edges || lb.m != la.m) return -1;
      if (b == ge && dexp == 0) return -1;
      return jj + 1;
    };
    int best = try_close(j, 0);
    if (best < 0) {
      // forward mu powers
      int jj = j, dexp = 0;
      while (best < 0) {
        bool match = true;
        for (int t = 0; t < la.mu.len() && match; ++t)
          if (jj + t >= nielsen.len() || nielsen.edges[jj + t] != la.mu.edges[t]) match = false;
        if (!match) break;
        jj += la.mu.len();
        ++dexp;
        best = try_close(jj, dexp);
      }
      if (best < 0) {
        // reverse mu powers
        Path rmu = reverse_path(g, la.mu);
        jj = j;
        dexp = 0;
        while (best < 0) {
          bool match = true;
          for (int t = 0; t < rmu.len() && match; ++t)
            if (jj + t >= nielsen.len() || nielsen.edges[jj + t] != rmu.edges[t]) match = false;
          if (!match) break;
          jj += rmu.len();
          ++dexp;
          best = try_close(jj, dexp);
        }
      }
    }
    check(best > 0, errc::internal,
          "passive split failed at position " + std::to_string(i) + " of " + show(g, nielsen));
    units.push_back(subpath(g, nielsen, i, best));
    i = best;
  }
  return units;
}

} // namespace

std::vector<long long> growth_samples(const Representative& r, const Path& p, int k_max) {
  std::vector<long long> out;
  Path cur = tighten(r.graph, p);
  out.push_back(cur.len());
  for (int k = 1; k <= k_max; ++k) {
    cur = r.f(cur);
    out.push_back(cur.len());
  }
  return out;
}

Path fast_iterate(const Graph& g, const EdgeMap& m, const Path& p, long long k,
                  IterCache& cache) {
  if (p.trivial() || k == 0) return tighten(g, p);
  if (cache.blocks.empty()) cache.blocks.resize(g.geoms());
  // extend the block streams as far as needed
  for (int d : p.edges) {
    int ge = geom(d);
    if (m.fixed(ge)) continue;
    auto& bl = cache.blocks[ge];
    if (bl.empty()) bl.push_back(*m.suffix[ge]);
    while (static_cast<long long>(bl.size()) < k) bl.push_back(m.map(g, bl.back()));
  }
  std::vector<int> out;
  for (int d : p.edges) {
    int ge = geom(d);
    if (m.fixed(ge)) {
      out.push_back(d);
      continue;
    }
    const auto& bl = cache.blocks[ge];
    if (forward(d)) {
      out.push_back(d);
      for (long long j = 0; j < k; ++j)
        out.insert(out.end(), bl[j].edges.begin(), bl[j].edges.end());
    } else {
      for (long long j = k; j-- > 0;)
        for (auto it = bl[j].edges.rbegin(); it != bl[j].edges.rend(); ++it)
          out.push_back(rev(*it));
      out.push_back(d);
    }
  }
  return tighten(g, make_path(g, std::move(out)));
}

Path fast_iterate(const Representative& r, const Path& p, long long k, IterCache& cache) {
  return fast_iterate(r.graph, r.fmap, p, k, cache);
}

EdgeMap reverse_rep(const Representative& r) {
  EdgeMap rm;
  rm.suffix.assign(r.strata(), std::nullopt);
  for (int ge = 0; ge < r.strata(); ++ge) {
    if (r.fmap.fixed(ge)) continue;
    Path ru = reverse_path(r.graph, *r.u(ge));
    Path v = rm.map(r.graph, ru);  // rm already inverts everything below this stratum
    check(r.f(v).edges == ru.edges, errc::internal,
          "reverse map: f_#(v) != reverse(u) for edge " + r.graph.enames[ge]);
    rm.suffix[ge] = v;
  }
  return rm;
}

int degree_bound(const Representative& r) {
  int n = r.strata();
  std::vector<char> placed(n, 0);
  auto contained = [&](int ge) {
    for (int d : r.u(ge)->edges)
      if (!placed[geom(d)]) return false;
    return true;
  };
  int nplaced = 0;
  for (int ge = 0; ge < n; ++ge)
    if (r.fmap.fixed(ge)) {
      placed[ge] = 1;
      ++nplaced;
    }
  // Nielsen block: closure of placeable Nielsen-suffix edges
  std::vector<char> nielsen_suffix(n, 0);
  for (int ge = 0; ge < n; ++ge)
    if (!r.fmap.fixed(ge) && is_nielsen(r, *r.u(ge))) nielsen_suffix[ge] = 1;
  bool grew = true;
  bool any_linear = false;
  while (grew) {
    grew = false;
    for (int ge = 0; ge < n; ++ge)
      if (!placed[ge] && nielsen_suffix[ge] && contained(ge)) {
        placed[ge] = 1;
        ++nplaced;
        any_linear = true;
        grew = true;
      }
  }
  int etap = any_linear ? 1 : 0;
  while (nplaced < n) {
    std::vector<int> layer;
    for (int ge = 0; ge < n; ++ge)
      if (!placed[ge] && contained(ge)) layer.push_back(ge);
    check(!layer.empty(), errc::internal, "degree bound layering stalled");
    for (int ge : layer) {
      placed[ge] = 1;
      ++nplaced;
    }
    ++etap;
    if (etap == 1) etap = 2;  // a non-Nielsen layer cannot sit in the linear block
  }
  return etap;
}

Path well_chosen(const Analyzed& a, const Path& circuit) {
  const Graph& g = a.rep.graph;
  Path rho = tighten(g, circuit);
  check(!rho.trivial() && closed(g, rho), errc::domain, "well_chosen needs a closed circuit");
  check(cyclically_reduced(g, rho), errc::domain, "well_chosen needs a cyclically reduced path");
  int h = a.rep.height(rho);
  int eh = 2 * (h - 1);
  int fallback = -1;
  for (int k = 0; k < rho.len(); ++k) {
    Path rot = rotate(g, rho, k);
    bool first = rot.edges.front() == eh;
    bool last = rot.edges.back() == rev(eh);
    if (first && fallback < 0) fallback = k;
    if (first != last) return rot;
  }
  check(fallback >= 0, errc::internal, "no rotation of the circuit starts with the top edge");
  return rotate(g, rho, fallback);
}

IntMatrix rep_matrix(const Representative& r) {
  CycleBasis b = cycle_basis(r.graph, r.graph.init[0]);
  return induced_matrix(r.graph, b, [&](int d) { return r.f_image(d); });
}

GrowthClass pg_abelianized_degree(const Representative& r) {
  GrowthClass gc = matrix_growth_class(rep_matrix(r));
  check(!gc.exponential, errc::validation,
        "abelianized action is exponential; input is not polynomially growing");
  return gc;
}

Path random_tight_path(const Graph& g, int len, std::mt19937_64& rng) {
  check(len >= 1, errc::domain, "random path length must be positive");
  auto st = g.stars();
  int v = static_cast<int>(rng() % g.nv);
  std::vector<int> edges;
  int prev = -1;
  for (int i = 0; i < len; ++i) {
    std::vector<int> opts;
    for (int d : st[v])
      if (d != prev || st[v].size() == 1) opts.push_back(d);
    if (opts.empty()) opts = st[v];
    int d = opts[rng() % opts.size()];
    edges.push_back(d);
    prev = rev(d);
    v = g.term(d);
  }
  return tighten(g, make_path(g, std::move(edges)));
}

std::string degrees_json(const Analyzed& a) {
  std::ostringstream out;
  out << "{\"degrees\": {";
  for (int ge = 0; ge < a.rep.strata(); ++ge) {
    if (ge) out << ", ";
    out << "\"" << a.rep.graph.enames[ge] << "\": " << a.filt.degree[ge];
  }
  out << "}, \"eta\": " << a.filt.eta << ", \"breakpoints\": [";
  for (size_t i = 0; i < a.filt.breakpoints.size(); ++i) {
    if (i) out << ", ";
    out << a.filt.breakpoints[i];
  }
  out << "]}";
  return out.str();
}

} // namespace fg
