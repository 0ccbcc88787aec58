#include "foldgrowth/fold.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fg {

namespace {

// all (vertex, d1, d2) with d1 < d2, equal labels, common initial vertex
std::vector<FoldStep> foldable_pairs(const LabelledGraph& h) {
  std::vector<FoldStep> out;
  auto st = h.g.stars();
  for (int v = 0; v < h.g.nv; ++v) {
    auto& s = st[v];
    std::sort(s.begin(), s.end(), [&](int a, int b) {
      if (h.lab[a] != h.lab[b]) return h.lab[a] < h.lab[b];
      return a < b;
    });
    for (size_t i = 0; i + 1 < s.size(); ++i)
      for (size_t j = i + 1; j < s.size() && h.lab[s[j]] == h.lab[s[i]]; ++j)
        out.push_back({v, s[i], s[j]});
  }
  return out;
}

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// apply one fold (d1, d2 identified, tau(d1) ~ tau(d2)); maps are filled with
// the pre-step -> post-step correspondences
LabelledGraph apply_fold(const LabelledGraph& h, int d1, int d2, std::vector<int>& vmap,
                         std::vector<int>& emap) {
  Dsu vd(h.g.nv);
  vd.unite(h.g.term(d1), h.g.term(d2));
  // d2's geometric edge disappears into d1's
  LabelledGraph out;
  out.base = h.base;
  vmap.assign(h.g.nv, -1);
  for (int v = 0; v < h.g.nv; ++v) {
    int r = vd.find(v);
    if (vmap[r] < 0) vmap[r] = out.g.add_vertex();
    vmap[v] = vmap[r];
  }
  emap.assign(h.g.dedges(), -1);
  int drop = geom(d2);
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    if (ge == drop) continue;
    int d = 2 * ge;
    int nd = out.g.add_edge(vmap[h.g.init[d]], vmap[h.g.term(d)]);
    out.lab.resize(out.g.dedges());
    out.lab[nd] = h.lab[d];
    out.lab[rev(nd)] = h.lab[rev(d)];
    emap[d] = nd;
    emap[rev(d)] = rev(nd);
  }
  emap[d2] = emap[d1];
  emap[rev(d2)] = emap[rev(d1)];
  if (h.ipt >= 0) out.ipt = vmap[h.ipt];
  if (h.tpt >= 0) out.tpt = vmap[h.tpt];
  return out;
}

void compose_maps(FoldTrace& t, const std::vector<int>& vmap, const std::vector<int>& emap) {
  for (auto& x : t.vertex_map) x = vmap[x];
  for (auto& x : t.edge_map) x = emap[x];
}

FoldTrace identity_trace(const LabelledGraph& h) {
  FoldTrace t;
  t.vertex_map.resize(h.g.nv);
  for (int v = 0; v < h.g.nv; ++v) t.vertex_map[v] = v;
  t.edge_map.resize(h.g.dedges());
  for (int d = 0; d < h.g.dedges(); ++d) t.edge_map[d] = d;
  return t;
}

} // namespace

std::pair<LabelledGraph, FoldTrace> fold_step(const LabelledGraph& h) {
  auto pairs = foldable_pairs(h);
  check(!pairs.empty(), errc::domain, "fold_step: graph is already an immersion");
  FoldTrace t = identity_trace(h);
  std::vector<int> vmap, emap;
  LabelledGraph out = apply_fold(h, pairs[0].d1, pairs[0].d2, vmap, emap);
  t.steps.push_back(pairs[0]);
  compose_maps(t, vmap, emap);
  return {out, t};
}

std::pair<LabelledGraph, FoldTrace> fold(const LabelledGraph& h) {
  LabelledGraph cur = h;
  FoldTrace t = identity_trace(h);
  for (;;) {
    auto pairs = foldable_pairs(cur);
    if (pairs.empty()) break;
    std::vector<int> vmap, emap;
    LabelledGraph next = apply_fold(cur, pairs[0].d1, pairs[0].d2, vmap, emap);
    t.steps.push_back(pairs[0]);
    compose_maps(t, vmap, emap);
    cur = std::move(next);
  }
  return {cur, t};
}

LabelledGraph folded(const LabelledGraph& h) { return fold(h).first; }

LabelledGraph fold_random(const LabelledGraph& h, std::mt19937_64& rng) {
  LabelledGraph cur = h;
  for (;;) {
    auto pairs = foldable_pairs(cur);
    if (pairs.empty()) return cur;
    auto& pick = pairs[rng() % pairs.size()];
    std::vector<int> vmap, emap;
    cur = apply_fold(cur, pick.d1, pick.d2, vmap, emap);
  }
}

Lift lift_path(const LabelledGraph& h, int start, const Path& base_path) {
  check(start >= 0 && start < h.g.nv, errc::domain, "lift start out of range");
  Lift out;
  if (!base_path.trivial())
    check(h.vlabel(start) == initial(base_path), errc::domain, "lift start fiber mismatch");
  // label -> edge per vertex
  auto st = h.g.stars();
  out.path = Path::trivial_at(start);
  int at = start;
  for (int i = 0; i < base_path.len(); ++i) {
    int want = base_path.edges[i];
    int found = -1;
    for (int d : st[at])
      if (h.lab[d] == want) {
        found = d;
        break;
      }
    if (found < 0) {
      out.failed_at = i;
      out.closed = false;
      return out;
    }
    out.path.edges.push_back(found);
    at = h.g.term(found);
  }
  out.total = true;
  out.closed = (at == start);
  return out;
}

bool has_closed_lift(const LabelledGraph& h, int v, const Path& base_path) {
  std::set<int> states{v};
  auto st = h.g.stars();
  for (int i = 0; i < base_path.len(); ++i) {
    std::set<int> next;
    for (int s : states)
      for (int d : st[s])
        if (h.lab[d] == base_path.edges[i]) next.insert(h.g.term(d));
    states = std::move(next);
    if (states.empty()) return false;
  }
  return states.count(v) > 0;
}

namespace {

std::pair<LabelledGraph, CoverCertificate> complete_impl(const LabelledGraph& h,
                                                         int sheets_override, bool cyclic);

} // namespace

std::pair<LabelledGraph, CoverCertificate> complete_to_cover(const LabelledGraph& h,
                                                             int sheets_override) {
  return complete_impl(h, sheets_override, false);
}

std::pair<LabelledGraph, CoverCertificate> complete_to_cover_cyclic(const LabelledGraph& h,
                                                                    int sheets_override) {
  return complete_impl(h, sheets_override, true);
}

namespace {

std::pair<LabelledGraph, CoverCertificate> complete_impl(const LabelledGraph& h,
                                                         int sheets_override, bool cyclic) {
  check(is_immersion(h), errc::domain, "complete_to_cover needs an immersion");
  check(h.g.nv > 0, errc::domain, "complete_to_cover of the empty graph");
  const Graph& b = h.base;
  std::vector<std::vector<int>> vfiber(b.nv);
  for (int v = 0; v < h.g.nv; ++v) vfiber[h.vlabel(v)].push_back(v);
  int s = 0;
  for (auto& f : vfiber) s = std::max(s, static_cast<int>(f.size()));
  s = std::max(s, 1);
  if (sheets_override > 0) {
    check(sheets_override >= s, errc::domain, "sheets_override below max fiber size");
    s = sheets_override;
  }

  LabelledGraph out;
  out.base = b;
  CoverCertificate cert;
  cert.sheets = s;
  cert.vertex_fibers.resize(b.nv);
  // existing vertices keep their ids; fibers padded with fresh vertices
  for (int v = 0; v < h.g.nv; ++v) out.g.add_vertex();
  for (int bv = 0; bv < b.nv; ++bv) {
    cert.vertex_fibers[bv] = vfiber[bv];
    while (static_cast<int>(cert.vertex_fibers[bv].size()) < s)
      cert.vertex_fibers[bv].push_back(out.g.add_vertex());
  }
  out.lab.assign(2 * (h.g.geoms() + 0), -1);
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    int d = 2 * ge;
    int nd = out.g.add_edge(h.g.init[d], h.g.term(d));
    out.lab[nd] = h.lab[d];
    out.lab[rev(nd)] = h.lab[rev(d)];
  }
  cert.edge_fibers.resize(b.geoms());
  // per base geometric edge: existing lifts give a partial matching between the
  // iota fiber and the tau fiber; extend with lowest free indices first
  for (int bg = 0; bg < b.geoms(); ++bg) {
    int bd = 2 * bg;
    const auto& fi = cert.vertex_fibers[b.init[bd]];
    const auto& ft = cert.vertex_fibers[b.term(bd)];
    std::vector<int> pos_i(out.g.nv, -1), pos_t(out.g.nv, -1);
    for (int i = 0; i < s; ++i) pos_i[fi[i]] = i, pos_t[ft[i]] = i;
    std::vector<char> used_i(s, 0), used_t(s, 0);
    for (int d = 0; d < 2 * h.g.geoms(); d += 2)
      if (h.lab[d] == bd || h.lab[d] == rev(bd)) {
        int dd = h.lab[d] == bd ? d : rev(d);
        used_i[pos_i[out.g.init[dd]]] = 1;
        used_t[pos_t[out.g.term(dd)]] = 1;
        cert.edge_fibers[bg].push_back(dd);
      }
    bool base_loop = b.init[bd] == b.term(bd);
    if (!cyclic || !base_loop) {
      int tj = 0;
      for (int i = 0; i < s; ++i) {
        if (used_i[i]) continue;
        while (used_t[tj]) ++tj;
        int nd = out.g.add_edge(fi[i], ft[tj]);
        out.lab.resize(out.g.dedges());
        out.lab[nd] = bd;
        out.lab[rev(nd)] = rev(bd);
        cert.edge_fibers[bg].push_back(nd);
        used_t[tj] = 1;
      }
      continue;
    }
    // loop edge: chain the partial orbit paths into one cycle so the added
    // monodromy is a single s-cycle (pre-existing cycles stay untouched)
    std::vector<int> succ(s, -1), predc(s, -1);
    for (int d = 0; d < 2 * h.g.geoms(); d += 2)
      if (h.lab[d] == bd || h.lab[d] == rev(bd)) {
        int dd = h.lab[d] == bd ? d : rev(d);
        succ[pos_i[out.g.init[dd]]] = pos_t[out.g.term(dd)];
        predc[pos_t[out.g.term(dd)]] = pos_i[out.g.init[dd]];
      }
    std::vector<int> starts;
    std::vector<char> on_path(s, 0);
    for (int i = 0; i < s; ++i) {
      if (predc[i] >= 0) continue;  // not a path start
      // walk forward; a node with no predecessor heads a maximal path
      starts.push_back(i);
      for (int x = i; x >= 0; x = succ[x]) on_path[x] = 1;
    }
    for (size_t k = 0; k < starts.size(); ++k) {
      int tail = starts[k];
      while (succ[tail] >= 0) tail = succ[tail];
      int next_head = starts[(k + 1) % starts.size()];
      int nd = out.g.add_edge(fi[tail], ft[next_head]);
      out.lab.resize(out.g.dedges());
      out.lab[nd] = bd;
      out.lab[rev(nd)] = rev(bd);
      cert.edge_fibers[bg].push_back(nd);
    }
  }
  out.ipt = h.ipt;
  out.tpt = h.tpt;
  check(is_cover(out), errc::internal, "cover completion produced a non-cover");
  return {out, cert};
}

} // namespace

std::vector<LabelledGraph> enumerate_covers(const Graph& g, int s, int bound) {
  check(s >= 1, errc::domain, "sheet count must be positive");
  check(s <= bound, errc::resource,
        "cover enumeration bound exceeded (s=" + std::to_string(s) + ")");
  // fibers: vertex (v,i) -> id v*s... ; per geometric edge choose a bijection
  // iota-fiber -> tau-fiber
  int ng = g.geoms();
  std::vector<std::vector<int>> perms;  // all permutations of size s
  {
    std::vector<int> p(s);
    for (int i = 0; i < s; ++i) p[i] = i;
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  std::vector<LabelledGraph> out;
  std::set<std::vector<long long>> seen;
  std::vector<int> choice(ng, 0);
  auto vid = [&](int bv, int i) { return bv * s + i; };
  for (;;) {
    // build candidate
    LabelledGraph h;
    h.base = g;
    for (int v = 0; v < g.nv * s; ++v) h.g.add_vertex();
    for (int bg = 0; bg < ng; ++bg) {
      int bd = 2 * bg;
      const auto& p = perms[choice[bg]];
      for (int i = 0; i < s; ++i) {
        int nd = h.g.add_edge(vid(g.init[bd], i), vid(g.term(bd), p[i]));
        h.lab.resize(h.g.dedges());
        h.lab[nd] = bd;
        h.lab[rev(nd)] = rev(bd);
      }
    }
    if (h.g.connected()) {
      // canonical form rooted in the fiber of the least base vertex
      std::vector<long long> best;
      LabelledGraph c = h;
      for (int i = 0; i < s; ++i) {
        c.ipt = c.tpt = vid(0, i);
        auto code = canonical_code(c);
        if (best.empty() || code < best) best = std::move(code);
      }
      if (seen.insert(best).second) {
        h.ipt = h.tpt = -1;
        out.push_back(canonical(h));
      }
    }
    // next choice vector
    int k = ng - 1;
    while (k >= 0 && choice[k] + 1 == static_cast<int>(perms.size())) choice[k--] = 0;
    if (k < 0) break;
    ++choice[k];
  }
  return out;
}

LabelledGraph trim_core(const LabelledGraph& h) {
  check(h.based(), errc::domain, "trim_core needs a based graph");
  LabelledGraph cur = h;
  for (;;) {
    std::vector<int> val(cur.g.nv, 0);
    for (int d = 0; d < cur.g.dedges(); ++d) val[cur.g.init[d]]++;
    int bad = -1;
    for (int v = 0; v < cur.g.nv && bad < 0; ++v)
      if (val[v] <= 1 && v != cur.ipt) bad = v;
    if (bad < 0) return cur;
    LabelledGraph next;
    next.base = cur.base;
    std::vector<int> vm(cur.g.nv, -1);
    for (int v = 0; v < cur.g.nv; ++v)
      if (v != bad) vm[v] = next.g.add_vertex();
    for (int ge = 0; ge < cur.g.geoms(); ++ge) {
      int d = 2 * ge;
      if (cur.g.init[d] == bad || cur.g.term(d) == bad) continue;
      int nd = next.g.add_edge(vm[cur.g.init[d]], vm[cur.g.term(d)]);
      next.lab.resize(next.g.dedges());
      next.lab[nd] = cur.lab[d];
      next.lab[rev(nd)] = cur.lab[rev(d)];
    }
    next.ipt = next.tpt = vm[cur.ipt];
    cur = std::move(next);
  }
}

LabelledGraph map_core(const LabelledGraph& core, const std::function<Path(int)>& image) {
  check(core.based(), errc::domain, "map_core needs a based graph");
  // subdivide every oriented edge into the image word
  LabelledGraph sub;
  sub.base = core.base;
  for (int v = 0; v < core.g.nv; ++v) sub.g.add_vertex();
  for (int ge = 0; ge < core.g.geoms(); ++ge) {
    int d = 2 * ge;
    Path w = image(core.lab[d]);
    check(!w.trivial(), errc::domain, "map_core image collapses an edge");
    int at = core.g.init[d];
    for (int i = 0; i < w.len(); ++i) {
      int to = (i + 1 == w.len()) ? core.g.term(d) : sub.g.add_vertex();
      int nd = sub.g.add_edge(at, to);
      sub.lab.resize(sub.g.dedges());
      sub.lab[nd] = w.edges[i];
      sub.lab[rev(nd)] = rev(w.edges[i]);
      at = to;
    }
  }
  sub.ipt = sub.tpt = core.ipt;
  auto [imm, trace] = fold(sub);
  (void)trace;
  return trim_core(imm);
}

} // namespace fg
