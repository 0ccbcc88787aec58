#include "foldgrowth/apt.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <cstdio>
#define FG_TRACE(...) do { if (getenv("FG_TRACE")) fprintf(stderr, __VA_ARGS__); } while (0)

namespace fg {

namespace {

long long lcmll(long long a, long long b) { return std::lcm(a, b); }

// next power of two at or above x; keeps lcms of independently chosen
// parameters small
long long pow2_at_least(long long x) {
  long long p = 1;
  while (p < x) p <<= 1;
  return p;
}

bool is_exceptional(const Analyzed& a, const Path& p) {
  // e_i alpha^k ~e_j with alpha the common primitive suffix root
  const Graph& g = a.rep.graph;
  if (p.len() < 2) return false;
  int first = p.edges.front(), last = p.edges.back();
  if (!forward(first) || forward(last)) return false;
  int i = geom(first), j = geom(last);
  if (a.filt.degree[i] != 1 || a.filt.degree[j] != 1) return false;
  const LinearData& li = a.linear.at(i);
  const LinearData& lj = a.linear.at(j);
  if (li.mu.edges != lj.mu.edges) return false;
  Path mid = subpath(g, p, 1, p.len() - 1);
  if (mid.trivial()) return true;
  auto is_power_of = [&](const Path& base) {
    if (mid.len() % base.len()) return false;
    for (int t = 0; t < mid.len(); ++t)
      if (mid.edges[t] != base.edges[t % base.len()]) return false;
    return true;
  };
  return is_power_of(li.mu) || is_power_of(reverse_path(g, li.mu));
}

} // namespace

std::pair<long long, long long> lambda_constants(const Analyzed& a) {
  const Graph& g = a.rep.graph;
  long long l0 = 1, l1 = 0;
  bool any = false;
  for (auto& [ge, ld] : a.linear) {
    (void)ge;
    any = true;
    l0 = lcmll(l0, ld.mu.len());
    for (int i = 0; i < ld.mu.len(); ++i)
      for (int j = i + 2; j <= ld.mu.len(); ++j)
        if (is_exceptional(a, subpath(g, ld.mu, i, j))) l1 = std::max<long long>(l1, j - i);
  }
  if (!any) return {1, 0};
  return {l0, l1};
}

DiagramUnit diagram_unit(const Analyzed& a, const GrowthUnit& u, long long q) {
  const Graph& g = a.rep.graph;
  DiagramUnit out;
  out.unit = u;
  out.q = q;
  out.active = !passive_kind(u.kind);
  LabelledGraph l = line(g, u.path);
  if (!out.active) {
    out.pre_fold = l;
    out.folded = l;
    return out;
  }
  // glue C(mu^q) at the terminal point of the edge labelled by the winding edge
  int wind = u.kind == UnitKind::LR ? u.b : u.a;
  const LinearData& ld = a.linear.at(wind);
  Path muq = power(g, ld.mu, static_cast<int>(q));
  LabelledGraph ball = circle(g, muq);
  int glue_at = -1;
  for (int i = 0; i < u.path.len(); ++i) {
    int d = u.path.edges[i];
    if (geom(d) == wind) {
      glue_at = forward(d) ? i + 1 : i;
      break;
    }
  }
  check(glue_at >= 0, errc::internal, "active unit does not cross its winding edge");
  std::vector<std::vector<int>> vm;
  LabelledGraph joined = glue({l, ball}, {{{0, glue_at}, {1, ball.ipt}}}, &vm);
  joined.ipt = vm[0][l.ipt];
  joined.tpt = vm[0][l.tpt];
  out.pre_fold = joined;
  auto [folded, trace] = fold(joined);
  out.folded = folded;
  std::set<int> ball_geoms;
  int off = l.g.geoms();  // circle edges follow the line edges in `joined`
  for (int ge = 0; ge < ball.g.geoms(); ++ge)
    ball_geoms.insert(geom(trace.edge_map[2 * (off + ge)]));
  out.balloon_edges.assign(ball_geoms.begin(), ball_geoms.end());
  return out;
}

LambdaBuild build_lambda(const Analyzed& a, const Path& rho, long long q, int k_check) {
  const Graph& g = a.rep.graph;
  LambdaBuild out;
  out.q = q;
  Separation sep = separate(a, rho);
  std::vector<LabelledGraph> parts;
  for (auto& u : sep.units) {
    out.units.push_back(diagram_unit(a, u, q));
    parts.push_back(out.units.back().pre_fold);
  }
  LabelledGraph big = combine(parts);
  auto [lam, trace] = fold(big);
  out.lambda = lam;
  {
    // big stacks the parts' geometric edges in order
    int goff = 0;
    for (size_t i = 0; i < out.units.size(); ++i) {
      std::vector<int> edges;
      if (out.units[i].active) {
        int line_len = out.units[i].unit.path.len();
        int total = out.units[i].pre_fold.g.geoms();
        for (int ge = line_len; ge < total; ++ge)
          edges.push_back(geom(trace.edge_map[2 * (goff + ge)]));
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      }
      out.balloons.push_back(edges);
      goff += out.units[i].pre_fold.g.geoms();
    }
  }
  check(is_immersion(out.lambda), errc::internal, "Lambda did not fold to an immersion");
  IterCache ic;
  for (int k = 0; k <= k_check; ++k) {
    Path it = fast_iterate(a.rep, rho, k * q, ic);
    Lift lf = lift_path(out.lambda, out.lambda.ipt, it);
    check(lf.total && terminal(out.lambda.g, lf.path) == out.lambda.tpt, errc::internal,
          "f^{kq} iterate does not label a path across Lambda (k=" + std::to_string(k) + ")");
  }
  if (closed(g, rho)) {
    LabelledGraph based = to_based(big);
    out.sigma = fold(based).first;
    check(is_immersion(*out.sigma), errc::internal, "Sigma did not fold to an immersion");
  }
  return out;
}

std::string AptCertificate::json() const {
  std::ostringstream o;
  o << "{\"q\": " << q << ", \"bounded\": " << (bounded ? "true" : "false");
  if (fit_l) o << ", \"fit_l\": " << *fit_l;
  if (fit_lab) o << ", \"fit_l_ab\": " << *fit_lab;
  o << ", \"samples\": [";
  for (size_t i = 0; i < samples.size(); ++i) {
    if (i) o << ", ";
    o << "{\"k\": " << samples[i].k << ", \"l\": " << samples[i].l
      << ", \"l_ab\": " << samples[i].l_ab << "}";
  }
  o << "]}";
  return o.str();
}

AptCertificate linear_apt(const Analyzed& a, const Path& circuit, const AptConfig& cfg) {
  const Graph& g = a.rep.graph;
  Path cyc = cyclic_reduction(g, tighten(g, circuit));
  check(!cyc.trivial(), errc::domain, "linear_apt needs a nontrivial circuit");
  int deg = a.degree_of_path(cyc);
  check(deg <= 1, errc::domain,
        "linear_apt dispatched on a circuit of degree " + std::to_string(deg));
  AptCertificate cert;
  if (deg == 0 || is_nielsen(a.rep, cyc)) {
    cert.bounded = true;
    cert.q = 1;
    LabelledGraph c = fold(circle(g, cyc)).first;
    cert.sigma = c;
    cert.vtilde = c.ipt;
    for (int k = 0; k <= cfg.k_max_linear; ++k) {
      Path it = a.rep.f_iter(cyc, k);
      Lift lf = lift_path(c, c.ipt, it);
      check(lf.total && lf.closed, errc::internal, "bounded certificate lift failed");
      Measure m = measure(c.g, lf.path);
      cert.samples.push_back({k, m.l, m.l_ab});
    }
    cert.fit_l = 0;
    cert.fit_lab = 0;
    return cert;
  }
  Path rho = well_chosen(a, cyc);
  auto [l0, l1] = lambda_constants(a);
  long long q = std::max(2 * std::max(l0, l1) + 4 * l0, 2LL * rho.len()) + 1;
  LambdaBuild lb = build_lambda(a, rho, q, 2);
  check(lb.sigma.has_value(), errc::internal, "closed path produced no Sigma");
  cert.sigma = *lb.sigma;
  cert.vtilde = cert.sigma.ipt;
  cert.q = q;
  std::vector<long long> ls, labs;
  IterCache ic;
  for (int k = 0; k <= cfg.k_max_linear; ++k) {
    Path it = fast_iterate(a.rep, rho, k * q, ic);
    Lift lf = lift_path(cert.sigma, cert.vtilde, it);
    check(lf.total && lf.closed, errc::internal,
          "AI1 failed: iterate not closed at the lift point (k=" + std::to_string(k) + ")");
    Measure m = measure(cert.sigma.g, lf.path);
    cert.samples.push_back({k, m.l, m.l_ab});
    ls.push_back(m.l);
    labs.push_back(m.l_ab);
  }
  cert.fit_l = poly_degree_fit(ls);
  cert.fit_lab = poly_degree_fit(labs);
  return cert;
}

Tails tails(const Analyzed& a, int ge, int count) {
  const Graph& g = a.rep.graph;
  check(ge >= 0 && ge < a.rep.strata(), errc::domain, "tail edge out of range");
  check(!a.rep.fmap.fixed(ge), errc::domain, "tails of a fixed edge");
  check(count >= 1, errc::domain, "tail count must be positive");
  const Path& u = *a.rep.u(ge);
  EdgeMap rbar = reverse_rep(a.rep);
  auto pieces = canonical_f_split(a, u, 2);
  Tails out;
  int h = a.rep.height(u);
  int eh = 2 * (h - 1);
  bool first = u.edges.front() == eh, last = u.edges.back() == rev(eh);
  out.well_chosen = first != last || pieces.size() == 1;
  std::vector<Path> eps;  // the s_a cyclic pieces eps_0 .. eps_{s-1}
  if (out.well_chosen) {
    out.s = static_cast<int>(pieces.size());
    eps = pieces;
    for (int j = 0; static_cast<int>(out.plus.size()) < count; ++j)
      for (int i = 0; i < out.s && static_cast<int>(out.plus.size()) < count; ++i)
        out.plus.push_back(a.rep.f_iter(eps[i], j));
    for (int j = 1; static_cast<int>(out.minus.size()) < count; ++j)
      for (int i = out.s - 1; i >= 0 && static_cast<int>(out.minus.size()) < count; --i)
        out.minus.push_back(rbar.iterate(g, reverse_path(g, eps[i]), j));
  } else {
    check(pieces.size() >= 2, errc::internal, "unexpected one-piece splitting");
    out.s = static_cast<int>(pieces.size()) - 1;
    Path eps_first = pieces.front();  // eps'_0
    Path eps_last = pieces.back();    // eps'_s
    Path eps0 = tighten(g, concat(g, rbar.map(g, eps_last), eps_first));
    eps.push_back(eps0);
    for (int i = 1; i < out.s; ++i) eps.push_back(pieces[i]);
    out.plus.push_back(eps_first);
    for (int i = 1; i < out.s && static_cast<int>(out.plus.size()) < count; ++i)
      out.plus.push_back(pieces[i]);
    for (int j = 1; static_cast<int>(out.plus.size()) < count; ++j)
      for (int i = 0; i < out.s && static_cast<int>(out.plus.size()) < count; ++i)
        out.plus.push_back(a.rep.f_iter(eps[i], j));
    out.minus.push_back(rbar.map(g, reverse_path(g, eps_last)));
    for (int j = 1; static_cast<int>(out.minus.size()) < count; ++j)
      for (int i = out.s - 1; i >= 0 && static_cast<int>(out.minus.size()) < count; --i)
        out.minus.push_back(rbar.iterate(g, reverse_path(g, eps[i]), j));
  }
  out.plus.resize(count);
  out.minus.resize(count);
  for (int i = 1; i + out.s < count; ++i) {
    check(out.plus[i + out.s].edges == a.rep.f(out.plus[i]).edges, errc::internal,
          "tail semiperiodicity failed on the plus side");
    check(out.minus[i + out.s].edges == rbar.map(g, out.minus[i]).edges, errc::internal,
          "tail semiperiodicity failed on the minus side");
  }
  return out;
}

namespace {

std::vector<int> flat(const std::vector<Path>& ps) {
  std::vector<int> out;
  for (auto& p : ps) out.insert(out.end(), p.edges.begin(), p.edges.end());
  return out;
}

} // namespace

BalloonReport balloon_checks(const Analyzed& a, int ea, int eb, int window) {
  const Graph& g = a.rep.graph;
  BalloonReport rep;
  int da = a.filt.degree[ea], db = a.filt.degree[eb];
  check(da == db && da >= 1, errc::domain, "balloon checks need two edges of one stratum class");
  int count = std::max(8, window / 2);
  Tails ta = tails(a, ea, count), tb = tails(a, eb, count);
  auto sa_p = flat(ta.plus), sb_p = flat(tb.plus), sb_m = flat(tb.minus);
  auto clip = [&](std::vector<int>& v) {
    if (static_cast<int>(v.size()) > window) v.resize(window);
  };
  clip(sa_p);
  clip(sb_p);
  clip(sb_m);
  auto common_run = [](const std::vector<int>& x, size_t i, const std::vector<int>& y, size_t j) {
    size_t n = 0;
    while (i + n < x.size() && j + n < y.size() && x[i + n] == y[j + n]) ++n;
    return n;
  };
  if (da == 1) {
    long long K = static_cast<long long>(a.linear.at(ea).mu.len()) * a.linear.at(eb).mu.len();
    for (size_t i = 0; i < sa_p.size(); ++i)
      for (size_t j = 0; j < sb_p.size(); ++j)
        if (static_cast<long long>(common_run(sa_p, i, sb_p, j)) >= K) {
          ++rep.overlaps_checked;
          if (a.linear.at(ea).mu.edges != a.linear.at(eb).mu.edges) {
            rep.pass = false;
            rep.counterexample = "S+ overlap of length >= K without mu_a = mu_b";
            return rep;
          }
        }
    Path rmub = reverse_path(g, a.linear.at(eb).mu);
    for (size_t i = 0; i < sa_p.size(); ++i)
      for (size_t j = 0; j < sb_m.size(); ++j)
        if (static_cast<long long>(common_run(sa_p, i, sb_m, j)) >= K) {
          ++rep.overlaps_checked;
          bool cyc = false;
          for (int r = 0; r < rmub.len(); ++r)
            if (rotate(g, rmub, r).edges == a.linear.at(ea).mu.edges) cyc = true;
          if (!cyc) {
            rep.pass = false;
            rep.counterexample = "S+/S- overlap without reverse cyclic permutation";
            return rep;
          }
        }
    return rep;
  }
  // non-linear: overlaps measured in complete splitting pieces
  long long K = static_cast<long long>(ta.s) * tb.s + std::min(ta.s, tb.s) + 1;
  // (1): K aligned complete pieces shared between S_a^+ and S_b^+ force a = b
  for (size_t pi = 0; pi + K < ta.plus.size(); ++pi)
    for (size_t pj = 0; pj + K < tb.plus.size(); ++pj) {
      bool match = true;
      for (long long t = 0; t < K && match; ++t)
        if (ta.plus[pi + t].edges != tb.plus[pj + t].edges) match = false;
      if (!match) continue;
      ++rep.overlaps_checked;
      if (ea != eb) {
        rep.pass = false;
        rep.counterexample = "non-linear S+ overlap of K pieces across distinct edges";
        return rep;
      }
    }
  // (3): S_a^+ against S_b^- can never share K complete pieces
  for (size_t pi = 0; pi + K < ta.plus.size(); ++pi) {
    std::vector<int> run =
        flat(std::vector<Path>(ta.plus.begin() + pi, ta.plus.begin() + pi + K));
    if (run.empty()) continue;
    for (size_t j = 0; j + run.size() <= sb_m.size(); ++j) {
      bool match = true;
      for (size_t t = 0; t < run.size() && match; ++t)
        if (sb_m[j + t] != run[t]) match = false;
      if (match) {
        rep.pass = false;
        rep.counterexample = "S+/S- share K complete pieces in a non-linear stratum";
        return rep;
      }
    }
  }
  return rep;
}

std::optional<long long> f_stable_period(const Analyzed& a, const LabelledGraph& h,
                                         long long cap,
                                         const std::vector<int>& exclude_geoms) {
  const Graph& g = a.rep.graph;
  std::vector<char> skip(h.g.geoms(), 0);
  for (int ge : exclude_geoms) skip[ge] = 1;
  std::vector<int> oriented;
  for (int ge = 0; ge < h.g.geoms(); ++ge) {
    if (skip[ge]) continue;
    oriented.push_back(forward(h.lab[2 * ge]) ? 2 * ge : 2 * ge + 1);
  }
  for (int d : oriented) {
    Lift lf = lift_path(h, h.g.init[d], a.rep.f_image(h.lab[d]));
    if (!lf.total) return std::nullopt;
  }
  // f^q(e) = e . u . f(u) ... f^{q-1}(u): keep the flat image per needed label
  // and append one block per step, so the work stays linear in the image size
  std::set<int> needed;
  for (int d : oriented) needed.insert(geom(h.lab[d]));
  IterCache blocks;
  std::map<int, Path> flat;  // label geometric -> f^q(e) along the orientation
  for (int ge : needed) flat[ge] = make_path(g, {2 * ge});
  for (long long q = 1; q <= cap; ++q) {
    for (int ge : needed) {
      if (a.rep.fmap.fixed(ge)) continue;
      Path more = fast_iterate(a.rep, *a.rep.u(ge), q - 1, blocks);
      flat[ge] = concat(g, flat[ge], more);
      check(is_tight(flat[ge]), errc::internal, "suffix stream not a splitting");
    }
    bool all = true;
    for (int d : oriented) {
      int bge = geom(h.lab[d]);
      Path img = forward(h.lab[d]) ? flat[bge] : reverse_path(g, flat[bge]);
      Lift lf = lift_path(h, h.g.init[d], img);
      if (!lf.total || terminal(h.g, lf.path) != h.g.term(d)) {
        FG_TRACE("[stab] q=%lld edge d=%d label=%s total=%d at=%d/%d\n", q, d,
                 g.ename(h.lab[d]).c_str(), (int)lf.total, lf.failed_at, img.len());
        all = false;
        break;
      }
    }
    if (all) return q;
  }
  return std::nullopt;
}

Path witness_circuit(const Analyzed& a) {
  const Graph& g = a.rep.graph;
  int eh = 2 * (a.rep.strata() - 1);
  if (g.term(eh) == g.init[eh]) return make_path(g, {eh});
  struct Key {
    int v, last;
    bool operator<(const Key& o) const { return std::tie(v, last) < std::tie(o.v, o.last); }
  };
  std::map<Key, Key> prev;
  std::vector<Key> queue{{g.term(eh), eh}};
  prev[{g.term(eh), eh}] = {-1, -1};
  auto st = g.stars();
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    Key s = queue[qi];
    for (int d : st[s.v]) {
      if (d == rev(s.last) || d == eh) continue;
      Key key{g.term(d), d};
      if (prev.count(key)) continue;
      prev[key] = s;
      if (g.term(d) == g.init[eh] && d != rev(eh)) {
        std::vector<int> back;
        Key cur = key;
        while (prev[cur].v >= 0) {
          back.push_back(cur.last);
          cur = prev[cur];
        }
        std::reverse(back.begin(), back.end());
        std::vector<int> edges{eh};
        edges.insert(edges.end(), back.begin(), back.end());
        Path out = make_path(g, edges);
        check(cyclically_reduced(g, out), errc::internal, "witness circuit not reduced");
        return out;
      }
      queue.push_back(key);
    }
  }
  fail(errc::internal, "no circuit through the top edge; graph not minimal?");
}

// --------------------------------------------------------------------------
// cover monodromy dynamics

namespace {

struct CoverPerms {
  std::vector<std::vector<int>> fiber;      // per base vertex
  std::vector<int> pos;                     // carrier vertex -> fiber position
  std::vector<std::vector<int>> edge_perm;  // per base geometric: iota pos -> tau pos
};

CoverPerms make_cover_perms(const LabelledGraph& cov) {
  CoverPerms cp;
  const Graph& b = cov.base;
  cp.fiber.resize(b.nv);
  cp.pos.assign(cov.g.nv, -1);
  for (int v = 0; v < cov.g.nv; ++v) {
    int bv = cov.vlabel(v);
    cp.pos[v] = static_cast<int>(cp.fiber[bv].size());
    cp.fiber[bv].push_back(v);
  }
  cp.edge_perm.assign(b.geoms(), {});
  for (int bg = 0; bg < b.geoms(); ++bg)
    cp.edge_perm[bg].assign(cp.fiber[b.init[2 * bg]].size(), -1);
  for (int ge = 0; ge < cov.g.geoms(); ++ge) {
    int d = forward(cov.lab[2 * ge]) ? 2 * ge : 2 * ge + 1;
    int bg = geom(cov.lab[d]);
    cp.edge_perm[bg][cp.pos[cov.g.init[d]]] = cp.pos[cov.g.term(d)];
  }
  return cp;
}

int eval_word(const std::vector<std::vector<int>>& tuple, const Path& w, int pos) {
  for (int d : w.edges) {
    int bg = geom(d);
    if (forward(d)) {
      pos = tuple[bg][pos];
    } else {
      const auto& t = tuple[bg];
      int found = -1;
      for (size_t i = 0; i < t.size(); ++i)
        if (t[i] == pos) {
          found = static_cast<int>(i);
          break;
        }
      pos = found;
    }
  }
  return pos;
}

} // namespace

std::optional<long long> cover_fixing_power(const Analyzed& a, const LabelledGraph& cover,
                                            long long cap) {
  check(is_cover(cover), errc::domain, "cover_fixing_power needs a cover");
  const Graph& g = a.rep.graph;
  CoverPerms cp = make_cover_perms(cover);
  std::vector<std::vector<int>> tuple = cp.edge_perm;
  std::map<std::vector<std::vector<int>>, long long> seen;
  for (long long q = 1; q <= cap; ++q) {
    std::vector<std::vector<int>> next(g.geoms());
    for (int ge = 0; ge < g.geoms(); ++ge) {
      Path w = a.rep.f_image(2 * ge);
      next[ge].resize(cp.edge_perm[ge].size());
      for (size_t p = 0; p < next[ge].size(); ++p)
        next[ge][p] = eval_word(tuple, w, static_cast<int>(p));
    }
    tuple = std::move(next);
    if (tuple == cp.edge_perm) return q;
    auto it = seen.find(tuple);
    if (it != seen.end()) return std::nullopt;
    seen[tuple] = q;
  }
  return std::nullopt;
}

IntMatrix cover_matrix(const Analyzed& a, const LabelledGraph& cover, long long k) {
  const Graph& g = a.rep.graph;
  std::vector<Path> img(g.geoms());
  for (int ge = 0; ge < g.geoms(); ++ge)
    img[ge] = a.rep.f_iter(make_path(g, {2 * ge}), static_cast<int>(k));
  CycleBasis basis = cycle_basis(cover.g, 0);
  auto lift_image = [&](int d) {
    int bge = geom(cover.lab[d]);
    Path base_img = forward(cover.lab[d]) ? img[bge] : reverse_path(g, img[bge]);
    Lift lf = lift_path(cover, cover.g.init[d], base_img);
    check(lf.total && terminal(cover.g, lf.path) == cover.g.term(d), errc::internal,
          "lift of f^k does not fix the cover's vertices");
    return lf.path;
  };
  return induced_matrix(cover.g, basis, lift_image);
}


// --------------------------------------------------------------------------
// subgraph components, class detachment, and the lower-cover extension

namespace {

struct SubBase {
  Graph g;
  std::vector<int> v_to_sub, g_to_sub;  // G ids -> sub ids (-1 outside)
  std::vector<int> sub_to_v, sub_to_g;
};

// connected component of the subgraph spanned by geometric edges < lim that
// contains the seed vertex
SubBase component_below(const Graph& G, int lim, int seed) {
  SubBase sb;
  sb.v_to_sub.assign(G.nv, -1);
  sb.g_to_sub.assign(G.geoms(), -1);
  std::vector<int> stack{seed};
  std::vector<char> seen(G.nv, 0);
  seen[seed] = 1;
  auto st = G.stars();
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int d : st[v]) {
      if (geom(d) >= lim) continue;
      int w = G.term(d);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  for (int v = 0; v < G.nv; ++v)
    if (seen[v]) {
      sb.v_to_sub[v] = sb.g.add_vertex();
      sb.sub_to_v.push_back(v);
    }
  for (int ge = 0; ge < std::min(lim, G.geoms()); ++ge) {
    int u = G.init[2 * ge], w = G.term(2 * ge);
    if (sb.v_to_sub[u] < 0 || sb.v_to_sub[w] < 0) continue;
    sb.g_to_sub[ge] = geom(sb.g.add_edge(sb.v_to_sub[u], sb.v_to_sub[w], G.enames[ge]));
    sb.sub_to_g.push_back(ge);
  }
  return sb;
}

Path path_to_sub(const SubBase& sb, const Path& p) {
  if (p.trivial()) return Path::trivial_at(sb.v_to_sub[p.at]);
  std::vector<int> e;
  for (int d : p.edges) {
    int s = sb.g_to_sub[geom(d)];
    check(s >= 0, errc::internal, "path leaves the subgraph component");
    e.push_back(2 * s + (d & 1));
  }
  return make_path(sb.g, std::move(e));
}

LabelledGraph labels_up(const LabelledGraph& h, const SubBase& sb, const Graph& G) {
  LabelledGraph out;
  out.g = h.g;
  out.base = G;
  out.lab.resize(h.lab.size());
  for (size_t d = 0; d < h.lab.size(); ++d)
    out.lab[d] = 2 * sb.sub_to_g[geom(h.lab[d])] + (h.lab[d] & 1);
  out.ipt = h.ipt;
  out.tpt = h.tpt;
  return out;
}

// induced edge map of f on a lower subgraph (which f preserves)
std::function<Path(int)> sub_image(const Analyzed& a, const SubBase& sb) {
  return [&a, &sb](int d) {
    Path img = a.rep.f_image(2 * sb.sub_to_g[geom(d)] + (d & 1));
    return path_to_sub(sb, img);
  };
}

// move the label-forward initial point of every carrier edge whose label is in
// [cut_lo, cut_hi] to a fresh tip; returns carrier geometric edge -> tip
std::map<int, int> detach_class(LabelledGraph& h, int cut_lo, int cut_hi) {
  std::map<int, int> tips;
  int n = h.g.geoms();
  for (int ge = 0; ge < n; ++ge) {
    int bl = geom(h.lab[2 * ge]);
    if (bl < cut_lo || bl > cut_hi) continue;
    int dd = forward(h.lab[2 * ge]) ? 2 * ge : 2 * ge + 1;
    int tip = h.g.add_vertex();
    h.g.init[dd] = tip;
    tips[ge] = tip;
  }
  return tips;
}

// completes every component of the part of h labelled strictly below lim to a
// cover of the matching lower base component; singletons are completed only
// when a forward non-fixed edge arrives. Already covering components stay.
LabelledGraph extend_below(const Analyzed& a, const LabelledGraph& h, int lim) {
  const Graph& G = a.rep.graph;
  int nv = h.g.nv;
  // components over lower edges
  std::vector<int> comp(nv);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (int ge = 0; ge < h.g.geoms(); ++ge)
    if (geom(h.lab[2 * ge]) < lim) comp[find(h.g.init[2 * ge])] = find(h.g.term(2 * ge));
  std::map<int, std::vector<int>> members;
  for (int v = 0; v < nv; ++v) members[find(v)].push_back(v);
  std::map<int, std::vector<int>> comp_edges;
  for (int ge = 0; ge < h.g.geoms(); ++ge)
    if (geom(h.lab[2 * ge]) < lim) comp_edges[find(h.g.init[2 * ge])].push_back(ge);
  // which components need completion
  std::set<int> want;
  for (auto& [root, vs] : members) {
    if (!comp_edges[root].empty()) {
      want.insert(root);
      continue;
    }
    int v = vs[0];
    bool arrival = false;
    for (int d = 0; d < h.g.dedges(); ++d)
      if (h.g.term(d) == v && forward(h.lab[d]) && !a.rep.fmap.fixed(geom(h.lab[d])))
        arrival = true;
    if (arrival) want.insert(root);
  }
  // per component: build sub carrier over its lower base component
  struct Pending {
    SubBase sb;
    LabelledGraph sub;            // carrier over sb.g
    std::vector<int> local_to_h;  // local carrier vertex -> h vertex
    bool already_cover = false;
    bool singleton = false;
    int seed_sub = -1;            // for singletons: the base vertex to sit on
  };
  std::vector<Pending> jobs;
  int max_fiber = 0;
  for (int root : want) {
    Pending job;
    int seedv = h.vlabel(members[root][0]);
    job.sb = component_below(G, lim, seedv);
    job.singleton = comp_edges[root].empty();
    std::map<int, int> local;
    for (int v : members[root]) {
      local[v] = job.sub.g.add_vertex();
      job.local_to_h.push_back(v);
    }
    job.sub.base = job.sb.g;
    for (int ge : comp_edges[root]) {
      int d = 2 * ge;
      int nd = job.sub.g.add_edge(local[h.g.init[d]], local[h.g.term(d)]);
      job.sub.lab.resize(job.sub.g.dedges());
      int s = job.sb.g_to_sub[geom(h.lab[d])];
      check(s >= 0, errc::internal, "component crosses base components");
      job.sub.lab[nd] = 2 * s + (h.lab[d] & 1);
      job.sub.lab[rev(nd)] = rev(job.sub.lab[nd]);
    }
    if (job.singleton) {
      job.seed_sub = job.sb.v_to_sub[seedv];
      jobs.push_back(std::move(job));
      continue;
    }
    check(is_immersion(job.sub), errc::internal, "lower component is not an immersion");
    job.already_cover = is_cover(job.sub);
    if (!job.already_cover) {
      std::vector<int> fib(job.sb.g.nv, 0);
      for (int v = 0; v < job.sub.g.nv; ++v) ++fib[job.sub.vlabel(v)];
      for (int x : fib) max_fiber = std::max(max_fiber, x);
      max_fiber = std::max(max_fiber, 1);
    }
    jobs.push_back(std::move(job));
  }
  int sheets = static_cast<int>(pow2_at_least(std::max(max_fiber, 1)));
  LabelledGraph out = h;
  for (auto& job : jobs) {
    if (job.already_cover) continue;
    if (job.singleton) {
      // one-sheeted cover: a copy of the lower base component at the vertex
      std::vector<int> to_out(job.sb.g.nv, -1);
      to_out[job.seed_sub] = job.local_to_h[0];
      for (int v = 0; v < job.sb.g.nv; ++v)
        if (to_out[v] < 0) to_out[v] = out.g.add_vertex();
      for (int ge = 0; ge < job.sb.g.geoms(); ++ge) {
        int d = 2 * ge;
        int nd = out.g.add_edge(to_out[job.sb.g.init[d]], to_out[job.sb.g.term(d)]);
        out.lab.resize(out.g.dedges());
        out.lab[nd] = 2 * job.sb.sub_to_g[ge];
        out.lab[rev(nd)] = 2 * job.sb.sub_to_g[ge] + 1;
      }
      continue;
    }
    auto [cov, cert] = complete_to_cover_cyclic(job.sub, sheets);
    (void)cert;
    // splice the new vertices and edges into out
    std::vector<int> to_out(cov.g.nv, -1);
    for (size_t i = 0; i < job.local_to_h.size(); ++i) to_out[i] = job.local_to_h[i];
    for (int v = static_cast<int>(job.local_to_h.size()); v < cov.g.nv; ++v)
      to_out[v] = out.g.add_vertex();
    for (int ge = job.sub.g.geoms(); ge < cov.g.geoms(); ++ge) {
      int d = 2 * ge;
      int nd = out.g.add_edge(to_out[cov.g.init[d]], to_out[cov.g.term(d)]);
      out.lab.resize(out.g.dedges());
      out.lab[nd] = 2 * job.sb.sub_to_g[geom(cov.lab[d])] + (cov.lab[d] & 1);
      out.lab[rev(nd)] = rev(out.lab[nd]);
    }
  }
  check(is_immersion(out), errc::internal, "lower extension broke the immersion");
  return out;
}

} // namespace

LabelledGraph tree_extend(const Analyzed& a, const LabelledGraph& tree) {
  check(is_immersion(tree), errc::domain, "tree_extend needs an immersion");
  check(tree.g.connected() && tree.g.geoms() == tree.g.nv - 1, errc::domain,
        "tree_extend needs a tree");
  int h = 0;
  for (int ge = 0; ge < tree.g.geoms(); ++ge) h = std::max(h, geom(tree.lab[2 * ge]) + 1);
  check(h > 0, errc::domain, "empty tree");
  int d = a.filt.degree[h - 1];
  check(d >= 2, errc::domain, "tree_extend needs a stratum of degree at least 2");
  LabelledGraph out = extend_below(a, tree, a.stratum_lo(d));
  auto period = f_stable_period(a, out);
  check(period.has_value(), errc::internal, "extended tree is not f-stable");
  return out;
}

// --------------------------------------------------------------------------
// carrier families

namespace {

// trajectory of monodromy tuples T_j for a cover over a sub base under the
// induced f; T_0 is the cover's own edge bijection tuple
struct TupleDyn {
  std::vector<std::vector<std::vector<int>>> traj;  // traj[j]
  long long transient = 0, period = 1;

  const std::vector<std::vector<int>>& at(long long j) const {
    if (j < static_cast<long long>(traj.size())) return traj[j];
    long long idx = transient + (j - transient) % period;
    return traj[idx];
  }
};

TupleDyn tuple_dynamics(const Analyzed& a, const SubBase& sb, const LabelledGraph& cov,
                        long long cap) {
  TupleDyn dyn;
  CoverPerms cp = make_cover_perms(cov);
  auto img = sub_image(a, sb);
  std::map<std::vector<std::vector<int>>, long long> seen;
  dyn.traj.push_back(cp.edge_perm);
  seen[cp.edge_perm] = 0;
  for (long long j = 1; j <= cap; ++j) {
    std::vector<std::vector<int>> next(sb.g.geoms());
    for (int ge = 0; ge < sb.g.geoms(); ++ge) {
      Path w = img(2 * ge);
      next[ge].resize(dyn.traj.back()[ge].size());
      for (size_t p = 0; p < next[ge].size(); ++p)
        next[ge][p] = eval_word(dyn.traj.back(), w, static_cast<int>(p));
    }
    auto it = seen.find(next);
    if (it != seen.end()) {
      dyn.transient = it->second;
      dyn.period = j - it->second;
      return dyn;
    }
    seen[next] = j;
    dyn.traj.push_back(std::move(next));
  }
  fail(errc::resource, "monodromy trajectory exceeded the stability cap");
}

} // namespace

LabelledGraph CarrierFamily::for_iterate(long long j) const {
  int k = static_cast<int>(j % orbit);
  LabelledGraph g = graphs[k];
  g.ipt = iotas[k];
  long long idx = j < static_cast<long long>(taus.size())
                      ? j
                      : tip_transient + (j - tip_transient) % tip_period;
  g.tpt = taus[idx];
  return g;
}

long long CarrierFamily::period() const {
  return lcmll(lcmll(orbit, tip_period), stability);
}

CarrierFamily carrier_for_piece(const Analyzed& a, const Path& piece, int cut_lo, int cut_hi,
                                const AptConfig& cfg) {
  const Graph& G = a.rep.graph;
  CarrierFamily fam;
  fam.piece = piece;
  int first = piece.edges.front(), last = piece.edges.back();
  bool starts = forward(first) && geom(first) >= cut_lo && geom(first) <= cut_hi;
  bool ends = !forward(last) && geom(last) >= cut_lo && geom(last) <= cut_hi;

  if (!starts && !ends) {
    // lower piece: cover of the lower component containing it, built on L(piece)
    SubBase sb = component_below(G, cut_lo, initial(piece));
    Path psub = path_to_sub(sb, piece);
    auto [cov, cert] = complete_to_cover_cyclic(line(sb.g, psub));
    (void)cert;
    TupleDyn dyn = tuple_dynamics(a, sb, cov, cfg.stability_cap);
    CoverPerms cp = make_cover_perms(cov);
    LabelledGraph up = labels_up(cov, sb, G);
    up.ipt = 0;              // line start kept its id
    up.tpt = psub.len();     // line end likewise
    fam.graphs = {up};
    fam.iotas = {0};
    fam.tip_transient = dyn.transient;
    fam.tip_period = dyn.period;
    long long horizon = dyn.transient + dyn.period;
    for (long long j = 0; j < horizon; ++j) {
      int pos = eval_word(dyn.at(j), psub, cp.pos[0]);
      fam.taus.push_back(cp.fiber[sb.v_to_sub[terminal(G, piece)]][pos]);
    }
    // stability: tuple returns to the identity relation = cover edge tuple
    long long st = 1;
    for (long long j = 1; j <= dyn.transient + dyn.period; ++j)
      if (dyn.at(j) == dyn.at(0)) {
        st = j;
        break;
      }
    fam.stability = st;
    return fam;
  }

  if (!(starts && ends && geom(first) == geom(last))) {
    // in-graph carrier: the component through the class, detached everywhere
    int seed = starts ? G.init[first] : G.init[rev(last)];
    SubBase sb = component_below(G, cut_hi + 1, seed);
    LabelledGraph carrier;
    carrier.base = G;
    carrier.g = sb.g;
    carrier.lab.resize(sb.g.dedges());
    for (int ge = 0; ge < sb.g.geoms(); ++ge) {
      carrier.lab[2 * ge] = 2 * sb.sub_to_g[ge];
      carrier.lab[2 * ge + 1] = 2 * sb.sub_to_g[ge] + 1;
    }
    std::map<int, int> tips = detach_class(carrier, cut_lo, cut_hi);
    int iota = -1;
    if (starts) {
      int ge_local = -1;
      for (auto& [lge, tip] : tips)
        if (sb.sub_to_g[lge] == geom(first)) ge_local = lge, iota = tip;
      check(ge_local >= 0 && iota >= 0, errc::internal, "class edge missing from its component");
    } else {
      iota = sb.v_to_sub[initial(piece)];
    }
    Lift lf = lift_path(carrier, iota, piece);
    check(lf.total, errc::internal, "piece does not lift across its detached carrier");
    fam.graphs = {carrier};
    fam.iotas = {iota};
    fam.taus = {terminal(carrier.g, lf.path)};
    fam.tip_transient = 0;
    fam.tip_period = 1;
    auto st = f_stable_period(a, carrier, cfg.stability_cap);
    check(st.has_value(), errc::internal, "detached carrier is not f-stable");
    fam.stability = *st;
    return fam;
  }

  // type (i) with matching boundary edge: residual finiteness machinery
  int ea = geom(first);
  SubBase sb = component_below(G, cut_hi + 1, G.init[first]);
  Path psub = path_to_sub(sb, piece);
  auto [cover0, cert0] = complete_to_cover_cyclic(line(sb.g, psub));
  int index = cert0.sheets;
  check(index <= cfg.subgroup_index_bound, errc::resource,
        "subgroup index " + std::to_string(index) + " exceeds the configured bound");
  // the piece must lift open at the base point
  cover0.ipt = cover0.tpt = 0;
  {
    Lift lf = lift_path(cover0, 0, psub);
    check(lf.total && !lf.closed, errc::internal,
          "completion failed to separate the piece from the subgroup");
  }
  // phi orbit of the subgroup via image cores until the canonical code repeats
  auto img = sub_image(a, sb);
  std::vector<LabelledGraph> covers;
  std::vector<LabelledGraph> cores;
  cores.push_back(trim_core(cover0));
  auto code0 = canonical_code(cores[0]);
  for (;;) {
    covers.push_back(complete_to_cover_cyclic(cores.back(), index).first);
    covers.back().ipt = covers.back().tpt = cores.back().ipt;
    LabelledGraph next = map_core(cores.back(), img);
    if (canonical_code(next) == code0) break;
    cores.push_back(next);
    check(static_cast<int>(cores.size()) <= cfg.stability_cap, errc::resource,
          "subgroup orbit exceeded the stability cap");
  }
  int s = static_cast<int>(covers.size());
  fam.orbit = s;
  // per cover: tuple dynamics, detached graphs, tip bookkeeping
  std::vector<TupleDyn> dyns;
  std::vector<CoverPerms> perms;
  std::vector<std::vector<int>> tip_of_iota_pos(s);  // fiber pos of old iota -> tip vertex
  long long Tmax = 0, Plcm = 1;
  int sub_ea = sb.g_to_sub[ea];
  for (int k = 0; k < s; ++k) {
    dyns.push_back(tuple_dynamics(a, sb, covers[k], cfg.stability_cap));
    perms.push_back(make_cover_perms(covers[k]));
    Tmax = std::max(Tmax, dyns[k].transient);
    Plcm = lcmll(Plcm, dyns[k].period);
    LabelledGraph det = labels_up(covers[k], sb, G);
    int base_vertex = covers[k].ipt;
    // record, per iota-fiber position of the class edge, its future tip
    std::vector<int> by_pos(index, -1);
    std::vector<std::pair<int, int>> pending;  // (carrier geom, old iota)
    for (int ge = 0; ge < covers[k].g.geoms(); ++ge) {
      int dd = forward(covers[k].lab[2 * ge]) ? 2 * ge : 2 * ge + 1;
      if (geom(covers[k].lab[dd]) != sub_ea) continue;
      pending.push_back({ge, covers[k].g.init[dd]});
    }
    std::map<int, int> tips = detach_class(det, cut_lo, cut_hi);
    for (auto& [ge, old_iota] : pending) {
      auto it = tips.find(ge);
      check(it != tips.end(), errc::internal, "class lift was not detached");
      by_pos[perms[k].pos[old_iota]] = it->second;
    }
    tip_of_iota_pos[k] = by_pos;
    det.ipt = by_pos[perms[k].pos[base_vertex]];
    det.tpt = -1;
    fam.graphs.push_back(det);
    fam.iotas.push_back(det.ipt);
    auto st = f_stable_period(a, det, cfg.stability_cap);
    check(st.has_value(), errc::internal, "detached orbit cover is not f-stable");
    fam.stability = lcmll(fam.stability, *st);
  }
  fam.tip_transient = Tmax;
  fam.tip_period = lcmll(static_cast<long long>(s), Plcm);
  long long horizon = fam.tip_transient + fam.tip_period;
  for (long long j = 0; j < horizon; ++j) {
    int k = static_cast<int>(j % s);
    int bpos = perms[k].pos[covers[k].ipt];
    int pos = eval_word(dyns[k].at(j), psub, bpos);
    int tip = tip_of_iota_pos[k][pos];
    check(tip >= 0 && tip != fam.iotas[k], errc::internal,
          "iterate " + std::to_string(j) + " closed up in its orbit cover");
    fam.taus.push_back(tip);
  }
  return fam;
}


// --------------------------------------------------------------------------
// the nonlinear Sigma construction

namespace {

struct ClassIndex {
  int r;        // class representative index into the tail piece list
  long long j;  // iterate
};

ClassIndex class_of(const Tails& t, long long i) {
  if (t.well_chosen) return {static_cast<int>(i % t.s), i / t.s};
  check(i >= 1, errc::internal, "chain index 0 has no class in the unaligned case");
  int r = static_cast<int>((i - 1) % t.s) + 1;
  return {r, (i - r) / t.s};
}

long long graph_diameter(const Graph& g) {
  long long best = 0;
  auto st = g.stars();
  for (int s = 0; s < g.nv; ++s) {
    std::vector<int> dist(g.nv, -1);
    std::vector<int> q{s};
    dist[s] = 0;
    for (size_t qi = 0; qi < q.size(); ++qi) {
      int v = q[qi];
      for (int d : st[v])
        if (dist[g.term(d)] < 0) {
          dist[g.term(d)] = dist[v] + 1;
          q.push_back(g.term(d));
        }
    }
    for (int x : dist) best = std::max<long long>(best, x);
  }
  return best;
}

bool piece_qualifies(const Analyzed& a, const Path& piece, int d) {
  if (d == 2) {
    if (a.degree_of_path(piece) != 1) return false;
    for (auto& u : separate(a, piece).units)
      if (!passive_kind(u.kind)) return true;
    return !is_nielsen(a.rep, piece);
  }
  if (a.degree_of_path(piece) != d - 1) return false;
  return classify_piece(a, piece, d - 1).type != PathUnitType::none;
}

} // namespace

SigmaBuild nonlinear_sigma(const Analyzed& a, const PathUnit& alpha, const AptConfig& cfg) {
  const Graph& G = a.rep.graph;
  check(alpha.type != PathUnitType::none, errc::domain, "nonlinear_sigma needs a path unit");
  int d = alpha.type == PathUnitType::iii ? a.filt.degree[alpha.b] : a.filt.degree[alpha.a];
  check(d >= 2, errc::domain, "nonlinear_sigma needs degree at least 2");
  // type (iii) is the reverse of a type (ii) construction
  if (alpha.type == PathUnitType::iii) {
    PathUnit ru = classify_piece(a, reverse_path(G, alpha.path), d);
    check(ru.type == PathUnitType::ii || ru.type == PathUnitType::i, errc::internal,
          "reverse of a type (iii) unit must start with a stratum edge");
    SigmaBuild sb = nonlinear_sigma(a, ru, cfg);
    std::swap(sb.sigma.ipt, sb.sigma.tpt);
    return sb;
  }
  // type (i): arrange h(u_a) >= h(u_b)
  if (alpha.type == PathUnitType::i &&
      a.rep.height(*a.rep.u(alpha.b)) > a.rep.height(*a.rep.u(alpha.a))) {
    PathUnit ru = classify_piece(a, reverse_path(G, alpha.path), d);
    SigmaBuild sb = nonlinear_sigma(a, ru, cfg);
    std::swap(sb.sigma.ipt, sb.sigma.tpt);
    return sb;
  }

  bool type_i = alpha.type == PathUnitType::i;
  const Path& ua = *a.rep.u(alpha.a);
  int ha = a.rep.height(ua);
  bool bside = type_i && a.rep.height(*a.rep.u(alpha.b)) == ha;
  Path alpha_prime = subpath(G, alpha.path, 1, alpha.path.len() - (type_i ? 1 : 0));
  int h_prime = a.rep.height(alpha_prime);
  bool cascade = d == 2 && h_prime > ha;

  int du = a.degree_of_path(ua);
  check(du == d - 1, errc::validation, "suffix degree does not match the stratum");
  int cut_lo, cut_hi;
  if (du == 1) {
    cut_lo = cut_hi = ha - 1;
  } else {
    cut_lo = a.stratum_lo(du);
    cut_hi = a.stratum_hi(du);
  }

  Tails ta = tails(a, alpha.a, cfg.tail_scan_bound);
  int s_a = ta.s;
  Tails tb;
  int s_b = s_a;
  if (bside) {
    tb = tails(a, alpha.b, cfg.tail_scan_bound);
    s_b = tb.s;
  }
  long long K = static_cast<long long>(s_a) * s_b + std::min(s_a, s_b) + 1;
  long long base_l;
  if (d == 2) {
    base_l = cascade ? alpha_prime.len() + std::max(s_a, s_b) + 1
                     : alpha_prime.len() + 2 * K + 1;
  } else {
    long long gcnt =
        alpha_prime.trivial() ? 0 : static_cast<long long>(canonical_f_split(a, alpha_prime).size());
    base_l = gcnt + 2 * K;
  }
  long long l = -1;
  for (long long i = std::max<long long>(base_l, 1); i + 1 < static_cast<long long>(ta.plus.size());
       ++i)
    if (piece_qualifies(a, ta.plus[i], d)) {
      l = i;
      break;
    }
  check(l > 0, errc::resource, "no qualifying tail piece within the scan bound");
  FG_TRACE("[sigma] d=%d l=%lld K=%lld bside=%d cascade=%d\n", d, l, K, (int)bside, (int)cascade);

  // T': the unit line with the four (or two) tail lines glued on
  auto concat_pieces = [&](const std::vector<Path>& ps, long long n) {
    Path out = ps[0];
    for (long long i = 1; i < n; ++i) out = concat(G, out, ps[i]);
    return out;
  };
  // The minus side carries the return leg of pieces [q-l-1, q-1], one more
  // piece than the outgoing leg. When the suffix is not well chosen the
  // outgoing legs of later windings re-enter through the innermost return
  // dart as well, so one further piece is materialised there.
  auto minus_line = [&](const Tails& t) {
    long long n = l + 1 + (t.well_chosen ? 0 : 1);
    Path w = t.minus[0];
    for (long long i = 1; i < n; ++i) w = concat(G, w, t.minus[i]);
    return line(G, w);
  };
  std::vector<LabelledGraph> parts{line(G, alpha.path), line(G, concat_pieces(ta.plus, l)),
                                   minus_line(ta)};
  std::vector<std::vector<GluePoint>> classes;
  classes.push_back({{0, 1}, {1, parts[1].ipt}, {2, parts[2].ipt}});
  if (bside) {
    parts.push_back(line(G, concat_pieces(tb.plus, l)));
    parts.push_back(minus_line(tb));
    classes.push_back({{0, alpha.path.len() - 1}, {3, parts[3].ipt}, {4, parts[4].ipt}});
  }
  std::vector<std::vector<int>> vm;
  LabelledGraph tprime = glue(parts, classes, &vm);
  struct Marks {
    int iota, tau, va, vap, vam, vb = -1, vbp = -1, vbm = -1;
  } mk;
  mk.iota = vm[0][0];
  mk.tau = vm[0][alpha.path.len()];
  mk.va = vm[0][1];
  mk.vap = vm[1][parts[1].tpt];
  mk.vam = vm[2][parts[2].tpt];
  if (bside) {
    mk.vb = vm[0][alpha.path.len() - 1];
    mk.vbp = vm[3][parts[3].tpt];
    mk.vbm = vm[4][parts[4].tpt];
  }
  auto [tree, ttrace] = fold(tprime);
  auto remap = [&](Marks& m, const std::vector<int>& map) {
    m.iota = map[m.iota];
    m.tau = map[m.tau];
    m.va = map[m.va];
    m.vap = map[m.vap];
    m.vam = map[m.vam];
    if (m.vb >= 0) {
      m.vb = map[m.vb];
      m.vbp = map[m.vbp];
      m.vbm = map[m.vbm];
    }
  };
  remap(mk, ttrace.vertex_map);
  check(tree.g.connected() && tree.g.geoms() == tree.g.nv - 1, errc::internal,
        "tail assembly did not fold to a tree");
  FG_TRACE("[sigma] tree nv=%d\n", tree.g.nv);

  // quadratic cases with h(alpha') above the suffix: balloon the strata between
  LabelledGraph tcur = tree;
  if (cascade) {
    for (int hh = h_prime; hh > ha; --hh) {
      int ge = hh - 1;
      if (a.filt.degree[ge] != 1) continue;
      const LinearData& ld = a.linear.at(ge);
      long long qi = pow2_at_least(graph_diameter(tcur.g) + 2 * ld.mu.len() + 1);
      std::vector<int> spots;
      for (int ce = 0; ce < tcur.g.geoms(); ++ce)
        if (geom(tcur.lab[2 * ce]) == ge)
          spots.push_back(forward(tcur.lab[2 * ce]) ? tcur.g.term(2 * ce)
                                                    : tcur.g.init[2 * ce]);
      if (spots.empty()) continue;
      std::vector<LabelledGraph> pieces{tcur};
      std::vector<std::vector<GluePoint>> cls;
      for (size_t i = 0; i < spots.size(); ++i) {
        pieces.push_back(circle(G, power(G, ld.mu, static_cast<int>(qi))));
        cls.push_back({{0, spots[i]}, {static_cast<int>(i) + 1, pieces.back().ipt}});
      }
      std::vector<std::vector<int>> vms;
      LabelledGraph glued = glue(pieces, cls, &vms);
      Marks m2 = mk;
      remap(m2, vms[0]);
      int old_geoms = tcur.g.geoms();
      auto [fd, tr] = fold(glued);
      // the old graph must embed: distinct old edges stay distinct
      std::set<int> img;
      for (int ce = 0; ce < old_geoms; ++ce) img.insert(geom(tr.edge_map[2 * ce]));
      check(static_cast<int>(img.size()) == old_geoms, errc::internal,
            "balloon stage folded the tree into itself");
      remap(m2, tr.vertex_map);
      mk = m2;
      tcur = fd;
    }
  }

  // lower covers; vertex ids survive the extension
  FG_TRACE("[sigma] extending below %d\n", cut_lo);
  LabelledGraph tstar = extend_below(a, tcur, cut_lo);
  FG_TRACE("[sigma] tstar nv=%d geoms=%d\n", tstar.g.nv, tstar.g.geoms());
  std::vector<int> exclude;
  for (int ce = 0; ce < tstar.g.geoms(); ++ce)
    if (a.filt.degree[geom(tstar.lab[2 * ce])] == d) exclude.push_back(ce);
  auto q0 = f_stable_period(a, tstar, cfg.stability_cap, exclude);
  FG_TRACE("[sigma] q0=%lld\n", q0 ? *q0 : -1);
  check(q0.has_value(), errc::internal, "T* is not f-stable below the unit stratum");

  // the stretching part for the chosen tail piece
  const Path& piece_l = ta.plus[l];
  long long q1;
  LabelledGraph lambda;
  if (d == 2) {
    auto [l0, l1] = lambda_constants(a);
    q1 = pow2_at_least(std::max(2 * std::max(l0, l1) + 4 * l0, 2LL * piece_l.len()) + 1);
    lambda = build_lambda(a, piece_l, q1, 2).lambda;
    FG_TRACE("[sigma] lambda q1=%lld geoms=%d\n", q1, lambda.g.geoms());
  } else {
    SigmaBuild inner = nonlinear_sigma(a, classify_piece(a, piece_l, d - 1), cfg);
    q1 = inner.q;
    lambda = inner.sigma;
  }

  // carrier families per splitting class
  std::map<int, CarrierFamily> famA, famB;
  long long fam_period = 1;
  auto family = [&](std::map<int, CarrierFamily>& store, const Tails& t, int r) -> CarrierFamily& {
    auto it = store.find(r);
    if (it == store.end()) {
      it = store.emplace(r, carrier_for_piece(a, t.plus[r], cut_lo, cut_hi, cfg)).first;
      fam_period = lcmll(fam_period, it->second.period());
    }
    return it->second;
  };
  // touch every class so the periods are known before q is fixed
  for (int r = ta.well_chosen ? 0 : 1; r < (ta.well_chosen ? s_a : s_a + 1); ++r)
    family(famA, ta, r);
  if (bside)
    for (int r = tb.well_chosen ? 0 : 1; r < (tb.well_chosen ? s_b : s_b + 1); ++r)
      family(famB, tb, r);

  FG_TRACE("[sigma] fam_period=%lld\n", fam_period);
  // every winding advances the tail pieces by q/s_a (resp. q/s_b) iterations,
  // so the stability and carrier periods must divide q/s, not merely q
  long long unit = lcmll(lcmll(*q0, q1), fam_period) * s_a * s_b;
  long long q = unit;
  while (q < 2 * l + 3) q += unit;

  // chains
  auto build_chain = [&](std::map<int, CarrierFamily>& store, const Tails& t, long long from,
                         long long to) {
    std::vector<LabelledGraph> links;
    for (long long i = from; i <= to; ++i) {
      ClassIndex ci = class_of(t, i);
      links.push_back(family(store, t, ci.r).for_iterate(ci.j));
    }
    return combine(links);
  };
  FG_TRACE("[sigma] q=%lld building chains\n", q);
  LabelledGraph chain_a = build_chain(famA, ta, l + 1, q - l - 2);
  std::vector<LabelledGraph> sparts{tstar, lambda, chain_a};
  std::vector<std::vector<GluePoint>> scls;
  scls.push_back({{0, mk.vap}, {1, lambda.ipt}});
  scls.push_back({{1, lambda.tpt}, {2, chain_a.ipt}});
  scls.push_back({{2, chain_a.tpt}, {0, mk.vam}});
  if (bside) {
    LabelledGraph chain_b = build_chain(famB, tb, l, q - l - 2);
    sparts.push_back(chain_b);
    scls.push_back({{0, mk.vbp}, {3, chain_b.ipt}});
    scls.push_back({{3, chain_b.tpt}, {0, mk.vbm}});
  }
  std::vector<std::vector<int>> svm;
  LabelledGraph sigma = glue(sparts, scls, &svm);
  sigma.ipt = svm[0][mk.iota];
  sigma.tpt = svm[0][mk.tau];
  FG_TRACE("[sigma] marks: iota=%d tau=%d va=%d vap=%d vam=%d vb=%d vbp=%d vbm=%d\n",
           svm[0][mk.iota], svm[0][mk.tau], svm[0][mk.va], svm[0][mk.vap], svm[0][mk.vam],
           mk.vb >= 0 ? svm[0][mk.vb] : -1, mk.vb >= 0 ? svm[0][mk.vbp] : -1,
           mk.vb >= 0 ? svm[0][mk.vbm] : -1);
  FG_TRACE("[sigma] glued nv=%d geoms=%d\n", sigma.g.nv, sigma.g.geoms());
  check(is_immersion(sigma), errc::internal, "Sigma assembly is not an immersion");
  check(sigma.ipt != sigma.tpt, errc::internal, "Sigma endpoints coincide");
  {
    auto st = sigma.g.stars();
    check(st[sigma.ipt].size() == 1, errc::internal, "Sigma initial point is not valence 1");
    if (type_i)
      check(st[sigma.tpt].size() == 1, errc::internal, "Sigma terminal point is not valence 1");
  }

  SigmaBuild out;
  out.sigma = sigma;
  out.q = q;
  out.degree = d;
  std::vector<long long> labs;
  IterCache ic;
  const long long len_budget = 60000000;
  for (int k = 0; k <= cfg.k_max_nonlinear; ++k) {
    if (k > d + 2 && !out.samples.empty() &&
        out.samples.back().l > len_budget / (2 * k)) break;
    Path it = fast_iterate(a.rep, alpha.path, k * q, ic);
    Lift lf = lift_path(sigma, sigma.ipt, it);
    FG_TRACE("[sigma] sample k=%d len=%d total=%d failed_at=%d\n", k, it.len(), (int)lf.total,
             lf.failed_at);
    if (!lf.total && getenv("FG_TRACE")) {
      int at = lf.failed_at;
      fprintf(stderr, "[sigma] needed %s, stuck at carrier vertex %d after %s...\n",
              a.rep.graph.ename(it.edges[at]).c_str(), terminal(sigma.g, lf.path),
              show(a.rep.graph, subpath(a.rep.graph, it, std::max(0, at - 12), at)).c_str());
    }
    check(lf.total && terminal(sigma.g, lf.path) == sigma.tpt, errc::internal,
          "Sigma does not carry the f^{kq} iterate (k=" + std::to_string(k) + ")");
    Measure m = measure(sigma.g, lf.path);
    out.samples.push_back({k, m.l, m.l_ab});
    labs.push_back(m.l_ab);
  }
  out.fit_lab = poly_degree_fit(labs);
  if (cfg.k_max_nonlinear >= 4)
    check(out.fit_lab.has_value() && *out.fit_lab == d, errc::internal,
          "Sigma abelianised growth fit " +
              (out.fit_lab ? std::to_string(*out.fit_lab) : std::string("none")) +
              " does not match degree " + std::to_string(d));
  return out;
}

// --------------------------------------------------------------------------
// the main theorem pipeline

std::string MainCertificate::json() const {
  std::ostringstream o;
  o << "{\"eta\": " << eta;
  if (pipeline_sheets) o << ", \"sheets\": " << *pipeline_sheets;
  if (pipeline_degree) o << ", \"homology_degree\": " << *pipeline_degree;
  if (pipeline_k) o << ", \"k\": " << pipeline_k;
  o << ", \"sheet_bound_exceeded\": " << (sheet_bound_exceeded ? "true" : "false");
  if (fallback_sheets) o << ", \"fallback_sheets\": " << *fallback_sheets;
  if (fallback_degree) o << ", \"fallback_degree\": " << *fallback_degree;
  o << ", \"q\": " << apt.q << ", \"apt\": " << apt.json() << "}";
  return o.str();
}

MainCertificate verify_main_theorem(const Analyzed& a, const AptConfig& cfg) {
  const Graph& G = a.rep.graph;
  MainCertificate cert;
  cert.eta = a.filt.eta;
  if (cert.eta == 0) {
    // identity-like representative: the base graph certifies itself
    LabelledGraph self;
    self.base = G;
    self.g = G;
    self.lab.resize(G.dedges());
    for (int dd = 0; dd < G.dedges(); ++dd) self.lab[dd] = dd;
    self.ipt = self.tpt = 0;
    cert.apt.sigma = self;
    cert.apt.vtilde = 0;
    cert.apt.bounded = true;
    cert.apt.fit_l = cert.apt.fit_lab = 0;
    cert.pipeline_sheets = 1;
    cert.pipeline_k = cover_fixing_power(a, self).value_or(1);
    cert.pipeline_degree = matrix_growth_class(cover_matrix(a, self, cert.pipeline_k)).degree;
    cert.fallback_sheets = 1;
    cert.fallback_degree = cert.pipeline_degree;
    return cert;
  }
  Path sigma_circ = witness_circuit(a);
  if (cert.eta == 1) {
    cert.apt = linear_apt(a, sigma_circ, cfg);
  } else {
    Path rho = well_chosen(a, sigma_circ);
    int etop = 2 * (a.rep.strata() - 1);
    if (rho.edges.front() != etop) rho = reverse_path(G, rho);
    check(rho.edges.front() == etop, errc::internal, "well-chosen rotation lost the top edge");
    auto pieces = canonical_f_split(a, rho, cfg.probe_depth);
    PathUnit first = classify_piece(a, pieces[0], cert.eta);
    check(first.type != PathUnitType::none, errc::internal,
          "circuit does not open with a top-degree unit");
    SigmaBuild sb = nonlinear_sigma(a, first, cfg);
    int dd = cert.eta;
    int cl = a.stratum_lo(dd), ch = a.stratum_hi(dd);
    std::vector<LabelledGraph> parts{sb.sigma};
    long long q = sb.q;
    std::vector<CarrierFamily> fams;
    for (size_t i = 1; i < pieces.size(); ++i) {
      fams.push_back(carrier_for_piece(a, pieces[i], cl, ch, cfg));
      q = lcmll(q, fams.back().period());
      parts.push_back(fams.back().for_iterate(0));
    }
    LabelledGraph based = combine_based(parts);
    auto [sg, tr] = fold(based);
    cert.apt.sigma = sg;
    cert.apt.vtilde = sg.ipt;
    cert.apt.q = q;
    std::vector<long long> ls, labs;
    IterCache ic;
    const long long len_budget = 60000000;
    for (int k = 0; k <= cfg.k_max_nonlinear; ++k) {
      if (k > cert.eta + 2 && !ls.empty() && ls.back() > len_budget / (2 * k)) break;
      Path it = fast_iterate(a.rep, rho, k * q, ic);
      Lift lf = lift_path(cert.apt.sigma, cert.apt.vtilde, it);
      check(lf.total && lf.closed, errc::internal,
            "AI1 failed on the witness circuit (k=" + std::to_string(k) + ")");
      Measure m = measure(cert.apt.sigma.g, lf.path);
      cert.apt.samples.push_back({k, m.l, m.l_ab});
      ls.push_back(m.l);
      labs.push_back(m.l_ab);
    }
    cert.apt.fit_l = poly_degree_fit(ls);
    cert.apt.fit_lab = poly_degree_fit(labs);
  }
  // homology on the completed cover when the sheet bound allows
  {
    std::vector<int> fib(G.nv, 0);
    for (int v = 0; v < cert.apt.sigma.g.nv; ++v) ++fib[cert.apt.sigma.vlabel(v)];
    int sheets = *std::max_element(fib.begin(), fib.end());
    if (sheets <= cfg.max_sheets) {
      auto [cov, cc] = complete_to_cover(cert.apt.sigma);
      cert.pipeline_sheets = cc.sheets;
      auto k = cover_fixing_power(a, cov);
      if (k) {
        cert.pipeline_k = *k;
        cert.pipeline_degree = matrix_growth_class(cover_matrix(a, cov, *k)).degree;
      }
    } else {
      cert.sheet_bound_exceeded = true;
    }
  }
  // independent fallback: scan small covers for one whose homology reaches eta
  for (int s = 1; s <= cfg.fallback_sheet_bound && !cert.fallback_degree; ++s) {
    int best = -1;
    for (auto& cov : enumerate_covers(G, s, std::max(6, cfg.fallback_sheet_bound))) {
      auto k = cover_fixing_power(a, cov);
      if (!k) continue;
      auto gc = matrix_growth_class(cover_matrix(a, cov, *k));
      if (gc.exponential) continue;
      best = std::max(best, gc.degree);
      if (gc.degree == cert.eta) {
        cert.fallback_sheets = s;
        cert.fallback_degree = gc.degree;
        break;
      }
    }
  }
  return cert;
}

} // namespace fg
