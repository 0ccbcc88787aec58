#include "foldgrowth/units.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace fg {

const char* unit_kind_name(UnitKind k) {
  switch (k) {
    case UnitKind::FF: return "FF";
    case UnitKind::FR: return "FR";
    case UnitKind::FE: return "FE";
    case UnitKind::LF: return "LF";
    case UnitKind::LR: return "LR";
    case UnitKind::LE: return "LE";
    case UnitKind::QE: return "QE";
  }
  return "?";
}

MuData mu_of(const Analyzed& a, int ge) {
  check(ge >= 0 && ge < a.rep.strata(), errc::domain, "edge index out of range");
  check(a.filt.degree[ge] == 1, errc::domain,
        "mu is defined for linear edges only; " + a.rep.graph.enames[ge] + " has degree " +
            std::to_string(a.filt.degree[ge]));
  const LinearData& ld = a.linear.at(ge);
  return MuData{ld.mu, ld.m, ld.kappas};
}

namespace {

// kappa with cyclic index
const Path& kappa(const Analyzed& a, int ge, int j) {
  const auto& ks = a.linear.at(ge).kappas;
  int s = static_cast<int>(ks.size());
  return ks[((j % s) + s) % s];
}

bool match_at(const Path& rho, int pos, const Path& piece) {
  if (pos + piece.len() > rho.len()) return false;
  for (int i = 0; i < piece.len(); ++i)
    if (rho.edges[pos + i] != piece.edges[i]) return false;
  return true;
}

bool is_linear_fwd(const Analyzed& a, int d) {
  return forward(d) && a.filt.degree[geom(d)] == 1;
}
bool is_linear_rev(const Analyzed& a, int d) {
  return !forward(d) && a.filt.degree[geom(d)] == 1;
}

// initial LR unit: ~e_b | k~_{b,d-1}..k~_{b,0} ~e_b | k_{b,-d}..k_{b,-1} ~e_b
// Chains grow at the front as d grows, so every d is checked independently.
std::optional<GrowthUnit> match_lr(const Analyzed& a, const Path& rho) {
  const Graph& g = a.rep.graph;
  if (is_linear_rev(a, rho.edges[0])) {
    GrowthUnit u{UnitKind::LR, -1, geom(rho.edges[0]), 0, subpath(g, rho, 0, 1)};
    return u;
  }
  for (int b = 0; b < a.rep.strata(); ++b) {
    if (a.filt.degree[b] != 1) continue;
    for (int variant = 0; variant < 2; ++variant) {
      for (int dd = 1;; ++dd) {
        std::vector<int> want;
        if (variant == 0) {
          for (int j = dd - 1; j >= 0; --j) {
            Path rk = reverse_path(g, kappa(a, b, j));
            want.insert(want.end(), rk.edges.begin(), rk.edges.end());
          }
        } else {
          for (int j = -dd; j <= -1; ++j) {
            const Path& fk = kappa(a, b, j);
            want.insert(want.end(), fk.edges.begin(), fk.edges.end());
          }
        }
        if (static_cast<int>(want.size()) + 1 > rho.len()) break;
        bool ok = true;
        for (size_t i = 0; i < want.size() && ok; ++i)
          if (rho.edges[i] != want[i]) ok = false;
        if (!ok) continue;
        int next = static_cast<int>(want.size());
        if (rho.edges[next] == rev(2 * b))
          return GrowthUnit{UnitKind::LR, -1, b, dd, subpath(g, rho, 0, next + 1)};
      }
    }
  }
  return std::nullopt;
}

// initial LE unit: e_a ~e_b | e_a mu^d ~e_b | e_a mu~^d ~e_b, mu_a=mu_b, m_a!=m_b
std::optional<GrowthUnit> match_le(const Analyzed& a, const Path& rho) {
  const Graph& g = a.rep.graph;
  if (!is_linear_fwd(a, rho.edges[0])) return std::nullopt;
  int ea = geom(rho.edges[0]);
  const LinearData& la = a.linear.at(ea);
  auto close_ok = [&](int pos, bool need_power) -> std::optional<GrowthUnit> {
    if (pos >= rho.len() || !is_linear_rev(a, rho.edges[pos])) return std::nullopt;
    int b = geom(rho.edges[pos]);
    const LinearData& lb = a.linear.at(b);
    if (lb.mu.edges != la.mu.edges || lb.m == la.m) return std::nullopt;
    (void)need_power;
    GrowthUnit u{UnitKind::LE, ea, b, 0, subpath(g, rho, 0, pos + 1)};
    return u;
  };
  if (auto u = close_ok(1, false)) return u;
  Path mu = la.mu, rmu = reverse_path(g, la.mu);
  for (int variant = 0; variant < 2; ++variant) {
    const Path& m = variant == 0 ? mu : rmu;
    int pos = 1, dd = 0;
    while (match_at(rho, pos, m)) {
      pos += m.len();
      ++dd;
      if (auto u = close_ok(pos, true)) {
        u->d = variant == 0 ? dd : -dd;
        return u;
      }
    }
  }
  return std::nullopt;
}

// initial QE unit
std::optional<GrowthUnit> match_qe(const Analyzed& a, const Path& rho) {
  const Graph& g = a.rep.graph;
  if (!is_linear_fwd(a, rho.edges[0])) return std::nullopt;
  int ea = geom(rho.edges[0]);
  const LinearData& la = a.linear.at(ea);
  int s = static_cast<int>(la.kappas.size());
  // form 1: e_a ~e_b with mu_a = reverse(mu_b)
  if (rho.len() >= 2 && is_linear_rev(a, rho.edges[1])) {
    int b = geom(rho.edges[1]);
    if (a.linear.at(b).mu.edges == reverse_path(g, la.mu).edges)
      return GrowthUnit{UnitKind::QE, ea, b, 0, subpath(g, rho, 0, 2)};
  }
  // form 2: e_a k_{a,0}..k_{a,d-1} ~e_b with mu_b = k~_{a,d+s-1}..k~_{a,d}
  {
    int pos = 1;
    for (int dd = 1;; ++dd) {
      const Path& k = kappa(a, ea, dd - 1);
      if (!match_at(rho, pos, k)) break;
      pos += k.len();
      if (pos < rho.len() && is_linear_rev(a, rho.edges[pos])) {
        int b = geom(rho.edges[pos]);
        std::vector<int> want;
        for (int j = dd + s - 1; j >= dd; --j) {
          Path rk = reverse_path(g, kappa(a, ea, j));
          want.insert(want.end(), rk.edges.begin(), rk.edges.end());
        }
        if (a.linear.at(b).mu.edges == want)
          return GrowthUnit{UnitKind::QE, ea, b, dd, subpath(g, rho, 0, pos + 1)};
      }
    }
  }
  // form 3: e_a k~_{a,-1}..k~_{a,-d} ~e_b continuing the reversed winding, so
  // mu_b = k~_{a,-(d+1)}..k~_{a,-(d+s)} (the reversal mirrors form 2)
  {
    int pos = 1;
    for (int dd = 1;; ++dd) {
      Path rk = reverse_path(g, kappa(a, ea, -dd));
      if (!match_at(rho, pos, rk)) break;
      pos += rk.len();
      if (pos < rho.len() && is_linear_rev(a, rho.edges[pos])) {
        int b = geom(rho.edges[pos]);
        std::vector<int> want;
        for (int j = dd + 1; j <= dd + s; ++j) {
          Path bk = reverse_path(g, kappa(a, ea, -j));
          want.insert(want.end(), bk.edges.begin(), bk.edges.end());
        }
        if (a.linear.at(b).mu.edges == want)
          return GrowthUnit{UnitKind::QE, ea, b, -dd, subpath(g, rho, 0, pos + 1)};
      }
    }
  }
  return std::nullopt;
}

// initial FE unit: e_a mu_a^d ~e_b with mu_a = mu_b, m_a = m_b (d != 0 if a = b)
std::optional<GrowthUnit> match_fe(const Analyzed& a, const Path& rho) {
  const Graph& g = a.rep.graph;
  if (!is_linear_fwd(a, rho.edges[0])) return std::nullopt;
  int ea = geom(rho.edges[0]);
  const LinearData& la = a.linear.at(ea);
  auto close_ok = [&](int pos, int dd) -> std::optional<GrowthUnit> {
    if (pos >= rho.len() || !is_linear_rev(a, rho.edges[pos])) return std::nullopt;
    int b = geom(rho.edges[pos]);
    const LinearData& lb = a.linear.at(b);
    if (lb.mu.edges != la.mu.edges || lb.m != la.m) return std::nullopt;
    if (b == ea && dd == 0) return std::nullopt;
    GrowthUnit u{UnitKind::FE, ea, b, dd, subpath(g, rho, 0, pos + 1)};
    return u;
  };
  if (auto u = close_ok(1, 0)) return u;
  Path mu = la.mu, rmu = reverse_path(g, la.mu);
  for (int variant = 0; variant < 2; ++variant) {
    const Path& m = variant == 0 ? mu : rmu;
    int pos = 1, dd = 0;
    while (match_at(rho, pos, m)) {
      pos += m.len();
      ++dd;
      if (auto u = close_ok(pos, variant == 0 ? dd : -dd)) return u;
    }
  }
  return std::nullopt;
}

// maximal initial LF unit: e_a | e_a k_{a,0}..k_{a,d-1} | e_a k~_{a,-1}..k~_{a,-d}
GrowthUnit match_lf(const Analyzed& a, const Path& rho) {
  const Graph& g = a.rep.graph;
  int ea = geom(rho.edges[0]);
  int best_len = 1, best_d = 0;
  {
    int pos = 1, dd = 0;
    for (;;) {
      const Path& k = kappa(a, ea, dd);
      if (!match_at(rho, pos, k)) break;
      pos += k.len();
      ++dd;
    }
    if (pos > best_len) {
      best_len = pos;
      best_d = dd;
    }
  }
  {
    int pos = 1, dd = 0;
    for (;;) {
      Path rk = reverse_path(g, kappa(a, ea, -(dd + 1)));
      if (!match_at(rho, pos, rk)) break;
      pos += rk.len();
      ++dd;
    }
    if (pos > best_len) {
      best_len = pos;
      best_d = -dd;
    }
  }
  return GrowthUnit{UnitKind::LF, ea, -1, best_d, subpath(g, rho, 0, best_len)};
}

} // namespace

Separation separate(const Analyzed& a, const Path& rho_in) {
  const Graph& g = a.rep.graph;
  Path rho = tighten(g, rho_in);
  check(rho.edges == rho_in.edges, errc::domain, "separate needs a tight path");
  check(a.degree_of_path(rho) <= 1, errc::domain,
        "separate needs a path of at most linear growth");
  Separation sep;
  Path rest = rho;
  while (!rest.trivial()) {
    std::vector<GrowthUnit> step1;
    if (auto u = match_lr(a, rest)) step1.push_back(*u);
    if (auto u = match_le(a, rest)) step1.push_back(*u);
    if (auto u = match_qe(a, rest)) step1.push_back(*u);
    GrowthUnit unit{UnitKind::FF, -1, -1, 0, Path{}};
    if (!step1.empty()) {
      for (size_t i = 1; i < step1.size(); ++i)
        check(step1[i].path.edges == step1[0].path.edges, errc::internal,
              "two distinct initial LR/LE/QE units found");
      unit = step1[0];
    } else if (auto u = match_fe(a, rest)) {
      unit = *u;
    } else if (is_linear_fwd(a, rest.edges[0])) {
      unit = match_lf(a, rest);
    } else {
      int d = rest.edges[0];
      check(a.filt.degree[geom(d)] == 0, errc::internal,
            "separation fell through on a linear edge " + g.ename(d));
      unit = GrowthUnit{forward(d) ? UnitKind::FF : UnitKind::FR,
                        forward(d) ? geom(d) : -1, forward(d) ? -1 : geom(d), 0,
                        subpath(g, rest, 0, 1)};
    }
    sep.units.push_back(unit);
    rest = subpath(g, rest, unit.path.len(), rest.len());
  }
  // exactness
  Path re = Path::trivial_at(rho.at);
  for (auto& u : sep.units) re = concat(g, re, u.path);
  check(re.edges == rho.edges, errc::internal, "separation does not reassemble the path");
  return sep;
}

std::string show_units(const Analyzed& a, const Separation& s) {
  std::ostringstream out;
  for (size_t i = 0; i < s.units.size(); ++i) {
    if (i) out << " ◇ ";
    const GrowthUnit& u = s.units[i];
    out << unit_kind_name(u.kind) << '(';
    bool first = true;
    if (u.a >= 0) {
      out << "a=" << u.a + 1;
      first = false;
    }
    if (u.b >= 0) {
      if (!first) out << ',';
      out << "b=" << u.b + 1;
      first = false;
    }
    if (u.kind == UnitKind::FE || u.kind == UnitKind::LE) {
      if (!first) out << ',';
      out << "d=" << u.d;
    } else {
      if (!first) out << ',';
      out << "len=" << u.path.len();
    }
    out << ')';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// essential unboundedness via a template automaton over passive units

namespace {

struct Nfa {
  // states are (template, position); transitions on directed edges
  std::vector<std::map<int, std::vector<int>>> delta;
  std::vector<char> at_end;    // unit boundary: epsilon to all starts
  std::vector<int> starts;

  int add_state() {
    delta.emplace_back();
    at_end.push_back(0);
    return static_cast<int>(delta.size()) - 1;
  }
};

Nfa build_passive_nfa(const Analyzed& a) {
  const Graph& g = a.rep.graph;
  Nfa n;
  // fixed edges, both directions
  for (int ge = 0; ge < a.rep.strata(); ++ge) {
    if (a.filt.degree[ge] != 0) continue;
    for (int dir = 0; dir < 2; ++dir) {
      int s = n.add_state();
      int t = n.add_state();
      n.delta[s][2 * ge + dir].push_back(t);
      n.at_end[t] = 1;
      n.starts.push_back(s);
    }
  }
  // FE templates per compatible ordered pair, both loop directions
  std::vector<int> linear_edges;
  for (int ge = 0; ge < a.rep.strata(); ++ge)
    if (a.filt.degree[ge] == 1) linear_edges.push_back(ge);
  for (int ea : linear_edges)
    for (int eb : linear_edges) {
      const LinearData& la = a.linear.at(ea);
      const LinearData& lb = a.linear.at(eb);
      if (la.mu.edges != lb.mu.edges || la.m != lb.m) continue;
      for (int variant = 0; variant < 2; ++variant) {
        Path mu = variant == 0 ? la.mu : reverse_path(g, la.mu);
        int s = n.add_state();
        std::vector<int> loop(mu.len());
        for (int i = 0; i < mu.len(); ++i) loop[i] = n.add_state();
        int t = n.add_state();
        n.delta[s][2 * ea].push_back(loop[0]);
        for (int i = 0; i < mu.len(); ++i)
          n.delta[loop[i]][mu.edges[i]].push_back(loop[(i + 1) % mu.len()]);
        n.delta[loop[0]][rev(2 * eb)].push_back(t);
        n.at_end[t] = 1;
        n.starts.push_back(s);
      }
    }
  return n;
}

} // namespace

bool is_essentially_unbounded(const Analyzed& a, const Path& rho) {
  Path t = tighten(a.rep.graph, rho);
  if (t.trivial()) return false;
  Nfa n = build_passive_nfa(a);
  std::set<int> cur;
  for (size_t s = 0; s < n.delta.size(); ++s) cur.insert(static_cast<int>(s));
  for (int d : t.edges) {
    std::set<int> next;
    for (int s : cur) {
      auto it = n.delta[s].find(d);
      if (it == n.delta[s].end()) continue;
      for (int q : it->second) {
        next.insert(q);
        if (n.at_end[q])
          for (int st : n.starts) next.insert(st);
      }
    }
    if (next.empty()) return true;
    cur = std::move(next);
  }
  return false;
}

SeparationReport separation_properties_check(const Analyzed& a, const Path& rho) {
  SeparationReport rep;
  Separation s = separate(a, rho);
  size_t n = s.units.size();
  if (n < 3) {
    rep.vacuous = true;
    rep.pass = true;
    return rep;
  }
  Path middle = Path::trivial_at(a.rep.graph.term(s.units[0].path.edges.back()));
  for (size_t i = 1; i + 1 < n; ++i) middle = concat(a.rep.graph, middle, s.units[i].path);
  if (is_nielsen(a.rep, middle)) {
    rep.vacuous = true;
    rep.pass = true;
    return rep;
  }
  // find the promised witness
  const Graph& g = a.rep.graph;
  for (size_t i = 0; i < n; ++i) {
    const GrowthUnit& u = s.units[i];
    if (u.kind == UnitKind::LE || u.kind == UnitKind::QE) {
      if (is_essentially_unbounded(a, u.path)) {
        rep.pass = true;
        rep.witness = std::string(unit_kind_name(u.kind)) + " unit " + show(g, u.path);
        return rep;
      }
    }
    if (u.kind == UnitKind::LF && i + 1 < n) {
      Path w = concat(g, u.path, s.units[i + 1].path);
      if (is_essentially_unbounded(a, w)) {
        rep.pass = true;
        rep.witness = "LF pair " + show(g, w);
        return rep;
      }
    }
    if (u.kind == UnitKind::LR && i > 0) {
      Path w = concat(g, s.units[i - 1].path, u.path);
      if (is_essentially_unbounded(a, w)) {
        rep.pass = true;
        rep.witness = "LR pair " + show(g, w);
        return rep;
      }
    }
  }
  rep.pass = false;
  return rep;
}

int count_passive_tilings(const Analyzed& a, const Path& rho, int limit) {
  // exhaustive: how many ways to write rho exactly as a concatenation of
  // passive units; DP over positions counting distinct unit choices
  const Graph& g = a.rep.graph;
  int n = rho.len();
  std::vector<long long> ways(n + 1, 0);
  ways[0] = 1;
  for (int i = 0; i < n; ++i) {
    if (!ways[i]) continue;
    Path rest = subpath(g, rho, i, n);
    // fixed edge unit
    if (a.filt.degree[geom(rest.edges[0])] == 0) ways[i + 1] += ways[i];
    // FE units of any admissible length
    if (is_linear_fwd(a, rest.edges[0])) {
      int ea = geom(rest.edges[0]);
      const LinearData& la = a.linear.at(ea);
      auto try_close = [&](int pos, int dd) {
        if (pos >= rest.len() || !is_linear_rev(a, rest.edges[pos])) return;
        int b = geom(rest.edges[pos]);
        const LinearData& lb = a.linear.at(b);
        if (lb.mu.edges != la.mu.edges || lb.m != la.m) return;
        if (b == ea && dd == 0) return;
        ways[i + pos + 1] += ways[i];
      };
      try_close(1, 0);
      for (int variant = 0; variant < 2; ++variant) {
        Path m = variant == 0 ? la.mu : reverse_path(g, la.mu);
        int pos = 1, dd = 0;
        while (match_at(rest, pos, m)) {
          pos += m.len();
          ++dd;
          try_close(pos, variant == 0 ? dd : -dd);
        }
      }
    }
    if (ways[i] > limit) ways[i] = limit + 1;
  }
  return static_cast<int>(std::min<long long>(ways[n], limit + 1));
}

} // namespace fg
