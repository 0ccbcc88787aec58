#include "foldgrowth/homology.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace fg {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m = zero(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::zero(int n) {
  IntMatrix m;
  m.n = n;
  m.a.assign(static_cast<size_t>(n) * n, Bigint());
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  IntMatrix m = zero(static_cast<int>(rows.size()));
  for (int i = 0; i < m.n; ++i) {
    check(static_cast<int>(rows[i].size()) == m.n, errc::malformed, "ragged matrix");
    for (int j = 0; j < m.n; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

bool IntMatrix::is_zero() const {
  for (auto& x : a)
    if (!x.zero()) return false;
  return true;
}

IntMatrix mul(const IntMatrix& x, const IntMatrix& y) {
  check(x.n == y.n, errc::domain, "matrix size mismatch");
  IntMatrix r = IntMatrix::zero(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      if (x.at(i, k).zero()) continue;
      for (int j = 0; j < x.n; ++j) {
        if (y.at(k, j).zero()) continue;
        r.at(i, j) += x.at(i, k) * y.at(k, j);
      }
    }
  return r;
}

IntMatrix add(const IntMatrix& x, const IntMatrix& y) {
  check(x.n == y.n, errc::domain, "matrix size mismatch");
  IntMatrix r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

IntMatrix sub(const IntMatrix& x, const IntMatrix& y) {
  check(x.n == y.n, errc::domain, "matrix size mismatch");
  IntMatrix r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

IntMatrix mpow(const IntMatrix& x, long long k) {
  check(k >= 0, errc::domain, "negative matrix power");
  IntMatrix r = IntMatrix::identity(x.n);
  IntMatrix b = x;
  while (k) {
    if (k & 1) r = mul(r, b);
    k >>= 1;
    if (k) b = mul(b, b);
  }
  return r;
}

Bigint max_abs_entry(const IntMatrix& x) {
  Bigint best = 0;
  for (auto& v : x.a)
    if (Bigint::abs_cmp(v, best) > 0) best = v.negative() ? -v : v;
  return best;
}

std::vector<Bigint> char_poly(const IntMatrix& m) {
  // Faddeev-LeVerrier; every division is exact
  int n = m.n;
  std::vector<Bigint> c(n + 1);
  c[0] = 1;
  IntMatrix mk = IntMatrix::zero(n);  // M_0 = 0
  for (int k = 1; k <= n; ++k) {
    IntMatrix t = mk;
    for (int i = 0; i < n; ++i) t.at(i, i) += c[k - 1];
    mk = mul(m, t);
    Bigint tr = 0;
    for (int i = 0; i < n; ++i) tr += mk.at(i, i);
    c[k] = (-tr).div_exact(static_cast<uint32_t>(k));
  }
  return c;
}

namespace {

// polynomial helpers, leading coefficient first, monic divisors only
std::vector<Bigint> poly_mul(const std::vector<Bigint>& a, const std::vector<Bigint>& b) {
  std::vector<Bigint> r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// divides and returns the quotient when remainder vanishes
std::optional<std::vector<Bigint>> poly_div_exact(const std::vector<Bigint>& num,
                                                  const std::vector<Bigint>& den) {
  if (num.size() < den.size()) return std::nullopt;
  check(den[0] == Bigint(1), errc::internal, "divisor not monic");
  std::vector<Bigint> rem = num;
  std::vector<Bigint> quot(num.size() - den.size() + 1);
  for (size_t i = 0; i + den.size() <= rem.size(); ++i) {
    Bigint f = rem[i];
    quot[i] = f;
    if (f.zero()) continue;
    for (size_t j = 0; j < den.size(); ++j) rem[i + j] -= f * den[j];
  }
  for (size_t i = quot.size(); i < rem.size(); ++i)
    if (!rem[i].zero()) return std::nullopt;
  return quot;
}

int euler_phi(int m) {
  int r = m;
  for (int p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      r -= r / p;
    }
  if (m > 1) r -= r / m;
  return r;
}

} // namespace

std::vector<Bigint> cyclotomic(int m) {
  // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d
  std::vector<Bigint> num(m + 1);
  num[0] = 1;
  num[m] = -1;
  for (int d = 1; d < m; ++d) {
    if (m % d) continue;
    auto q = poly_div_exact(num, cyclotomic(d));
    check(q.has_value(), errc::internal, "cyclotomic division failed");
    num = *q;
  }
  return num;
}

GrowthClass matrix_growth_class(const IntMatrix& m, long long k_bound) {
  GrowthClass out;
  auto p = char_poly(m);
  check(!p.back().zero(), errc::domain, "matrix is singular");
  int n = m.n;
  // peel cyclotomic factors; phi(x) <= n bounds the orders that can appear
  int mmax = 2;
  for (int x = 1; x <= 2 * n * n + 4; ++x)
    if (euler_phi(x) <= n) mmax = x;
  for (int ord = 1; ord <= mmax && p.size() > 1; ++ord) {
    if (euler_phi(ord) > static_cast<int>(p.size()) - 1) continue;
    auto phi = cyclotomic(ord);
    for (;;) {
      auto q = poly_div_exact(p, phi);
      if (!q) break;
      p = *q;
      out.orders.push_back(ord);
    }
  }
  if (p.size() > 1) {
    out.exponential = true;
    return out;
  }
  long long k = 1;
  for (int ord : out.orders) k = std::lcm(k, static_cast<long long>(ord));
  if (k_bound > 0 && k > k_bound)
    fail(errc::resource, "unipotent power " + std::to_string(k) + " exceeds bound");
  out.unipotent_power = k;
  IntMatrix nk = mpow(m, k);
  IntMatrix nil = sub(nk, IntMatrix::identity(m.n));
  // degree = largest j with (N - I)^j != 0
  int d = 0;
  IntMatrix pw = IntMatrix::identity(m.n);
  for (int j = 1; j <= m.n; ++j) {
    pw = mul(pw, nil);
    if (pw.is_zero()) break;
    d = j;
  }
  check(mul(pw, nil).is_zero() || pw.is_zero(), errc::internal, "matrix not unipotent at power k");
  out.degree = d;
  return out;
}

CycleBasis cycle_basis(const Graph& g, int basepoint) {
  check(g.connected(), errc::domain, "cycle basis needs a connected graph");
  CycleBasis b;
  b.basepoint = basepoint;
  std::vector<int> parent_edge(g.nv, -1);  // directed edge into the vertex
  std::vector<char> seen(g.nv, 0);
  seen[basepoint] = 1;
  std::queue<int> q;
  q.push(basepoint);
  auto st = g.stars();
  std::vector<char> intree(g.geoms(), 0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    std::vector<int> s = st[v];
    std::sort(s.begin(), s.end());
    for (int d : s) {
      int w = g.term(d);
      if (!seen[w]) {
        seen[w] = 1;
        parent_edge[w] = d;
        intree[geom(d)] = 1;
        q.push(w);
      }
    }
  }
  auto tree_path_from_base = [&](int v) {
    std::vector<int> up;
    while (v != basepoint) {
      up.push_back(parent_edge[v]);
      v = g.init[parent_edge[v]];
    }
    std::reverse(up.begin(), up.end());
    Path p = Path::trivial_at(basepoint);
    for (int d : up) p.edges.push_back(d);
    return p;
  };
  for (int ge = 0; ge < g.geoms(); ++ge) {
    if (intree[ge]) {
      b.tree_edges.push_back(ge);
      continue;
    }
    b.cycle_edges.push_back(ge);
    int d = 2 * ge;
    Path c = tree_path_from_base(g.init[d]);
    c.edges.push_back(d);
    Path back = reverse_path(g, tree_path_from_base(g.term(d)));
    c.edges.insert(c.edges.end(), back.edges.begin(), back.edges.end());
    b.cycles.push_back(tighten(g, c));
  }
  return b;
}

IntMatrix induced_matrix(const Graph& carrier, const CycleBasis& basis,
                         const std::function<Path(int)>& image) {
  int n = static_cast<int>(basis.cycles.size());
  // vertex fixing: every edge image must run initial -> terminal of its edge
  for (int d = 0; d < carrier.dedges(); ++d) {
    Path w = image(d);
    check(initial(w) == carrier.init[d] && terminal(carrier, w) == carrier.term(d), errc::domain,
          "induced_matrix: image moves a vertex");
  }
  std::vector<int> col_of(carrier.geoms(), -1);
  for (int j = 0; j < n; ++j) col_of[basis.cycle_edges[j]] = j;
  IntMatrix m = IntMatrix::zero(n);
  Orientation o = Orientation::standard(carrier);
  for (int j = 0; j < n; ++j) {
    Path img = Path::trivial_at(basis.cycles[j].at);
    for (int d : basis.cycles[j].edges) img = concat(carrier, img, image(d));
    auto c = signed_crossings(carrier, img, o);
    for (int ge = 0; ge < carrier.geoms(); ++ge)
      if (col_of[ge] >= 0) m.at(col_of[ge], j) = c[ge];
  }
  return m;
}

namespace {

std::optional<int> fit_strict(const std::vector<long long>& samples) {
  if (samples.size() < 2) return std::nullopt;
  std::vector<long long> cur = samples;
  for (int d = 0; d + 1 < static_cast<int>(samples.size()); ++d) {
    std::vector<long long> diff(cur.size() - 1);
    for (size_t i = 0; i + 1 < cur.size(); ++i) diff[i] = cur[i + 1] - cur[i];
    bool allzero = std::all_of(diff.begin(), diff.end(), [](long long x) { return x == 0; });
    if (allzero) {
      if (d == 0) return 0;
      return cur.back() > 0 ? std::optional<int>(d) : std::nullopt;
    }
    cur = std::move(diff);
  }
  return std::nullopt;
}

} // namespace

std::optional<int> poly_degree_fit(const std::vector<long long>& samples) {
  // "eventually constant": a short initial transient may be discarded
  int max_drop = std::min<int>(3, static_cast<int>(samples.size()) - 4);
  for (int drop = 0; drop <= std::max(0, max_drop); ++drop) {
    auto r = fit_strict(std::vector<long long>(samples.begin() + drop, samples.end()));
    if (r) return r;
  }
  return std::nullopt;
}

} // namespace fg
