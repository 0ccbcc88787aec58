#include "foldgrowth/path_units.hpp"

#include <sstream>

namespace fg {

std::vector<Path> canonical_f_split(const Analyzed& a, const Path& rho_in, int probe_depth) {
  const Graph& g = a.rep.graph;
  Path rho = tighten(g, rho_in);
  check(rho.edges == rho_in.edges, errc::domain, "canonical split needs a tight path");
  if (rho.trivial()) return {rho};
  int d = a.degree_of_path(rho);
  if (d == 0) return {rho};
  int h = a.rep.height(rho);
  auto cut_class = [&](int ge) {
    if (d == 1) return ge == h - 1;      // only the top edge in the linear case
    return a.filt.degree[ge] == d;       // whole stratum class otherwise
  };
  std::vector<int> cuts;  // positions between edges, ascending
  for (int i = 0; i < rho.len(); ++i) {
    int e = rho.edges[i];
    if (cut_class(geom(e))) {
      if (forward(e) && i > 0) cuts.push_back(i);             // before e_i
      if (!forward(e) && i + 1 < rho.len()) cuts.push_back(i + 1);  // after ~e_i
    }
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Path> pieces;
  int at = 0;
  for (int c : cuts) {
    pieces.push_back(subpath(g, rho, at, c));
    at = c;
  }
  pieces.push_back(subpath(g, rho, at, rho.len()));
  // probe: images stay cancellation free across every cut
  for (int k = 0; k <= probe_depth; ++k) {
    long long total = a.rep.f_iter(rho, k).len();
    long long sum = 0;
    for (auto& p : pieces) sum += a.rep.f_iter(p, k).len();
    check(sum == total, errc::validation,
          "canonical split is not an f-splitting at iteration " + std::to_string(k));
  }
  return pieces;
}

PathUnit classify_piece(const Analyzed& a, const Path& piece, int d) {
  PathUnit u;
  u.path = piece;
  u.degree = a.degree_of_path(piece);
  if (u.degree < d) return u;
  int first = piece.edges.front(), last = piece.edges.back();
  bool starts = forward(first) && a.filt.degree[geom(first)] == d;
  bool ends = !forward(last) && a.filt.degree[geom(last)] == d;
  check(starts || ends, errc::internal, "degree-d piece without a boundary stratum edge");
  if (starts && ends && piece.len() >= 2) {
    u.type = PathUnitType::i;
    u.a = geom(first);
    u.b = geom(last);
  } else if (starts) {
    u.type = PathUnitType::ii;
    u.a = geom(first);
  } else {
    u.type = PathUnitType::iii;
    u.b = geom(last);
  }
  return u;
}

std::vector<StructureEntry> unit_structure(const Analyzed& a, const Path& rho) {
  int d = a.degree_of_path(rho);
  check(d >= 2, errc::domain, "unit structure needs a path of degree at least 2");
  auto pieces = canonical_f_split(a, rho);
  std::vector<StructureEntry> out;
  for (auto& p : pieces) {
    PathUnit u = classify_piece(a, p, d);
    StructureEntry e;
    if (u.degree >= d) {
      e.type = u.type;
      e.a = u.a;
      e.b = u.b;
    }
    out.push_back(e);
  }
  return out;
}

std::string show_split(const Analyzed& a, const std::vector<Path>& pieces) {
  std::ostringstream out;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i) out << " * ";
    out << '(' << show(a.rep.graph, pieces[i]) << ")[d" << a.degree_of_path(pieces[i]) << ']';
  }
  return out.str();
}

std::string show_structure(const std::vector<StructureEntry>& s) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out << ", ";
    switch (s[i].type) {
      case PathUnitType::none: out << "()"; break;
      case PathUnitType::i: out << "((i)," << s[i].a + 1 << ',' << s[i].b + 1 << ')'; break;
      case PathUnitType::ii: out << "((ii)," << s[i].a + 1 << ')'; break;
      case PathUnitType::iii: out << "((iii)," << s[i].b + 1 << ')'; break;
    }
  }
  out << ']';
  return out.str();
}

} // namespace fg
