#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "foldgrowth/path_units.hpp"

using namespace fg;
using namespace fgtest;

namespace {
Path p(const Graph& g, const std::string& s) { return parse_path(g, s); }
}

TEST_CASE("canonical f-splitting positions") {
  Analyzed e1 = analyze(make(E1_TEXT));
  const Graph& g = e1.rep.graph;
  // degree-2 path: cut before each e3
  auto p1 = canonical_f_split(e1, p(g, "e3 e1 e2 e3"));
  REQUIRE(p1.size() == 2);
  CHECK(show(g, p1[0]) == "e3 e1 e2");
  CHECK(show(g, p1[1]) == "e3");
  // linear path: cut before e2 (the top linear edge)
  auto p2 = canonical_f_split(e1, p(g, "e1 e2"));
  REQUIRE(p2.size() == 2);
  CHECK(show(g, p2[0]) == "e1");
  CHECK(show(g, p2[1]) == "e2");
  // single fixed edge: one piece
  auto p3 = canonical_f_split(e1, p(g, "e1"));
  REQUIRE(p3.size() == 1);
  // after ~e3 cuts
  auto p4 = canonical_f_split(e1, p(g, "e3 e1 ~e3 e2 e1 ~e2"));
  REQUIRE(p4.size() == 2);
  CHECK(show(g, p4[0]) == "e3 e1 ~e3");
  CHECK(show(g, p4[1]) == "e2 e1 ~e2");
}

TEST_CASE("piece lengths add up and pieces are units or lower") {
  std::mt19937_64 rng(31);
  for (auto& sr : suite()) {
    CAPTURE(sr.name);
    Analyzed a = analyze(make(sr.text));
    const Graph& g = a.rep.graph;
    for (int it = 0; it < 40; ++it) {
      Path w = random_tight_path(g, 2 + static_cast<int>(rng() % 12), rng);
      if (w.trivial()) continue;
      auto pieces = canonical_f_split(a, w);
      long long sum = 0;
      Path re = Path::trivial_at(w.at);
      for (auto& q : pieces) {
        sum += q.len();
        re = concat(g, re, q);
      }
      CHECK(sum == w.len());
      CHECK(re.edges == w.edges);
      int d = a.degree_of_path(w);
      if (d >= 2)
        for (auto& q : pieces) {
          PathUnit u = classify_piece(a, q, d);
          if (u.degree >= d) CHECK(u.type != PathUnitType::none);
        }
    }
  }
}

TEST_CASE("unit structure of the worked examples") {
  Analyzed e1 = analyze(make(E1_TEXT));
  const Graph& g = e1.rep.graph;
  auto s1 = unit_structure(e1, p(g, "e3 e1 e2 ~e3"));
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].type == PathUnitType::i);
  CHECK(s1[0].a == 2);
  CHECK(s1[0].b == 2);
  auto s2 = unit_structure(e1, p(g, "e3 e1 e2 e3"));
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].type == PathUnitType::ii);
  CHECK(s2[1].type == PathUnitType::ii);
  // invariance under f_#
  auto s3 = unit_structure(e1, e1.rep.f(p(g, "e3 e1 e2 ~e3")));
  CHECK(s3 == s1);
  CHECK(show_structure(s1) == "[((i),3,3)]");
}

TEST_CASE("unit structure invariant under f and reverse map") {
  std::mt19937_64 rng(37);
  for (auto& sr : suite()) {
    CAPTURE(sr.name);
    Analyzed a = analyze(make(sr.text));
    if (a.filt.eta < 2) continue;
    const Graph& g = a.rep.graph;
    EdgeMap rbar = reverse_rep(a.rep);
    int hits = 0;
    for (int it = 0; it < 400 && hits < 100; ++it) {
      Path w = random_tight_path(g, 2 + static_cast<int>(rng() % 10), rng);
      if (w.trivial() || a.degree_of_path(w) != 2) continue;
      ++hits;
      auto s = unit_structure(a, w);
      CHECK(unit_structure(a, a.rep.f(w)) == s);
      CHECK(unit_structure(a, rbar.map(g, w)) == s);
    }
    CHECK(hits > 0);
  }
}

TEST_CASE("trivial gamma units classify") {
  Analyzed e1 = analyze(make(E1_TEXT));
  const Graph& g = e1.rep.graph;
  auto s = unit_structure(e1, p(g, "e3"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].type == PathUnitType::ii);
  auto s2 = unit_structure(e1, p(g, "~e3"));
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].type == PathUnitType::iii);
  // e3 ~e3 is not tight, but e3 e1 ~e3 has gamma = e1
  auto s3 = unit_structure(e1, p(g, "e3 e1 ~e3"));
  REQUIRE(s3.size() == 1);
  CHECK(s3[0].type == PathUnitType::i);
}
