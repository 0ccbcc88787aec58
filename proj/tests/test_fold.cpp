#include <random>
#include <set>

#include "doctest.h"
#include "foldgrowth/fold.hpp"

using namespace fg;

namespace {

Path p(const Graph& g, const std::string& s) { return parse_path(g, s); }

// random connected labelled graph over the base: wedge of random word circles
LabelledGraph random_labelled(const Graph& base, std::mt19937_64& rng, int max_geoms = 12) {
  for (;;) {
    int nwords = 1 + static_cast<int>(rng() % 3);
    std::vector<LabelledGraph> parts;
    int total = 0;
    for (int w = 0; w < nwords; ++w) {
      std::vector<int> e;
      int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) e.push_back(static_cast<int>(rng() % base.dedges()));
      total += len;
      parts.push_back(circle(base, make_path(base, e)));
    }
    if (total > max_geoms) continue;
    std::vector<std::vector<GluePoint>> classes(1);
    for (int i = 0; i < nwords; ++i) classes[0].push_back({i, parts[i].ipt});
    LabelledGraph h = glue(parts, classes, nullptr);
    h.ipt = h.tpt = -1;
    return h;
  }
}

} // namespace

TEST_CASE("fold_step basics") {
  Graph g = rose(2);
  LabelledGraph h;
  h.base = g;
  h.g.add_vertex();
  h.lab.resize(4);
  int d0 = h.g.add_edge(0, 0);
  h.lab[d0] = 0;
  h.lab[rev(d0)] = 1;
  int d1 = h.g.add_edge(0, 0);
  h.lab[d1] = 0;
  h.lab[rev(d1)] = 1;
  auto [h2, tr] = fold_step(h);
  CHECK(h2.g.geoms() == 1);
  CHECK(tr.steps.size() == 1);

  auto c = circle(g, p(g, "e1 ~e1"));
  CHECK(!is_immersion(c));
  auto [f1, t1] = fold_step(c);
  CHECK(f1.g.geoms() == 1);
  CHECK(is_immersion(f1));

  CHECK_THROWS_AS(fold_step(circle(g, p(g, "e1"))), error);
}

TEST_CASE("fold reaches an immersion and tracks merge maps") {
  Graph g = rose(3);
  auto c = circle(g, p(g, "e1 ~e1 e2 ~e2"));
  auto [imm, tr] = fold(c);
  CHECK(is_immersion(imm));
  CHECK(static_cast<int>(tr.steps.size()) == c.g.geoms() - imm.g.geoms());
  for (int d = 0; d < c.g.dedges(); ++d) {
    CHECK(imm.lab[tr.edge_map[d]] == c.lab[d]);
    CHECK(tr.vertex_map[c.g.init[d]] == imm.g.init[tr.edge_map[d]]);
  }
  Path w = p(g, "e1 ~e1 e2 ~e2");
  CHECK(has_closed_lift(c, c.ipt, w));
  CHECK(has_closed_lift(imm, tr.vertex_map[c.ipt], w));
}

TEST_CASE("fold confluence on random graphs") {
  Graph g = rose(3);
  std::mt19937_64 rng(17);
  for (int it = 0; it < 50; ++it) {
    LabelledGraph h = random_labelled(g, rng);
    LabelledGraph det = folded(h);
    auto code = canonical_code(det);
    for (int t = 0; t < 5; ++t) {
      LabelledGraph r = fold_random(h, rng);
      CHECK(is_immersion(r));
      CHECK(canonical_code(r) == code);
    }
  }
}

TEST_CASE("pi1 invariance: generators of the subgroup stay closed after folding") {
  Graph g = rose(2);
  std::mt19937_64 rng(23);
  for (int it = 0; it < 40; ++it) {
    // wedge of word circles: the words generate the subgroup at the wedge point
    int nwords = 1 + static_cast<int>(rng() % 3);
    std::vector<Path> words;
    std::vector<LabelledGraph> parts;
    for (int w = 0; w < nwords; ++w) {
      std::vector<int> e;
      for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i)
        e.push_back(static_cast<int>(rng() % g.dedges()));
      words.push_back(make_path(g, e));
      parts.push_back(circle(g, words.back()));
    }
    std::vector<std::vector<GluePoint>> classes(1);
    for (int i = 0; i < nwords; ++i) classes[0].push_back({i, parts[i].ipt});
    std::vector<std::vector<int>> vm;
    LabelledGraph h = glue(parts, classes, &vm);
    int v = vm[0][parts[0].ipt];
    auto [imm, tr] = fold(h);
    for (auto& w : words) CHECK(has_closed_lift(imm, tr.vertex_map[v], w));
    // random products of the generators are in the subgroup as well
    for (int t = 0; t < 5; ++t) {
      Path prod = Path::trivial_at(0);
      for (int i = 0; i < 3; ++i) {
        Path w = words[rng() % words.size()];
        if (rng() % 2) w = reverse_path(g, w);
        prod = concat(g, prod, w);
      }
      CHECK(has_closed_lift(imm, tr.vertex_map[v], prod));
    }
  }
}

TEST_CASE("complete_to_cover") {
  Graph g = rose(2);
  auto core = circle(g, p(g, "e1"));
  auto [cov, cert] = complete_to_cover(core);
  CHECK(cert.sheets == 1);
  CHECK(is_cover(cov));
  CHECK(cov.g.geoms() == 2);

  auto [cov2, cert2] = complete_to_cover(line(g, p(g, "e1")));
  CHECK(cert2.sheets == 2);
  CHECK(cov2.g.nv == 2 * g.nv);
  CHECK(is_cover(cov2));
  CHECK(cov2.g.geoms() == 4);

  auto [cov3, cert3] = complete_to_cover(cov2);
  CHECK(cert3.sheets == 2);
  CHECK(cov3.g.geoms() == cov2.g.geoms());
  CHECK(labelled_iso(cov3, cov2));

  auto [cov4, cert4] = complete_to_cover(core, 3);
  CHECK(cert4.sheets == 3);
  CHECK(is_cover(cov4));
  CHECK(cov4.g.nv == 3);
}

TEST_CASE("cover completion on random immersions") {
  Graph g = rose(3);
  std::mt19937_64 rng(29);
  for (int it = 0; it < 60; ++it) {
    LabelledGraph imm = folded(random_labelled(g, rng));
    std::vector<std::vector<int>> fibers(g.nv);
    for (int v = 0; v < imm.g.nv; ++v) fibers[imm.vlabel(v)].push_back(v);
    int maxf = 0;
    for (auto& f : fibers) maxf = std::max(maxf, static_cast<int>(f.size()));
    auto [cov, cert] = complete_to_cover(imm);
    CHECK(is_cover(cov));
    CHECK(cert.sheets == maxf);
    CHECK(cov.g.nv == cert.sheets * g.nv);
    for (int d = 0; d < imm.g.dedges(); ++d) {
      CHECK(cov.lab[d] == imm.lab[d]);
      CHECK(cov.g.init[d] == imm.g.init[d]);
    }
  }
}

TEST_CASE("lift_path") {
  Graph g = rose(2);
  auto [cov, cert] = complete_to_cover(line(g, p(g, "e1")));
  auto l0 = lift_path(cov, 0, Path::trivial_at(0));
  CHECK(l0.total);
  CHECK(l0.path.trivial());
  auto l1 = lift_path(cov, 0, p(g, "e1"));
  CHECK(l1.total);
  CHECK(!l1.closed);
  Path w = p(g, "e1 e2 ~e1");
  Path ww = concat(g, w, reverse_path(g, w));
  auto l2 = lift_path(cov, 0, ww);
  CHECK(l2.total);
  CHECK(l2.closed);
  auto imm = circle(g, p(g, "e1 e2"));
  auto l3 = lift_path(imm, 0, p(g, "e1 e1"));
  CHECK(!l3.total);
  CHECK(l3.failed_at == 1);
}

TEST_CASE("enumerate_covers counts index-s subgroups up to conjugacy") {
  CHECK(enumerate_covers(rose(1), 2).size() == 1);
  CHECK(enumerate_covers(rose(2), 2).size() == 3);
  auto one = enumerate_covers(rose(3), 1);
  CHECK(one.size() == 1);
  CHECK(one[0].g.geoms() == 3);
  CHECK_THROWS_AS(enumerate_covers(rose(2), 9), error);
  auto covs = enumerate_covers(rose(2), 3);
  std::set<std::vector<long long>> codes;
  for (auto& c : covs) {
    CHECK(is_cover(c));
    CHECK(c.g.connected());
    codes.insert(canonical_code(c));
  }
  CHECK(codes.size() == covs.size());
  CHECK(covs.size() == 7);
}

TEST_CASE("map_core computes the image core of a subgroup") {
  Graph g = rose(3);
  auto image = [&](int d) {
    Path out;
    switch (d) {
      case 0: out = p(g, "e1"); break;
      case 1: out = p(g, "~e1"); break;
      case 2: out = p(g, "e2 e1"); break;
      case 3: out = p(g, "~e1 ~e2"); break;
      case 4: out = p(g, "e3 e1 e2"); break;
      default: out = p(g, "~e2 ~e1 ~e3"); break;
    }
    return out;
  };
  LabelledGraph whole;
  whole.base = g;
  whole.g.add_vertex();
  whole.lab.resize(g.dedges());
  for (int ge = 0; ge < 3; ++ge) {
    int nd = whole.g.add_edge(0, 0);
    whole.lab[nd] = 2 * ge;
    whole.lab[rev(nd)] = 2 * ge + 1;
  }
  whole.ipt = whole.tpt = 0;
  CHECK(labelled_iso(map_core(whole, image), whole));
  auto ce1 = circle(g, p(g, "e1"));
  CHECK(labelled_iso(map_core(ce1, image), ce1));
  auto ce2 = circle(g, p(g, "e2"));
  auto img = map_core(ce2, image);
  CHECK(labelled_iso(img, circle(g, p(g, "e2 e1"))));
  CHECK(has_closed_lift(img, img.ipt, p(g, "e2 e1")));
  CHECK(!has_closed_lift(img, img.ipt, p(g, "e2")));
}
