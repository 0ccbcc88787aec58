#ifndef FOLDGROWTH_FOLD_HPP
#define FOLDGROWTH_FOLD_HPP

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "foldgrowth/core.hpp"

namespace fg {

struct FoldStep {
  int vertex;  // vertex at which the pair was folded (ids in the pre-step graph)
  int d1, d2;
};

struct FoldTrace {
  std::vector<FoldStep> steps;
  std::vector<int> vertex_map;  // input vertex -> output vertex
  std::vector<int> edge_map;    // input directed edge -> output directed edge
};

// one folding step at the least (vertex, label, edge pair); error when immersed
std::pair<LabelledGraph, FoldTrace> fold_step(const LabelledGraph& h);

// folds to the immersion determined by h; deterministic order
std::pair<LabelledGraph, FoldTrace> fold(const LabelledGraph& h);
LabelledGraph folded(const LabelledGraph& h);

// same, but the foldable pair is chosen by rng at every step (confluence tests)
LabelledGraph fold_random(const LabelledGraph& h, std::mt19937_64& rng);

struct Lift {
  Path path;           // path in the carrier as far as the lift goes
  bool total = false;  // whole input lifted
  int failed_at = -1;  // index of the first base edge that would not lift
  bool closed = false;
};

// unique forward lift in an immersion from `start`; partial when it dies
Lift lift_path(const LabelledGraph& h, int start, const Path& base_path);

// whether some lift of the word starting at v returns to v (works on arbitrary
// labelled graphs via parallel state search)
bool has_closed_lift(const LabelledGraph& h, int v, const Path& base_path);

struct CoverCertificate {
  int sheets = 0;
  std::vector<std::vector<int>> vertex_fibers;  // per base vertex
  std::vector<std::vector<int>> edge_fibers;    // per base geometric edge (forward ids)
};

// Stallings' completion of a finite immersion to a cover. sheets_override pads
// every fiber to the given count (>= max fiber size) instead of the minimum.
std::pair<LabelledGraph, CoverCertificate> complete_to_cover(const LabelledGraph& h,
                                                             int sheets_override = 0);

// same, but the extension chains the partial orbits of every edge into a
// single cycle, keeping monodromy orders equal to the sheet count
std::pair<LabelledGraph, CoverCertificate> complete_to_cover_cyclic(const LabelledGraph& h,
                                                                    int sheets_override = 0);

// connected s-sheeted covers of g up to labelled isomorphism
std::vector<LabelledGraph> enumerate_covers(const Graph& g, int s, int bound = 6);

// core = based immersion; relabel every edge d by image(lab(d)), fold, trim.
// image maps directed base edges to base paths and must fix all vertices.
LabelledGraph map_core(const LabelledGraph& core,
                       const std::function<Path(int)>& image);

// valence-1 vertices other than the base point removed repeatedly
LabelledGraph trim_core(const LabelledGraph& h);

} // namespace fg

#endif
