#ifndef FOLDGROWTH_REP_HPP
#define FOLDGROWTH_REP_HPP

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "foldgrowth/core.hpp"
#include "foldgrowth/homology.hpp"

namespace fg {

// A vertex-fixing self map given by an oriented-edge substitution e -> e.u or
// e -> e. Also used for the reverse map, which need not satisfy the
// filtration shape. The graph is passed to every call so the structure stays
// freely copyable.
struct EdgeMap {
  std::vector<std::optional<Path>> suffix;  // per geometric edge, in orientation direction

  bool fixed(int ge) const { return !suffix[ge].has_value(); }
  Path image_of_edge(const Graph& g, int d) const;  // full image of a directed edge
  Path apply(const Graph& g, const Path& p) const;  // substitution, untightened
  Path map(const Graph& g, const Path& p) const;    // f_# = [apply], tightened
  Path iterate(const Graph& g, const Path& p, int k) const;
};

struct ValidationIssue {
  bool hard = false;
  std::string what;
};

struct Representative {
  Graph graph;                 // filtration order = geometric edge order
  Orientation orient;          // orientation with the chosen edge per stratum
  EdgeMap fmap;                // f(e_i) = e_i u_i along the orientation
  std::string name;

  int strata() const { return graph.geoms(); }
  const std::optional<Path>& u(int i) const { return fmap.suffix[i]; }
  Path f(const Path& p) const { return fmap.map(graph, p); }
  Path f_iter(const Path& p, int k) const { return fmap.iterate(graph, p, k); }
  Path f_image(int d) const { return fmap.image_of_edge(graph, d); }
  // height = max filtration index crossed (1-based); 0 for trivial paths
  int height(const Path& p) const;
};

struct ParseResult {
  Representative rep;
  std::vector<ValidationIssue> warnings;
};

// .rep text -> validated representative (junction probe depth configurable)
ParseResult parse_rep(const std::string& text, int probe_depth = 8);
Representative load_rep(const std::string& path, int probe_depth = 8);
std::string emit_rep(const Representative& r);

enum class NielsenClass { nielsen, periodic, no };
struct NielsenResult {
  NielsenClass cls = NielsenClass::no;
  int period = 0;  // for periodic
};
NielsenResult nielsen_class(const Representative& r, const Path& p, int period_bound = 12);
bool is_nielsen(const Representative& r, const Path& p);

struct FiltrationInfo {
  std::vector<int> order;        // permutation: position -> original geometric edge
  std::vector<int> degree;       // per original geometric edge
  std::vector<int> breakpoints;  // L_1 .. L_{eta+1}, 1-based positions
  int eta = 0;
};

// degree DP plus efficient reorder; hard error when the reorder cannot keep
// suffixes below their edges
FiltrationInfo analyze_growth(const Representative& r);

// representative with the efficient order applied, plus derived linear data
struct LinearData {
  Path mu;
  int m = 1;
  std::vector<Path> kappas;  // passive-unit f-splitting of mu
};

struct Analyzed {
  Representative rep;              // efficient filtration order
  FiltrationInfo filt;             // relative to rep (order is identity)
  std::vector<int> from_original;  // new geometric id -> original geometric id
  std::map<int, LinearData> linear;  // per linear geometric edge (0-based id)

  int degree_of_edge(int ge) const { return filt.degree[ge]; }
  int degree_of_path(const Path& p) const;
  bool linear_edge(int ge) const { return filt.degree[ge] == 1; }
  // stratum bounds: first geometric id of each degree class, by degree
  int stratum_lo(int deg) const;  // least ge with degree == deg (-1 if none)
  int stratum_hi(int deg) const;  // greatest, -1 if none
};

Analyzed analyze(const Representative& r);

std::vector<long long> growth_samples(const Representative& r, const Path& p, int k_max);

// f^k_# computed from the suffix block streams f^j(u_e) instead of k single
// applications; linear in the output length. Blocks are cached between calls.
struct IterCache {
  std::vector<std::vector<Path>> blocks;  // per geometric edge: f^j(u_e)
};
Path fast_iterate(const Graph& g, const EdgeMap& m, const Path& p, long long k,
                  IterCache& cache);
Path fast_iterate(const Representative& r, const Path& p, long long k, IterCache& cache);

// reverse map: e_i -> e_i v_i with f_#(v_i) = reverse(u_i); checked
EdgeMap reverse_rep(const Representative& r);

// minimal eta' over reorderings, per the breakpoint conditions
int degree_bound(const Representative& r);

// rotation of a cyclically reduced circuit whose initial edge is e_h or whose
// terminal edge is reverse(e_h) but not both
Path well_chosen(const Analyzed& a, const Path& circuit);

GrowthClass pg_abelianized_degree(const Representative& r);
IntMatrix rep_matrix(const Representative& r);  // induced action on H_1

// uniformly random tight path of the given length (random walk, no backtrack)
Path random_tight_path(const Graph& g, int len, std::mt19937_64& rng);

std::string degrees_json(const Analyzed& a);

} // namespace fg

#endif
