#ifndef FOLDGROWTH_APT_HPP
#define FOLDGROWTH_APT_HPP

#include <optional>
#include <string>
#include <vector>

#include "foldgrowth/fold.hpp"
#include "foldgrowth/path_units.hpp"
#include "foldgrowth/units.hpp"

namespace fg {

struct AptConfig {
  int k_max_linear = 12;
  int k_max_nonlinear = 8;
  int probe_depth = 4;
  int subgroup_index_bound = 12;
  int tail_scan_bound = 400;     // scan limit for the degree-(d-1) tail piece
  long long stability_cap = 4096;
  int max_sheets = 24;
  int fallback_sheet_bound = 4;
};

// lcm of mu lengths over the linear stratum, and the longest exceptional
// subpath of any mu (0 when none); (1, 0) when no linear edges exist
std::pair<long long, long long> lambda_constants(const Analyzed& a);

struct DiagramUnit {
  GrowthUnit unit;
  long long q = 0;
  bool active = false;
  LabelledGraph pre_fold;            // Lambda(delta, q)
  LabelledGraph folded;              // Lambda[delta, q]
  std::vector<int> balloon_edges;    // geometric edges of `folded` from the circle
};

DiagramUnit diagram_unit(const Analyzed& a, const GrowthUnit& u, long long q);

struct LambdaBuild {
  long long q = 0;
  std::vector<DiagramUnit> units;
  LabelledGraph lambda;                    // end-pointed immersion Lambda[rho, q]
  std::optional<LabelledGraph> sigma;      // based immersion when rho is closed
  std::vector<std::vector<int>> balloons;  // per active unit: its edges in lambda
};

// builds Lambda(rho, q), folds, and checks f^{kq}-iterates lift across
LambdaBuild build_lambda(const Analyzed& a, const Path& rho, long long q, int k_check = 5);

struct AptSample {
  long long k = 0;
  long long l = 0;
  long long l_ab = 0;
};

struct AptCertificate {
  LabelledGraph sigma;
  int vtilde = -1;
  long long q = 1;
  bool bounded = false;          // degree-0 input
  std::vector<AptSample> samples;
  std::optional<int> fit_l;
  std::optional<int> fit_lab;
  std::string json() const;
};

// linear Apt immersion for a circuit of degree <= 1
AptCertificate linear_apt(const Analyzed& a, const Path& circuit, const AptConfig& cfg = {});

struct Tails {
  bool well_chosen = false;
  int s = 1;                 // number of splitting pieces of u_a (s_a)
  std::vector<Path> plus;    // alpha_{a,0..count-1}
  std::vector<Path> minus;   // beta_{a,0..count-1}
};

Tails tails(const Analyzed& a, int ge, int count);

struct BalloonReport {
  bool pass = true;
  int overlaps_checked = 0;
  std::string counterexample;
};

// window-scan property test of the two balloon lemmas
BalloonReport balloon_checks(const Analyzed& a, int ea, int eb, int window);

// least q such that every oriented edge's f^q-image lifts between its own
// endpoints; excluded geometric carrier edges are ignored
std::optional<long long> f_stable_period(const Analyzed& a, const LabelledGraph& h,
                                         long long cap = 4096,
                                         const std::vector<int>& exclude_geoms = {});

// tree lemma: extend a tree immersion of stratum degree d >= 2 by covers below
LabelledGraph tree_extend(const Analyzed& a, const LabelledGraph& tree);

// a periodic family of end-pointed immersions carrying the f^j-iterates of a
// splitting piece
struct CarrierFamily {
  Path piece;
  int orbit = 1;                      // covers cycle with this length in j
  std::vector<LabelledGraph> graphs;  // orbit many carrier graphs
  std::vector<int> iotas;             // initial vertex per orbit graph
  std::vector<int> taus;              // exact terminal vertices for j < taus.size()
  long long tip_transient = 0;        // taus periodic from this index on
  long long tip_period = 1;
  long long stability = 1;            // lcm of the carriers' f-stability periods

  LabelledGraph for_iterate(long long j) const;  // end-pointed carrier of f^j(piece)
  long long period() const;                      // lcm(orbit, tip_period, stability)
};

CarrierFamily carrier_for_piece(const Analyzed& a, const Path& piece, int cut_lo, int cut_hi,
                                const AptConfig& cfg = {});

struct SigmaBuild {
  LabelledGraph sigma;  // end-pointed immersion
  long long q = 1;
  int degree = 0;
  std::vector<AptSample> samples;
  std::optional<int> fit_lab;
};

// quadratic and higher-degree path unit constructions
SigmaBuild nonlinear_sigma(const Analyzed& a, const PathUnit& alpha, const AptConfig& cfg = {});

// shortest tight cyclically reduced circuit crossing the top stratum edge
Path witness_circuit(const Analyzed& a);

struct MainCertificate {
  int eta = 0;
  AptCertificate apt;
  std::optional<int> pipeline_sheets;  // sheets of the completed Sigma cover
  std::optional<int> pipeline_degree;  // homology degree on that cover
  long long pipeline_k = 0;            // iterate whose lift fixes all vertices
  std::optional<int> fallback_sheets;  // least cover achieving eta
  std::optional<int> fallback_degree;
  bool sheet_bound_exceeded = false;
  std::string json() const;
};

MainCertificate verify_main_theorem(const Analyzed& a, const AptConfig& cfg = {});

// least k such that the lift of f^k fixes every vertex of the cover, found by
// monodromy tuple dynamics; nullopt when the trajectory cycles without one
std::optional<long long> cover_fixing_power(const Analyzed& a, const LabelledGraph& cover,
                                            long long cap = 100000);

// induced matrix of the vertex-fixing lift of f^k on the cover
IntMatrix cover_matrix(const Analyzed& a, const LabelledGraph& cover, long long k);

} // namespace fg

#endif
