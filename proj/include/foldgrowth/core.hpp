#ifndef FOLDGROWTH_CORE_HPP
#define FOLDGROWTH_CORE_HPP

#include <optional>
#include <string>
#include <vector>

#include "foldgrowth/errors.hpp"

namespace fg {

// Directed edges are dense ints: geometric edge g gives directed edges 2g
// (forward) and 2g+1 (reverse), so reversal is a parity flip.
inline int rev(int d) { return d ^ 1; }
inline int geom(int d) { return d >> 1; }
inline bool forward(int d) { return (d & 1) == 0; }

struct Graph {
  int nv = 0;
  std::vector<int> init;            // initial vertex per directed edge, size 2*geoms()
  std::vector<std::string> enames;  // one name per geometric edge
  std::vector<std::string> vnames;  // one name per vertex (may be empty)

  int dedges() const { return static_cast<int>(init.size()); }
  int geoms() const { return dedges() / 2; }
  int term(int d) const { return init[rev(d)]; }

  // adds the geometric edge u->v, returns the forward directed id
  int add_edge(int u, int v, std::string name = {});
  int add_vertex(std::string name = {});

  std::string ename(int d) const;  // "e3" or "~e3"
  std::vector<std::vector<int>> stars() const;  // outgoing directed edges per vertex
  bool connected() const;
  int rank() const { return geoms() - nv + 1; }  // first Betti number, connected case
  bool minimal() const;                          // every vertex has valence >= 2
};

Graph rose(int n, const std::string& stem = "e");  // one vertex, n petals e1..en

// An orientation picks one directed edge per geometric edge.
struct Orientation {
  std::vector<int> chosen;  // size geoms(); chosen[g] in {2g, 2g+1}
  static Orientation standard(const Graph& g);
};

// A path is trivial at a vertex or a chain of directed edges.
struct Path {
  int at = -1;             // initial vertex; for trivial paths the whole content
  std::vector<int> edges;  // directed edge ids

  bool trivial() const { return edges.empty(); }
  int len() const { return static_cast<int>(edges.size()); }
  static Path trivial_at(int v) { return Path{v, {}}; }
};

Path make_path(const Graph& g, std::vector<int> edges);  // checks the chain
int initial(const Path& p);
int terminal(const Graph& g, const Path& p);
bool closed(const Graph& g, const Path& p);
bool is_tight(const Path& p);
Path reverse_path(const Graph& g, const Path& p);
Path concat(const Graph& g, const Path& a, const Path& b);
Path power(const Graph& g, const Path& p, int n);
Path subpath(const Graph& g, const Path& p, int from, int to);  // edge range [from,to)
Path rotate(const Graph& g, const Path& p, int k);              // cyclic, closed input
bool crosses(const Path& p, int geometric);
std::string show(const Graph& g, const Path& p);
Path parse_path(const Graph& g, const std::string& text);  // whitespace-separated tokens

// free reduction relative to endpoints
Path tighten(const Graph& g, const Path& p);
bool cyclically_reduced(const Graph& g, const Path& p);
Path cyclic_reduction(const Graph& g, const Path& p);  // closed input

struct Measure {
  long long l = 0;
  long long l_ab = 0;
  std::optional<long long> l_circ;  // only for closed paths
};
Measure measure(const Graph& g, const Path& p);
// net signed crossings per oriented edge; column vectors for homology
std::vector<long long> signed_crossings(const Graph& g, const Path& p, const Orientation& o);

// rho = mu^m with mu primitive; input closed and tight
struct PrimitiveRoot {
  Path mu;
  int m = 1;
};
PrimitiveRoot primitive_root(const Graph& g, const Path& rho);

// ---------------------------------------------------------------------------

struct LabelledGraph {
  Graph g;     // carrier
  Graph base;
  std::vector<int> lab;  // directed carrier edge -> directed base edge
  int ipt = -1;          // initial point, -1 when absent
  int tpt = -1;          // terminal point

  bool end_pointed() const { return ipt >= 0 && tpt >= 0; }
  bool based() const { return end_pointed() && ipt == tpt; }
  int vlabel(int v) const;  // induced vertex label
};

void check_labelled(const LabelledGraph& h);  // label commutes with iota and r
bool is_immersion(const LabelledGraph& h);
bool is_cover(const LabelledGraph& h);

// L(rho): subdivided interval whose tight crossing path carries label rho
LabelledGraph line(const Graph& base, const Path& rho);
// C(rho): base-pointed quotient of L(rho)
LabelledGraph circle(const Graph& base, const Path& rho);

// glue end to start; the base-pointed variant also identifies the outer ends
LabelledGraph combine(const std::vector<LabelledGraph>& parts);
LabelledGraph combine_based(const std::vector<LabelledGraph>& parts);
LabelledGraph to_based(const LabelledGraph& h);  // identify ipt and tpt

// disjoint union with explicit vertex identifications (pairs are (part,vertex))
struct GluePoint {
  int part;
  int vertex;
};
LabelledGraph glue(const std::vector<LabelledGraph>& parts,
                   const std::vector<std::vector<GluePoint>>& classes,
                   std::vector<std::vector<int>>* vertex_maps = nullptr);

// canonical form: BFS relabelling with edges ordered by label; end points pin
// the root, otherwise all roots are tried and the least encoding wins
LabelledGraph canonical(const LabelledGraph& h);
std::vector<long long> canonical_code(const LabelledGraph& h);
bool labelled_iso(const LabelledGraph& a, const LabelledGraph& b);

std::string to_dot(const LabelledGraph& h);

// path in the carrier relabelled into the base
Path project(const LabelledGraph& h, const Path& p);

} // namespace fg

#endif
