#ifndef FOLDGROWTH_HOMOLOGY_HPP
#define FOLDGROWTH_HOMOLOGY_HPP

#include <functional>
#include <optional>
#include <vector>

#include "foldgrowth/bigint.hpp"
#include "foldgrowth/core.hpp"

namespace fg {

struct IntMatrix {
  int n = 0;
  std::vector<Bigint> a;  // row major

  static IntMatrix identity(int n);
  static IntMatrix zero(int n);
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);
  Bigint& at(int i, int j) { return a[i * n + j]; }
  const Bigint& at(int i, int j) const { return a[i * n + j]; }
  bool is_zero() const;
  bool operator==(const IntMatrix& o) const { return n == o.n && a == o.a; }
};

IntMatrix mul(const IntMatrix& x, const IntMatrix& y);
IntMatrix add(const IntMatrix& x, const IntMatrix& y);
IntMatrix sub(const IntMatrix& x, const IntMatrix& y);
IntMatrix mpow(const IntMatrix& x, long long k);
Bigint max_abs_entry(const IntMatrix& x);

// coefficients of det(xI - M), monic, c[0] = x^n coefficient = 1
std::vector<Bigint> char_poly(const IntMatrix& m);

// m-th cyclotomic polynomial, leading coefficient first
std::vector<Bigint> cyclotomic(int m);

struct GrowthClass {
  bool exponential = false;
  int degree = -1;                 // valid when !exponential
  long long unipotent_power = 0;   // least k with M^k unipotent
  std::vector<int> orders;         // cyclotomic factor orders of the char poly
};

// exponential iff char poly is not a product of cyclotomics; otherwise the
// polynomial growth degree of k -> M^k
GrowthClass matrix_growth_class(const IntMatrix& m, long long k_bound = 0);

// spanning tree + one fundamental cycle per non-tree geometric edge
struct CycleBasis {
  int basepoint = 0;
  std::vector<int> tree_edges;     // geometric ids
  std::vector<int> cycle_edges;    // non-tree geometric ids, ascending
  std::vector<Path> cycles;        // tight closed paths at the basepoint
};

CycleBasis cycle_basis(const Graph& g, int basepoint = 0);

// image(d) = path replacing directed edge d; must fix all vertices.
// column j = signed crossing vector (over cycle_edges) of image(cycle j)
IntMatrix induced_matrix(const Graph& carrier, const CycleBasis& basis,
                         const std::function<Path(int)>& image);

// least d such that the (d+1)-st finite differences vanish on the window and
// the d-th stay positive at the tail; nullopt when inconclusive
std::optional<int> poly_degree_fit(const std::vector<long long>& samples);

} // namespace fg

#endif
