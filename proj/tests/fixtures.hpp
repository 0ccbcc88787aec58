#ifndef FG_TEST_FIXTURES_HPP
#define FG_TEST_FIXTURES_HPP

#include <string>
#include <vector>

#include "foldgrowth/rep.hpp"

namespace fgtest {

// rank-3 rose, degrees (0,1,2): the running example everywhere
inline const char* E1_TEXT =
    "rep e1\n"
    "edge e1 : v0 -> v0\n"
    "edge e2 : v0 -> v0\n"
    "edge e3 : v0 -> v0\n"
    "map e1 -> e1\n"
    "map e2 -> e2 e1\n"
    "map e3 -> e3 e1 e2\n";

// rank-3 rose with a homologically invisible quadratic stratum
inline const char* E2_TEXT =
    "rep e2\n"
    "edge a : v0 -> v0\n"
    "edge b : v0 -> v0\n"
    "edge c : v0 -> v0\n"
    "map a -> a\n"
    "map b -> b a\n"
    "map c -> c b b a ~b ~b ~a\n";

// rank-2 linear rep (the restriction of E1 to its linear part)
inline const char* E1R_TEXT =
    "rep e1r\n"
    "edge e1 : v0 -> v0\n"
    "edge e2 : v0 -> v0\n"
    "map e1 -> e1\n"
    "map e2 -> e2 e1\n";

// two linear edges over the same root with different exponents (LE units)
inline const char* EMISMATCH_TEXT =
    "rep emismatch\n"
    "edge e1 : v0 -> v0\n"
    "edge e2 : v0 -> v0\n"
    "edge e3 : v0 -> v0\n"
    "map e1 -> e1\n"
    "map e2 -> e2 e1\n"
    "map e3 -> e3 e1 e1\n";

// QE pair: mu_p = a, mu_r = ~a
inline const char* EQE_TEXT =
    "rep eqe\n"
    "edge a : v0 -> v0\n"
    "edge p : v0 -> v0\n"
    "edge r : v0 -> v0\n"
    "map a -> a\n"
    "map p -> p a\n"
    "map r -> r ~a\n";

// rank-4 rose of degree 3
inline const char* ED3_TEXT =
    "rep ed3\n"
    "edge a : v0 -> v0\n"
    "edge b : v0 -> v0\n"
    "edge c : v0 -> v0\n"
    "edge d : v0 -> v0\n"
    "map a -> a\n"
    "map b -> b a\n"
    "map c -> c b\n"
    "map d -> d c\n";

// second linear stratum above the suffix of the quadratic edge (case-3 shape)
inline const char* ECASE3_TEXT =
    "rep ecase3\n"
    "edge a : v0 -> v0\n"
    "edge b : v0 -> v0\n"
    "edge t : v0 -> v0\n"
    "edge c : v0 -> v0\n"
    "map a -> a\n"
    "map b -> b a\n"
    "map t -> t a\n"
    "map c -> c b b\n";

// identity on a rank-2 rose
inline const char* EID_TEXT =
    "rep eid\n"
    "edge a : v0 -> v0\n"
    "edge b : v0 -> v0\n"
    "map a -> a\n"
    "map b -> b\n";

// multi-vertex rep: theta graph with a loop on each vertex
inline const char* EMV_TEXT =
    "rep emv\n"
    "vertices v0 v1\n"
    "edge t1 : v0 -> v1\n"
    "edge t2 : v0 -> v1\n"
    "edge b : v1 -> v1\n"
    "map t1 -> t1\n"
    "map t2 -> t2\n"
    "map b -> b ~t1 t2\n";

// rank-5 rose, degree 3, with an extra independent linear edge
inline const char* ER5_TEXT =
    "rep er5\n"
    "edge a : v0 -> v0\n"
    "edge b : v0 -> v0\n"
    "edge c : v0 -> v0\n"
    "edge d : v0 -> v0\n"
    "edge e : v0 -> v0\n"
    "map a -> a\n"
    "map b -> b a\n"
    "map c -> c b a b\n"
    "map d -> d c\n"
    "map e -> e a a\n";

// rank-4, quadratic, two vertices; suffixes start and end on different
// connecting edges so every junction stays cancellation free
inline const char* EMV2_TEXT =
    "rep emv2\n"
    "vertices v0 v1\n"
    "edge t : v0 -> v1\n"
    "edge s : v0 -> v1\n"
    "edge a : v1 -> v1\n"
    "edge b : v1 -> v1\n"
    "edge c : v0 -> v0\n"
    "map t -> t\n"
    "map s -> s\n"
    "map a -> a\n"
    "map b -> b ~t s\n"
    "map c -> c t b a ~s\n";

inline fg::Representative make(const char* text) { return fg::parse_rep(text).rep; }

struct SuiteRep {
  const char* name;
  const char* text;
  int eta;
};

// the degree-agreement suite: ranks 2..5, degrees 0..3
inline std::vector<SuiteRep> suite() {
  return {
      {"eid", EID_TEXT, 0},        {"e1r", E1R_TEXT, 1},     {"e1", E1_TEXT, 2},
      {"e2", E2_TEXT, 2},          {"emismatch", EMISMATCH_TEXT, 1},
      {"eqe", EQE_TEXT, 1},        {"ed3", ED3_TEXT, 3},     {"ecase3", ECASE3_TEXT, 2},
      {"emv", EMV_TEXT, 1},        {"er5", ER5_TEXT, 3},     {"emv2", EMV2_TEXT, 2},
  };
}

} // namespace fgtest

#endif
