#ifndef FOLDGROWTH_UNITS_HPP
#define FOLDGROWTH_UNITS_HPP

#include <string>
#include <vector>

#include "foldgrowth/rep.hpp"

namespace fg {

enum class UnitKind { FF, FR, FE, LF, LR, LE, QE };
const char* unit_kind_name(UnitKind k);
inline bool passive_kind(UnitKind k) {
  return k == UnitKind::FF || k == UnitKind::FR || k == UnitKind::FE;
}

struct GrowthUnit {
  UnitKind kind;
  int a = -1;  // geometric edge ids in the efficient order, -1 when n/a
  int b = -1;
  int d = 0;   // signed power / chain length, kind dependent
  Path path;
};

struct Separation {
  std::vector<GrowthUnit> units;
  bool canonical = true;
};

// primitive suffix root data of a linear edge
struct MuData {
  Path mu;
  int m;
  std::vector<Path> kappas;
};
MuData mu_of(const Analyzed& a, int ge);

// canonical separation of a tight path of at most linear height
Separation separate(const Analyzed& a, const Path& rho);

std::string show_units(const Analyzed& a, const Separation& s);

// true iff the path is not a subpath of any Nielsen path
bool is_essentially_unbounded(const Analyzed& a, const Path& rho);

struct SeparationReport {
  bool vacuous = false;
  bool pass = false;
  std::string witness;  // description of the essentially unbounded subpath
};
SeparationReport separation_properties_check(const Analyzed& a, const Path& rho);

// test oracle: all tilings of rho by passive units (bounded overhang handled
// by the caller); returns the number of exact tilings found
int count_passive_tilings(const Analyzed& a, const Path& rho, int limit = 8);

} // namespace fg

#endif
