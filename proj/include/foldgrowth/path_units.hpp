#ifndef FOLDGROWTH_PATH_UNITS_HPP
#define FOLDGROWTH_PATH_UNITS_HPP

#include <string>
#include <vector>

#include "foldgrowth/rep.hpp"

namespace fg {

enum class PathUnitType { none, i, ii, iii };

struct PathUnit {
  PathUnitType type = PathUnitType::none;
  int degree = 0;
  int a = -1;  // geometric ids, efficient order
  int b = -1;
  Path path;   // the whole unit; gamma = path minus the stratum edges
};

// canonical f-splitting: cut before e_i / after ~e_i for every stratum edge of
// the path's degree class (only e_h for linear paths); each cut is probed
std::vector<Path> canonical_f_split(const Analyzed& a, const Path& rho, int probe_depth = 4);

// classify one splitting piece of a degree-d path
PathUnit classify_piece(const Analyzed& a, const Path& piece, int d);

struct StructureEntry {
  PathUnitType type = PathUnitType::none;  // none encodes the empty entry
  int a = -1;
  int b = -1;
  bool operator==(const StructureEntry& o) const = default;
};

std::vector<StructureEntry> unit_structure(const Analyzed& a, const Path& rho);

std::string show_split(const Analyzed& a, const std::vector<Path>& pieces);
std::string show_structure(const std::vector<StructureEntry>& s);

} // namespace fg

#endif
