#pragma once

#include <string>
#include <vector>

#include "plastokh/grid.hpp"

namespace plastokh {

/// Bit-stable CSV exports: 17 significant digits, rows in lexicographic
/// node order. Headers are `x,y,z,value` (volume), `x,y,value,face`
/// (faces), `x,z,value,sheet` (surfaces).
void export_volume(const Field3& f, const std::string& path);
void export_face(const FaceField& f, const std::string& path);
void export_surface(const SurfaceField& s, const std::string& path);

/// Value column of a previously exported file, in row order.
std::vector<double> import_values(const std::string& path);

} // namespace plastokh
