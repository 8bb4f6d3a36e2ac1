// Exact Euclidean distance transform on the cell-centered grid, separable
// lower-envelope-of-parabolas pass per axis.  Distances are measured to the
// centers of the seed cells, in physical units.
#pragma once

#include "ura/core.hpp"

namespace ura {

// seeds[c] != 0 marks cell c as a source.  Returns per-cell distance,
// +inf where no seed exists at all.
std::vector<double> distance_transform(const Grid& grid, const std::vector<std::uint8_t>& seeds);

}  // namespace ura
