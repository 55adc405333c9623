#pragma once

#include <vector>

namespace hldde {

// Geometrically spaced nodes from lo to hi, pts_per_decade per factor of 10,
// endpoints included exactly.
std::vector<double> geometric_grid(double lo, double hi, int pts_per_decade = 60);

} // namespace hldde
