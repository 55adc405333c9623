#include "hldde/grid.hpp"

#include <cmath>

#include "hldde/errors.hpp"

namespace hldde {

std::vector<double> geometric_grid(double lo, double hi, int pts_per_decade) {
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidParameter("geometric_grid: need 0 < lo < hi");
    if (pts_per_decade < 1) throw InvalidParameter("geometric_grid: need at least one point per decade");
    const double decades = std::log10(hi / lo);
    const int n = std::max(1, static_cast<int>(std::ceil(decades * pts_per_decade)));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    g.front() = lo;
    g.back() = hi;
    return g;
}

} // namespace hldde
