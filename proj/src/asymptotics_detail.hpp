// Shared numeric helpers for the hypothesis engines and transform checkers.
// Internal to the library; not installed.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "hldde/errors.hpp"

namespace hldde::detail {

inline std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidParameter("geometric_grid: need 0 < lo < hi");
    int n = std::max(3, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    std::vector<double> g(static_cast<size_t>(n));
    double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo * std::exp(step * i);
    g.back() = hi;
    return g;
}

inline double five_point_derivative(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
}

struct Trend {
    double final_value = std::numeric_limits<double>::quiet_NaN();
    bool decreasing = false;
    bool pass = false;
    std::vector<std::pair<double, double>> trace;
};

// Desk-scale stand-in for "f -> 0": sampled on a geometric grid, strictly
// smaller at hi than one and two decades earlier (or already flushed to a
// zero plateau), final value at most threshold.
inline Trend trend_to_zero(const std::function<double(double)>& f, double lo, double hi,
                           double threshold, int per_decade = 16) {
    Trend tr;
    auto grid = geometric_grid(lo, hi, per_decade);
    tr.trace.reserve(grid.size());
    for (double t : grid) tr.trace.emplace_back(t, f(t));
    auto value_near = [&](double t) {
        size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < tr.trace.size(); ++i) {
            double d = std::fabs(std::log(tr.trace[i].first / t));
            if (d < bd) { bd = d; best = i; }
        }
        return tr.trace[best].second;
    };
    double v2 = value_near(hi / 100.0);
    double v1 = value_near(hi / 10.0);
    double v0 = tr.trace.back().second;
    tr.final_value = v0;
    bool finite = std::isfinite(v0) && std::isfinite(v1) && std::isfinite(v2);
    tr.decreasing = finite && ((v0 < v1 && v1 < v2) || (v0 <= 1e-12 && v1 <= 1e-12));
    tr.pass = tr.decreasing && v0 <= threshold;
    return tr;
}

inline bool close_rel(double x, double target, double tol) {
    return std::isfinite(x) && std::fabs(x - target) <= tol * std::max(1.0, std::fabs(target));
}

// Largest top end <= want (probing downward decade by decade, staying above
// 100*lo) at which every probe function is finite and representably sized.
inline double safe_top(double lo, double want,
                       const std::vector<std::function<double(double)>>& fns) {
    double top = want;
    while (top > 100.0 * lo) {
        bool ok = true;
        for (const auto& f : fns) {
            double v;
            try {
                v = f(top);
            } catch (...) {
                ok = false;
                break;
            }
            if (!std::isfinite(v) || std::fabs(v) > 1e290) { ok = false; break; }
        }
        if (ok) return top;
        top /= 10.0;
    }
    return top;
}

} // namespace hldde::detail
