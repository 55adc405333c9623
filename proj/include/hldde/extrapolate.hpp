// Limit extraction from slowly converging traces: iterated Aitken
// acceleration for geometric-ish remainders, and a gauge-based quadratic fit
// for remainders that shrink like a known tail integral.
#pragma once

#include <vector>

namespace hldde {

struct AitkenResult {
    double limit = 0.0;
    double error_estimate = 0.0; // size of the last applied correction
};

// Iterated Aitken delta-squared on a sequence; robust to remainders that are
// sums of a few geometric modes. Needs at least 3 entries.
AitkenResult aitken_limit(std::vector<double> sequence);

struct GaugeLimit {
    double limit = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double rms_residual = 0.0;
};

// Least-squares fit of value ~ limit - c1*g - c2*g^2 where g is a known
// gauge tending to 0 (typically a tail integral). Gauges must be positive;
// needs at least 4 samples.
GaugeLimit fit_gauge_limit(const std::vector<double>& gauges, const std::vector<double>& values);

} // namespace hldde
