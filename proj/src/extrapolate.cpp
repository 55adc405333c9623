#include "hldde/extrapolate.hpp"

#include <cmath>
#include <cstddef>

#include "hldde/errors.hpp"

namespace hldde {

// Remainders that are sums of a few geometric modes collapse one mode per
// sweep; the error estimate tracks the last correction actually applied.
AitkenResult aitken_limit(std::vector<double> s) {
    if (s.size() < 3) throw InvalidParameter("aitken_limit: need at least 3 entries");
    AitkenResult out;
    out.limit = s.back();
    out.error_estimate = std::fabs(s[s.size() - 1] - s[s.size() - 2]);
    while (s.size() >= 3) {
        std::vector<double> nxt;
        nxt.reserve(s.size() - 2);
        for (std::size_t i = 0; i + 2 < s.size(); ++i) {
            const double d1 = s[i + 1] - s[i];
            const double d2 = s[i + 2] - s[i + 1];
            const double den = d2 - d1;
            if (den == 0.0 || !std::isfinite(den)) {
                nxt.push_back(s[i + 2]);
                continue;
            }
            nxt.push_back(s[i + 2] - d2 * d2 / den);
        }
        const double cand = nxt.back();
        if (!std::isfinite(cand)) break;
        out.error_estimate = std::fabs(cand - out.limit);
        out.limit = cand;
        if (nxt.size() >= 2 &&
            std::fabs(nxt[nxt.size() - 1] - nxt[nxt.size() - 2]) >= out.error_estimate) {
            // the stage stopped contracting; further sweeps only amplify noise
            break;
        }
        s = std::move(nxt);
    }
    return out;
}

GaugeLimit fit_gauge_limit(const std::vector<double>& gauges, const std::vector<double>& values) {
    if (gauges.size() != values.size()) throw InvalidParameter("fit_gauge_limit: size mismatch");
    const std::size_t n = gauges.size();
    if (n < 4) throw InvalidParameter("fit_gauge_limit: need at least 4 samples");
    double gmax = 0.0;
    for (double g : gauges) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw DomainError("fit_gauge_limit: gauges must be positive and finite");
        gmax = std::max(gmax, g);
    }
    // normal equations for value ~ a0 + a1*x + a2*x^2 with x = g/gmax
    double s0 = static_cast<double>(n), s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = gauges[i] / gmax;
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        b0 += values[i];
        b1 += values[i] * x;
        b2 += values[i] * x2;
    }
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * s3 - s2 * s2);
    if (det == 0.0 || !std::isfinite(det))
        throw DomainError("fit_gauge_limit: degenerate gauge design");
    const double a0 = (b0 * (s2 * s4 - s3 * s3) - s1 * (b1 * s4 - b2 * s3) +
                       s2 * (b1 * s3 - b2 * s2)) /
                      det;
    const double a1 = (s0 * (b1 * s4 - b2 * s3) - b0 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * b2 - s2 * b1)) /
                      det;
    const double a2 = (s0 * (s2 * b2 - s3 * b1) - s1 * (s1 * b2 - b1 * s2) +
                       b0 * (s1 * s3 - s2 * s2)) /
                      det;
    GaugeLimit out;
    out.limit = a0;
    out.c1 = -a1 / gmax;
    out.c2 = -a2 / (gmax * gmax);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = gauges[i] / gmax;
        const double res = values[i] - (a0 + a1 * x + a2 * x * x);
        rss += res * res;
    }
    out.rms_residual = std::sqrt(rss / static_cast<double>(n));
    return out;
}

} // namespace hldde
