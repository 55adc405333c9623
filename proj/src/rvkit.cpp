#include "hldde/rvkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hldde/change_of_variable.hpp"
#include "hldde/errors.hpp"
#include "hldde/improper.hpp"
#include "hldde/quadrature.hpp"

namespace hldde {

namespace {

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// ordinary least squares of ys on xs over [b, e)
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t b,
                   std::size_t e) {
    SlopeFit out;
    out.n = e - b;
    if (out.n < 3) return out;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = b; i < e; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(out.n);
    my /= static_cast<double>(out.n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = b; i < e; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) return out;
    out.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = b; i < e; ++i) {
        double res = ys[i] - my - out.slope * (xs[i] - mx);
        rss += res * res;
    }
    out.se = std::sqrt(rss / static_cast<double>(out.n - 2) / sxx);
    return out;
}

struct MeanFit {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanFit fit_mean(const std::vector<double>& vs, std::size_t b, std::size_t e) {
    MeanFit out;
    out.n = e - b;
    if (out.n == 0) return out;
    for (std::size_t i = b; i < e; ++i) out.mean += vs[i];
    out.mean /= static_cast<double>(out.n);
    if (out.n < 2) return out;
    double ss = 0.0;
    for (std::size_t i = b; i < e; ++i) ss += (vs[i] - out.mean) * (vs[i] - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
    return out;
}

void require_grid(const std::vector<double>& ts) {
    if (ts.size() < 8) throw InvalidParameter("rvkit: need at least 8 samples");
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (!(ts[i] > 0.0) || !(ts[i + 1] > ts[i]))
            throw InvalidParameter("rvkit: grid must be positive and strictly increasing");
    }
    if (ts.back() < 1000.0 * ts.front() * (1.0 - 1e-9))
        throw PreconditionError("rvkit: grid must span at least three decades");
}

// half-open index ranges of dyadic windows [hi/2^{k+1}, hi/2^k], increasing t
std::vector<std::pair<std::size_t, std::size_t>> dyadic_ranges(const std::vector<double>& ts) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    double hi = ts.back();
    while (true) {
        double lo = hi / 2.0;
        if (lo < ts.front() * (1.0 - 1e-12)) break;
        auto b = std::lower_bound(ts.begin(), ts.end(), lo * (1.0 - 1e-12)) - ts.begin();
        auto e = std::upper_bound(ts.begin(), ts.end(), hi * (1.0 + 1e-12)) - ts.begin();
        if (static_cast<std::size_t>(e - b) < 3) break;
        out.emplace_back(static_cast<std::size_t>(b), static_cast<std::size_t>(e));
        hi = lo;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::pair<std::size_t, std::size_t> trailing_decade(const std::vector<double>& ts) {
    double lo = ts.back() / 10.0;
    auto b = std::lower_bound(ts.begin(), ts.end(), lo * (1.0 - 1e-12)) - ts.begin();
    return {static_cast<std::size_t>(b), ts.size()};
}

// drift is monotone when steps against the overall direction stay negligible
bool monotone_drift(const std::vector<double>& ws, double total, double slack) {
    double sign = total >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
        double step = (ws[i + 1] - ws[i]) * sign;
        if (step < -(0.05 * std::fabs(total) + slack)) return false;
    }
    return true;
}

IndexEstimate assemble(const std::vector<double>& ts, double index, double se,
                       std::vector<double> window_slopes, const RvOptions& opt) {
    IndexEstimate est;
    est.index = index;
    est.std_error = se;
    auto [tb, te] = trailing_decade(ts);
    est.window_lo = ts[tb];
    est.window_hi = ts[te - 1];
    est.window_slopes = std::move(window_slopes);

    bool not_rv = false;
    if (est.window_slopes.size() >= 3) {
        double total = est.window_slopes.back() - est.window_slopes.front();
        double band = std::max(1.0, 10.0 * se);
        if (std::fabs(total) > band && monotone_drift(est.window_slopes, total, opt.stability_tol))
            not_rv = true;
    }
    bool stable = true;
    if (est.window_slopes.size() >= 2) {
        std::size_t m = est.window_slopes.size();
        stable = std::fabs(est.window_slopes[m - 1] - est.window_slopes[m - 2]) < opt.stability_tol;
    }
    bool sv_magnitude = std::fabs(index) <= opt.sv_threshold;
    if (not_rv)
        est.verdict = RVVerdict::NotRV;
    else if (sv_magnitude && stable)
        est.verdict = RVVerdict::SV;
    else
        est.verdict = RVVerdict::RV;
    // finite-sample SV vs RV(eps) separation near the threshold is not possible
    est.boundary = std::fabs(std::fabs(index) - opt.sv_threshold) <= std::max(0.01, 2.0 * se) ||
                   (!not_rv && sv_magnitude && !stable);
    return est;
}

} // namespace

IndexEstimate estimate_rv_index(const std::vector<double>& ts, const std::vector<double>& fs,
                                const RvOptions& opt) {
    if (ts.size() != fs.size()) throw InvalidParameter("estimate_rv_index: size mismatch");
    require_grid(ts);
    std::vector<double> xs(ts.size()), ys(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(fs[i] > 0.0) || !std::isfinite(fs[i]))
            throw DomainError("estimate_rv_index: samples must be positive and finite");
        xs[i] = std::log(ts[i]);
        ys[i] = std::log(fs[i]);
    }
    auto [tb, te] = trailing_decade(ts);
    SlopeFit trail = fit_slope(xs, ys, tb, te);
    if (trail.n < 3) throw PreconditionError("estimate_rv_index: trailing decade too sparse");
    std::vector<double> slopes;
    for (auto [b, e] : dyadic_ranges(ts)) slopes.push_back(fit_slope(xs, ys, b, e).slope);
    return assemble(ts, trail.slope, trail.se, std::move(slopes), opt);
}

IndexEstimate nrv_index_from_logderivative(const std::function<double(double)>& f,
                                           const std::function<double(double)>& f_prime,
                                           const std::vector<double>& grid,
                                           const RvOptions& opt) {
    require_grid(grid);
    std::vector<double> omega(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = f(grid[i]);
        if (v == 0.0 || !std::isfinite(v))
            throw DomainError("nrv_index_from_logderivative: f vanishes on the grid");
        omega[i] = grid[i] * f_prime(grid[i]) / v;
    }
    auto [tb, te] = trailing_decade(grid);
    MeanFit trail = fit_mean(omega, tb, te);
    if (trail.n < 3)
        throw PreconditionError("nrv_index_from_logderivative: trailing decade too sparse");
    std::vector<double> means;
    for (auto [b, e] : dyadic_ranges(grid)) means.push_back(fit_mean(omega, b, e).mean);
    return assemble(grid, trail.mean, trail.se, std::move(means), opt);
}

std::vector<std::pair<double, double>> representation_trace(
    const std::function<double(double)>& f, const std::function<double(double)>& f_prime,
    const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidParameter("representation_trace: empty grid");
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double t : grid) {
        double v = f(t);
        if (v == 0.0 || !std::isfinite(v))
            throw DomainError("representation_trace: f vanishes on the grid");
        out.emplace_back(t, t * f_prime(t) / v);
    }
    return out;
}

namespace {

double tail_value(const CoefficientExpr& expr, double t) {
    if (expr.is_structured()) return tail_integral(expr, t, 1e-10).value;
    auto f = [&expr](double s) { return expr.eval(s); };
    return tail_integral(f, t, 1e-9).value;
}

} // namespace

std::vector<std::pair<double, double>> karamata_check(const CoefficientExpr& L, double theta,
                                                      KaramataMode mode,
                                                      const std::vector<double>& grid) {
    if (grid.size() < 2) throw InvalidParameter("karamata_check: need at least 2 grid points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] > 0.0) || !(grid[i + 1] > grid[i]))
            throw InvalidParameter("karamata_check: grid must be positive and increasing");

    CoefficientExpr integrand = L.times_power(1.0, theta);
    auto asym = [&L, theta](double t) {
        return std::pow(t, theta + 1.0) * L.eval(t) / std::fabs(theta + 1.0);
    };
    std::vector<std::pair<double, double>> trace;
    trace.reserve(grid.size());

    switch (mode) {
    case KaramataMode::TailConvergent: {
        if (!(theta < -1.0 - 1e-12))
            throw PreconditionError("karamata_check: TailConvergent needs theta < -1");
        for (double t : grid) trace.emplace_back(t, tail_value(integrand, t) / asym(t));
        break;
    }
    case KaramataMode::HeadDivergent: {
        if (!(theta > -1.0 + 1e-12))
            throw PreconditionError("karamata_check: HeadDivergent needs theta > -1");
        auto f = [&integrand](double s) { return integrand.eval(s); };
        CumulativeMap head = CumulativeMap::head(f, grid.front(), grid.back());
        for (double t : grid) trace.emplace_back(t, head.value(t) / asym(t));
        break;
    }
    case KaramataMode::Borderline: {
        if (std::fabs(theta + 1.0) > 1e-12)
            throw PreconditionError("karamata_check: Borderline needs theta = -1");
        ImproperVerdict verdict = classify_improper(integrand, grid.front());
        if (verdict.convergence == Convergence::Convergent) {
            for (double t : grid) trace.emplace_back(t, L.eval(t) / tail_value(integrand, t));
        } else {
            auto f = [&integrand](double s) { return integrand.eval(s); };
            CumulativeMap head = CumulativeMap::head(f, grid.front(), grid.back());
            for (double t : grid) {
                double denom = head.value(t);
                if (denom > 0.0) trace.emplace_back(t, L.eval(t) / denom);
            }
        }
        break;
    }
    }
    return trace;
}

PiClassReport pi_class_check(const std::function<double(double)>& f,
                             const std::function<double(double)>& w,
                             const std::vector<double>& grid, const std::vector<double>& lambdas,
                             double tol) {
    if (grid.size() < 2) throw InvalidParameter("pi_class_check: need at least 2 grid points");
    if (lambdas.empty()) throw InvalidParameter("pi_class_check: empty lambda grid");
    for (double lam : lambdas)
        if (!(lam > 0.0)) throw InvalidParameter("pi_class_check: lambdas must be positive");

    PiClassReport report;
    report.lambda_grid = lambdas;
    for (double t : grid) {
        double wt = w(t);
        if (wt == 0.0 || !std::isfinite(wt))
            throw DomainError("pi_class_check: auxiliary w vanishes on the grid");
        double ft = f(t);
        double dev = 0.0;
        for (double lam : lambdas)
            dev = std::max(dev, std::fabs((f(lam * t) - ft) / wt - std::log(lam)));
        report.auxiliary_samples.emplace_back(t, wt);
        report.deviation_trace.emplace_back(t, dev);
    }
    report.initial_deviation = report.deviation_trace.front().second;
    report.max_deviation = report.deviation_trace.back().second;
    report.holds =
        report.max_deviation <= tol && report.max_deviation <= report.initial_deviation;
    return report;
}

} // namespace hldde
