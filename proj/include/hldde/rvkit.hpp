// Executable regular-variation toolkit: index estimation from samples or
// log-derivatives, integration-theorem ratio traces, de Haan Pi-class checks,
// and the omega(t) = t f'(t)/f(t) representation trace.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hldde/coefficient.hpp"

namespace hldde {

enum class RVVerdict { RV, SV, NotRV };

struct IndexEstimate {
    double index = 0.0;     // least-squares slope of ln f vs ln t, trailing decade
    double std_error = 0.0; // regression standard error of the slope
    double window_lo = 0.0;
    double window_hi = 0.0;
    RVVerdict verdict = RVVerdict::RV;
    // set when the estimate sits too close to the SV threshold for the verdict
    // to be trustworthy at finite scale
    bool boundary = false;
    std::vector<double> window_slopes; // one slope per decade, for drift tests
};

struct RvOptions {
    double sv_threshold = 0.05;
    double stability_tol = 0.02; // max inter-window slope change for SV
};

// Slope-based estimate from positive samples on an increasing grid spanning
// at least three decades. NotRV is a drift verdict: per-decade slopes moving
// monotonically by more than max(1, 10 * std_error) overall.
IndexEstimate estimate_rv_index(const std::vector<double>& ts, const std::vector<double>& fs,
                                const RvOptions& opt = {});

// Same verdict rules, but driven by the exact log-derivative samples
// t f'(t)/f(t) instead of regression slopes.
IndexEstimate nrv_index_from_logderivative(const std::function<double(double)>& f,
                                           const std::function<double(double)>& f_prime,
                                           const std::vector<double>& grid,
                                           const RvOptions& opt = {});

std::vector<std::pair<double, double>> representation_trace(
    const std::function<double(double)>& f, const std::function<double(double)>& f_prime,
    const std::vector<double>& grid);

// Ratio traces for the integration theorem on integrands t^theta L(t) with L
// slowly varying: TailConvergent (theta < -1) and HeadDivergent (theta > -1)
// compare the numeric integral against t^{theta+1} L(t) / |theta+1|; the
// Borderline mode (theta = -1) returns L / Ltilde, where Ltilde is the head
// or tail integral of L(s)/s per its own convergence, and the trace tends
// to 0 rather than 1.
enum class KaramataMode { TailConvergent, HeadDivergent, Borderline };

std::vector<std::pair<double, double>> karamata_check(const CoefficientExpr& L, double theta,
                                                      KaramataMode mode,
                                                      const std::vector<double>& grid);

struct PiClassReport {
    bool holds = false;
    std::vector<double> lambda_grid;
    double max_deviation = 0.0;         // over the lambda grid at the window end
    double initial_deviation = 0.0;     // same quantity at the window start
    std::vector<std::pair<double, double>> auxiliary_samples; // (t, w(t))
    std::vector<std::pair<double, double>> deviation_trace;   // (t, max over lambda)
};

// Tests (f(lambda t) - f(t)) / w(t) -> ln lambda across the grid; holds
// requires the max deviation to shrink from the first to the last usable
// grid point and to end below tol.
PiClassReport pi_class_check(const std::function<double(double)>& f,
                             const std::function<double(double)>& w,
                             const std::vector<double>& grid,
                             const std::vector<double>& lambdas = {0.5, 2.0, 4.0},
                             double tol = 0.25);

} // namespace hldde
