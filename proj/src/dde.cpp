#include "hldde/dde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hldde/errors.hpp"
#include "hldde/extrapolate.hpp"
#include "hldde/phi.hpp"

namespace hldde {

namespace {

// cubic Hermite on the segment containing t; exact at the nodes
double hermite_eval(const std::vector<double>& ts, const std::vector<double>& vs,
                    const std::vector<double>& ds, double t, bool want_derivative) {
    if (ts.size() == 1 || t <= ts.front()) return want_derivative ? ds.front() : vs.front();
    if (t >= ts.back()) return want_derivative ? ds.back() : vs.back();
    std::size_t hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) -
                                              ts.begin());
    std::size_t lo = hi - 1;
    const double h = ts[hi] - ts[lo];
    const double s = (t - ts[lo]) / h;
    const double s2 = s * s, s3 = s2 * s;
    if (want_derivative) {
        return (6.0 * s2 - 6.0 * s) * (vs[lo] - vs[hi]) / h +
               (3.0 * s2 - 4.0 * s + 1.0) * ds[lo] + (3.0 * s2 - 2.0 * s) * ds[hi];
    }
    return (2.0 * s3 - 3.0 * s2 + 1.0) * vs[lo] + (s3 - 2.0 * s2 + s) * h * ds[lo] +
           (-2.0 * s3 + 3.0 * s2) * vs[hi] + (s3 - s2) * h * ds[hi];
}

} // namespace

void Trajectory::attach_history(std::function<double(double)> phi,
                                std::function<double(double)> phi_prime, double history_lo) {
    history_ = std::move(phi);
    history_prime_ = std::move(phi_prime);
    history_lo_ = history_lo;
    has_history_ = true;
}

double Trajectory::value(double t) const {
    if (!ts.empty() && t >= ts.front()) {
        if (t > ts.back() + 1e-12 * (1.0 + std::fabs(ts.back())))
            throw DomainError("Trajectory::value: t beyond the computed range");
        return hermite_eval(ts, ys, y_primes, t, false);
    }
    if (has_history_ && t >= history_lo_ - 1e-9 * (1.0 + std::fabs(history_lo_)))
        return history_(t);
    throw DomainError("Trajectory::value: t outside the covered range");
}

double Trajectory::derivative(double t) const {
    if (!ts.empty() && t >= ts.front()) {
        if (t > ts.back() + 1e-12 * (1.0 + std::fabs(ts.back())))
            throw DomainError("Trajectory::derivative: t beyond the computed range");
        return hermite_eval(ts, ys, y_primes, t, true);
    }
    if (has_history_ && t >= history_lo_ - 1e-9 * (1.0 + std::fabs(history_lo_)))
        return history_prime_(t);
    throw DomainError("Trajectory::derivative: t outside the covered range");
}

double Trajectory::quasi_value(double t) const {
    if (ts.empty() || t < ts.front() - 1e-12 * (1.0 + std::fabs(ts.front())) ||
        t > ts.back() + 1e-12 * (1.0 + std::fabs(ts.back())))
        throw DomainError("Trajectory::quasi_value: t outside the computed range");
    return hermite_eval(ts, quasis, quasi_primes, t, false);
}

double Trajectory::quasi_derivative(double t) const {
    if (ts.empty() || t < ts.front() - 1e-12 * (1.0 + std::fabs(ts.front())) ||
        t > ts.back() + 1e-12 * (1.0 + std::fabs(ts.back())))
        throw DomainError("Trajectory::quasi_derivative: t outside the computed range");
    return hermite_eval(ts, quasis, quasi_primes, t, true);
}

namespace {

struct State {
    double y = 0.0;
    double u = 0.0;
};

} // namespace

Trajectory solve(const HalfLinearEquation& eq, const HistorySpec& history, double t_end,
                 const SolveOptions& opts) {
    if (!history.phi || !history.phi_prime)
        throw InvalidParameter("solve: history closures must be set");
    const double a = eq.domain_start();
    if (!(t_end > a)) throw InvalidParameter("solve: t_end must exceed the start");
    if (!(opts.step > 0.0)) throw InvalidParameter("solve: step must be positive");
    if (!(opts.tol >= 0.0)) throw InvalidParameter("solve: tol must be nonnegative");

    const double alpha = eq.alpha();
    const DelayMap& delay = eq.delay();
    const bool ode = delay.is_identity();
    const double hist_lo = ode ? a : delay.tau(a);
    for (int k = 0; k <= 4; ++k) {
        const double s = hist_lo + k * (a - hist_lo) / 4.0;
        const double v = history.phi(s);
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidParameter("solve: history must be positive on [tau(a), a]");
    }

    Trajectory traj;
    traj.attach_history(history.phi, history.phi_prime, hist_lo);

    auto deriv = [&](double t, const State& s) -> State {
        State d;
        d.y = phi_inv(s.u / eq.r().eval(t), alpha);
        if (ode) {
            d.u = eq.p().eval(t) * phi(s.y, alpha);
        } else {
            const double sd = delay.tau(t);
            const double front = traj.ts.back();
            if (sd > front + 1e-9 * (1.0 + std::fabs(front)))
                throw DomainError("solve: delay causality violated");
            d.u = eq.p().eval(t) * phi(traj.value(sd), alpha);
        }
        return d;
    };
    auto rk4 = [&](double t, State s, double h) -> State {
        const State k1 = deriv(t, s);
        const State k2 = deriv(t + 0.5 * h, {s.y + 0.5 * h * k1.y, s.u + 0.5 * h * k1.u});
        const State k3 = deriv(t + 0.5 * h, {s.y + 0.5 * h * k2.y, s.u + 0.5 * h * k2.u});
        const State k4 = deriv(t + h, {s.y + h * k3.y, s.u + h * k3.u});
        s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        return s;
    };
    auto commit = [&](double t, const State& s) {
        traj.ts.push_back(t);
        traj.ys.push_back(s.y);
        traj.quasis.push_back(s.u);
        const State d = deriv(t, s);
        traj.y_primes.push_back(d.y);
        traj.quasi_primes.push_back(d.u);
    };

    State s;
    s.y = history.phi(a);
    s.u = history.start_quasiderivative ? *history.start_quasiderivative
                                        : eq.r().eval(a) * phi(history.phi_prime(a), alpha);
    commit(a, s);

    const bool fixed = opts.tol == 0.0;
    double t = a;
    double h = opts.step;
    while (t < t_end - 1e-12 * (1.0 + std::fabs(t_end))) {
        double cap = t_end - t;
        if (!ode) {
            const double dcap = delay.max_explicit_step(t);
            if (!(dcap > 0.0))
                throw PreconditionError("solve: delay must satisfy tau(t) < t past the start");
            cap = std::min(cap, dcap);
        }
        if (!fixed) cap = std::min(cap, 0.25 * (t + 1.0));
        const double hu = std::min(fixed ? opts.step : h, cap);

        if (fixed) {
            const State next = rk4(t, s, hu);
            t += hu;
            s = next;
            commit(t, s);
        } else {
            const State full = rk4(t, s, hu);
            const State half1 = rk4(t, s, 0.5 * hu);
            const State half2 = rk4(t + 0.5 * hu, half1, 0.5 * hu);
            const double dy = std::fabs(half2.y - full.y) / (std::fabs(half2.y) + 1e-300);
            const double du = std::fabs(half2.u - full.u) / (std::fabs(half2.u) + 1e-300);
            const double diff = std::max(dy, du);
            const bool floored = hu <= 1e-12 * (1.0 + t);
            if (diff > opts.tol && !floored) {
                h = 0.5 * hu;
                continue;
            }
            commit(t + 0.5 * hu, half1);
            t += hu;
            s = half2;
            commit(t, s);
            h = diff < opts.tol / 64.0 ? 2.0 * hu : std::max(h, hu);
        }

        const bool bad_pos = !(s.y > 0.0);
        const bool bad_inf = !std::isfinite(s.y) || !std::isfinite(s.u) ||
                             std::fabs(s.y) > 1e300 || std::fabs(s.u) > 1e300;
        if (bad_pos || bad_inf) {
            while (traj.ts.size() > 1 &&
                   (!(traj.ys.back() > 0.0) || !std::isfinite(traj.ys.back()) ||
                    !std::isfinite(traj.quasis.back()) || std::fabs(traj.ys.back()) > 1e300 ||
                    std::fabs(traj.quasis.back()) > 1e300)) {
                traj.ts.pop_back();
                traj.ys.pop_back();
                traj.y_primes.pop_back();
                traj.quasis.pop_back();
                traj.quasi_primes.pop_back();
            }
            traj.status = bad_inf && !bad_pos ? TrajectoryStatus::TruncatedOverflow
                                              : TrajectoryStatus::TruncatedNonpositive;
            break;
        }
    }
    return traj;
}

double residual(const HalfLinearEquation& eq, const std::function<double(double)>& y,
                const std::function<double(double)>& y_prime, const std::vector<double>& grid) {
    if (grid.size() < 5) throw PreconditionError("residual: need at least 5 grid points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i + 1] > grid[i]))
            throw InvalidParameter("residual: grid must be strictly increasing");
    const double alpha = eq.alpha();
    auto flux = [&](double t) { return eq.r().eval(t) * phi(y_prime(t), alpha); };
    double worst = 0.0;
    // symmetric five-point stencil on the closures, kept inside the grid span
    for (std::size_t i = 2; i + 2 < grid.size(); ++i) {
        const double t = grid[i];
        const double h = std::min(std::min(t - grid[i - 1], grid[i + 1] - t),
                                  0.5 * std::min(t - grid.front(), grid.back() - t));
        const double d = (-flux(t + 2.0 * h) + 8.0 * flux(t + h) - 8.0 * flux(t - h) +
                          flux(t - 2.0 * h)) /
                         (12.0 * h);
        const double rhs = eq.p().eval(t) * phi(y(eq.delay().tau(t)), alpha);
        worst = std::max(worst, std::fabs(d - rhs));
    }
    return worst;
}

CoefficientExpr manufactured_p(const CoefficientExpr& r, const DelayMap& tau, double rho,
                               double alpha) {
    if (r.has_custom() || !r.log_powers().empty() || r.exp_factor())
        throw InvalidParameter("manufactured_p: r must be a pure power");
    if (!(rho > 0.0)) throw InvalidParameter("manufactured_p: rho must be positive");
    if (!(alpha > 1.0)) throw InvalidParameter("manufactured_p: alpha must exceed 1");
    double lambda = 1.0;
    if (!tau.is_identity()) {
        if (tau.kind() != DelayMap::Kind::Proportional)
            throw InvalidParameter("manufactured_p: delay must be proportional (or identity)");
        lambda = tau.ratio();
    }
    const double gamma = r.power_exponent();
    const double k = gamma + (rho - 1.0) * (alpha - 1.0);
    if (!(k > 0.0))
        throw InvalidParameter("manufactured_p: gamma + (rho-1)(alpha-1) must be positive");
    const double scale =
        r.scale() * std::pow(rho, alpha - 1.0) * k * std::pow(lambda, -rho * (alpha - 1.0));
    return CoefficientExpr::power(scale, gamma - alpha);
}

std::string to_string(ClassLabel label) {
    switch (label) {
    case ClassLabel::IBB: return "I_{B,B}";
    case ClassLabel::IBInf: return "I_{B,inf}";
    case ClassLabel::IInfB: return "I_{inf,B}";
    case ClassLabel::IInfInf: return "I_{inf,inf}";
    case ClassLabel::D: return "D";
    default: return "Undetermined";
    }
}

namespace {

// monotone Cauchy test on geometric windows: shrinking increments mean a
// finite limit, stalled increments on a growing sequence mean infinity
LimitInfo limit_from_windows(const std::vector<double>& vals, bool increasing) {
    LimitInfo out;
    if (vals.size() < 5) return out;
    double dmax = 0.0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        dmax = std::max(dmax, std::fabs(vals[i + 1] - vals[i]));
    if (dmax <= 1e-12 * (1.0 + std::fabs(vals.back()))) {
        out.kind = LimitKind::Finite;
        out.value = vals.back();
        return out;
    }
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 2 < vals.size(); ++i) {
        const double d0 = std::fabs(vals[i + 1] - vals[i]);
        const double d1 = std::fabs(vals[i + 2] - vals[i + 1]);
        if (d0 > 0.0) ratios.push_back(d1 / d0);
    }
    if (ratios.size() < 3) return out;
    double qbar = 0.0;
    for (std::size_t i = ratios.size() - 3; i < ratios.size(); ++i) qbar += ratios[i];
    qbar /= 3.0;
    if (qbar <= 0.92) {
        out.kind = LimitKind::Finite;
        out.value = aitken_limit(vals).limit;
    } else if (qbar >= 0.98 && increasing) {
        out.kind = LimitKind::Infinite;
    }
    return out;
}

} // namespace

SolutionClass classify_trajectory(const Trajectory& traj, double tail_fraction) {
    if (traj.ts.size() < 2) throw InvalidParameter("classify_trajectory: trajectory too short");
    if (!(tail_fraction > 0.0) || !(tail_fraction <= 1.0))
        throw InvalidParameter("classify_trajectory: tail_fraction must lie in (0, 1]");
    const double t0 = traj.ts.front();
    const double T = traj.ts.back();
    const double t_burn = t0 * std::pow(T / t0, 1.0 - tail_fraction);
    std::size_t first = static_cast<std::size_t>(
        std::lower_bound(traj.ts.begin(), traj.ts.end(), t_burn) - traj.ts.begin());
    if (first >= traj.ts.size()) first = traj.ts.size() - 1;
    if (traj.ts.size() - first < 5)
        throw PreconditionError("classify_trajectory: need at least 5 nodes past burn-in");

    SolutionClass out;
    bool pos = false, neg = false;
    for (std::size_t i = first; i < traj.ts.size(); ++i) {
        if (traj.y_primes[i] > 0.0) pos = true;
        if (traj.y_primes[i] < 0.0) neg = true;
    }
    if (pos == neg) return out; // mixed signs (or all-zero tail): never forced
    out.monotonicity = pos ? Monotonicity::Increasing : Monotonicity::Decreasing;

    if (T / t_burn >= 100.0 * (1.0 - 1e-9)) {
        std::vector<double> ss;
        for (double s = T; s >= t_burn * (1.0 - 1e-12); s *= 0.5) ss.push_back(s);
        std::reverse(ss.begin(), ss.end());
        std::vector<double> yv, uv;
        for (double s : ss) {
            yv.push_back(traj.value(s));
            uv.push_back(traj.quasi_value(s));
        }
        out.y_limit = limit_from_windows(yv, pos);
        out.quasi_limit = limit_from_windows(uv, true);
    }

    if (out.monotonicity == Monotonicity::Decreasing) {
        out.label = ClassLabel::D;
    } else if (out.y_limit.kind != LimitKind::Undetermined &&
               out.quasi_limit.kind != LimitKind::Undetermined) {
        const bool yb = out.y_limit.kind == LimitKind::Finite;
        const bool ub = out.quasi_limit.kind == LimitKind::Finite;
        out.label = yb ? (ub ? ClassLabel::IBB : ClassLabel::IBInf)
                       : (ub ? ClassLabel::IInfB : ClassLabel::IInfInf);
    }
    return out;
}

} // namespace hldde
