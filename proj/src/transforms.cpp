// Reciprocal and rectifying transformations together with their numeric
// consistency checkers.
#include "hldde/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "hldde/improper.hpp"
#include "hldde/phi.hpp"
#include "hldde/quadrature.hpp"

#include "asymptotics_detail.hpp"

namespace hldde {

namespace {

// f composed with the delay. Structure survives when the composition stays
// inside the power-log family; otherwise a closure with the exact chain-rule
// derivative.
CoefficientExpr compose_with_delay(const CoefficientExpr& f, const DelayMap& delay) {
    if (delay.is_identity()) return f;
    if (f.is_structured() && f.power_exponent() == 0.0 && f.log_powers().empty())
        return f;
    if (delay.kind() == DelayMap::Kind::Proportional && f.is_structured() &&
        f.log_powers().empty()) {
        double pw = f.power_exponent();
        return CoefficientExpr::power(f.scale() * std::pow(delay.ratio(), pw), pw);
    }
    return CoefficientExpr::custom_fn(
        [f, delay](double t) { return f.eval(delay.tau(t)); },
        [f, delay](double t) { return f.deriv(delay.tau(t)) * delay.tau_prime(t); });
}

CoefficientExpr tau_prime_factor(const DelayMap& delay) {
    switch (delay.kind()) {
    case DelayMap::Kind::Shift: return CoefficientExpr::constant(1.0);
    case DelayMap::Kind::Proportional: return CoefficientExpr::constant(delay.ratio());
    case DelayMap::Kind::Custom:
    default:
        // tau'' is not part of the delay interface; difference tau' for the
        // derivative closure
        return CoefficientExpr::custom_fn(
            [delay](double t) { return delay.tau_prime(t); },
            [delay](double t) {
                double h = 1e-5 * (1.0 + std::fabs(t));
                return (delay.tau_prime(t + h) - delay.tau_prime(t - h)) / (2.0 * h);
            });
    }
}

} // namespace

ReciprocalTransform reciprocal_transform(const HalfLinearEquation& eq) {
    double beta = eq.beta();
    CoefficientExpr r_tilde = eq.p().pow(1.0 - beta);
    CoefficientExpr p_tilde =
        tau_prime_factor(eq.delay()) * compose_with_delay(eq.r().pow(1.0 - beta), eq.delay());
    HalfLinearEquation rec(beta, std::move(r_tilde), std::move(p_tilde), eq.delay(),
                           eq.domain_start());
    std::optional<double> dt;
    if (eq.p().is_structured()) dt = eq.delta() * (1.0 - beta) - beta;
    return ReciprocalTransform{std::move(rec), eq, dt};
}

double ReciprocalTransform::quasiderivative_residual(const Trajectory& traj,
                                                     const std::vector<double>& grid) const {
    if (grid.size() < 5) throw PreconditionError("quasiderivative_residual: need >= 5 grid points");
    const double deg = equation.alpha(); // = beta of the base equation
    auto rhs = [this, &traj, deg](double s) {
        return equation.p_eval(s) * phi(traj.quasi_value(equation.delay().tau(s)), deg);
    };
    // integrated form over consecutive windows, boundaries snapped to
    // trajectory nodes: the flux uses the stored nodal slopes, so only the
    // delayed value under the integral is interpolated
    auto snap = [&traj](double t) -> std::size_t {
        auto it = std::lower_bound(traj.ts.begin(), traj.ts.end(), t);
        if (it == traj.ts.end()) return traj.ts.size() - 1;
        if (it != traj.ts.begin() && t - *(it - 1) < *it - t) --it;
        return static_cast<std::size_t>(it - traj.ts.begin());
    };
    double worst = 0.0;
    int used = 0;
    std::size_t prev = snap(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const std::size_t cur = snap(grid[i]);
        if (cur <= prev) continue;
        const double t1 = traj.ts[prev], t2 = traj.ts[cur];
        if (equation.delay().tau(t1) < traj.t_start()) { prev = cur; continue; } // no quasi history
        const double inc = equation.r_eval(t2) * phi(traj.quasi_primes[cur], deg) -
                           equation.r_eval(t1) * phi(traj.quasi_primes[prev], deg);
        const double integral = quad(rhs, t1, t2).value;
        worst = std::max(worst, std::fabs(inc - integral) / (1.0 + std::fabs(inc)));
        ++used;
        prev = cur;
    }
    if (used == 0)
        throw PreconditionError("quasiderivative_residual: no usable grid points");
    return worst;
}

std::vector<std::pair<double, double>>
ReciprocalTransform::smallness_ratio(const std::vector<double>& grid) const {
    double alpha = base.alpha(), beta = base.beta();
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double t : grid) {
        double num = std::pow(t, beta) * equation.p_eval(t) / equation.r_eval(t);
        double den = std::pow(std::pow(t, alpha) * base.p_eval(t) / base.r_eval(t), beta - 1.0) *
                     base.delay().tau_prime(t);
        out.emplace_back(t, num / den);
    }
    return out;
}

TransformedEquation change_of_variables(const HalfLinearEquation& eq, const ChangeOfVariable& cov) {
    double beta = eq.beta();
    std::optional<ChangeOfVariable::Mode> expected;
    if (eq.r().is_structured()) {
        expected = exponent_rule(eq.r().pow(1.0 - beta)) == Convergence::Divergent
                       ? ChangeOfVariable::Mode::HeadDivergent
                       : ChangeOfVariable::Mode::TailConvergent;
    } else {
        try {
            auto v = classify_improper(
                std::function<double(double)>(
                    [eq, beta](double t) { return std::pow(eq.r_eval(t), 1.0 - beta); }),
                eq.domain_start());
            expected = v.convergence == Convergence::Divergent
                           ? ChangeOfVariable::Mode::HeadDivergent
                           : ChangeOfVariable::Mode::TailConvergent;
        } catch (const InconclusiveError&) {
            // boundary integrand: trust the mode the substitution was built with
        }
    }
    if (expected && *expected != cov.mode)
        throw PreconditionError("change_of_variables: substitution mode does not match int r^{1-beta}");

    TransformedEquation te;
    te.cov = cov;
    te.alpha = eq.alpha();
    te.s_start = cov.forward(eq.domain_start());
    double alpha = eq.alpha();
    te.p_hat = [eq, cov](double s) {
        double t = cov.inverse(s);
        return eq.p_eval(t) / cov.forward_derivative(t);
    };
    te.r_hat = [eq, cov, alpha](double s) {
        double t = cov.inverse(s);
        return eq.r_eval(t) * std::pow(cov.forward_derivative(t), alpha - 1.0);
    };
    te.tau_hat = [eq, cov](double s) { return cov.forward(eq.delay().tau(cov.inverse(s))); };
    te.tau_hat_prime = [eq, cov](double s) {
        double t = cov.inverse(s);
        return cov.forward_derivative(eq.delay().tau(t)) * eq.delay().tau_prime(t) /
               cov.forward_derivative(t);
    };
    return te;
}

double TransformedEquation::r_hat_deviation(const std::vector<double>& s_grid) const {
    if (s_grid.empty()) throw PreconditionError("r_hat_deviation: empty grid");
    double worst = 0.0;
    for (double s : s_grid) {
        double pred = cov.mode == ChangeOfVariable::Mode::HeadDivergent
                          ? 1.0
                          : std::pow(s, 2.0 * alpha - 2.0);
        worst = std::max(worst, std::fabs(r_hat(s) - pred) / pred);
    }
    return worst;
}

double TransformedEquation::quasiderivative_equality(const Trajectory& traj,
                                                     const std::vector<double>& t_grid) const {
    if (t_grid.empty()) throw PreconditionError("quasiderivative_equality: empty grid");
    double worst = 0.0;
    for (double t : t_grid) {
        double xp = traj.derivative(t) / cov.forward_derivative(t);
        double lhs = r_hat(cov.forward(t)) * phi(xp, alpha);
        double rhs = traj.quasi_value(t);
        worst = std::max(worst, std::fabs(lhs - rhs) / (1.0 + std::fabs(rhs)));
    }
    return worst;
}

} // namespace hldde
