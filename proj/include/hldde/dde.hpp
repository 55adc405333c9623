// Method-of-steps integrator for (r(t) Phi(y'))' = p(t) Phi(y(tau(t))) as the
// first-order system y' = Phi^{-1}(u/r), u' = p Phi(y(tau(t))), with cubic
// Hermite dense output, manufactured-solution oracles, and classification of
// computed trajectories into the increasing/decreasing solution classes.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hldde/equation.hpp"

namespace hldde {

struct HistorySpec {
    std::function<double(double)> phi;       // positive on [tau(a), a]
    std::function<double(double)> phi_prime; // derivative of phi
    // y^{[1]}(a); defaults to r(a) Phi(phi'(a))
    std::optional<double> start_quasiderivative;
};

enum class TrajectoryStatus { Complete, TruncatedNonpositive, TruncatedOverflow };

// Accepted half-step nodes with values, derivatives and quasiderivatives.
// value/derivative fall back to the history on [tau(a), a]; queries never
// extrapolate past the last node.
class Trajectory {
public:
    std::vector<double> ts;
    std::vector<double> ys;
    std::vector<double> y_primes;
    std::vector<double> quasis;       // u = r Phi(y')
    std::vector<double> quasi_primes; // u' = p Phi(y(tau))
    TrajectoryStatus status = TrajectoryStatus::Complete;

    double t_start() const { return ts.front(); }
    double t_end() const { return ts.back(); }

    double value(double t) const;
    double derivative(double t) const;
    double quasi_value(double t) const;
    double quasi_derivative(double t) const;

    // set by solve so that delayed queries below the start node keep working
    void attach_history(std::function<double(double)> phi, std::function<double(double)> phi_prime,
                        double history_lo);

private:
    std::function<double(double)> history_;
    std::function<double(double)> history_prime_;
    double history_lo_ = 0.0;
    bool has_history_ = false;
};

struct SolveOptions {
    double step = 0.05; // initial step; also the fixed step when tol == 0
    double tol = 1e-10; // per-step relative halved-step difference; 0 disables
};

Trajectory solve(const HalfLinearEquation& eq, const HistorySpec& history, double t_end,
                 const SolveOptions& opts = {});

// Max absolute residual |d/dt[r Phi(y')] - p Phi(y(tau))| over interior grid
// points, the flux derivative taken by central differences.
double residual(const HalfLinearEquation& eq, const std::function<double(double)>& y,
                const std::function<double(double)>& y_prime, const std::vector<double>& grid);

// The unique coefficient p making y = t^rho an exact solution for a pure
// power r = c t^gamma and a proportional delay.
CoefficientExpr manufactured_p(const CoefficientExpr& r, const DelayMap& tau, double rho,
                               double alpha);

enum class Monotonicity { Increasing, Decreasing, Undetermined };
enum class LimitKind { Finite, Infinite, Undetermined };

struct LimitInfo {
    LimitKind kind = LimitKind::Undetermined;
    double value = 0.0; // meaningful only when kind == Finite
};

enum class ClassLabel { IBB, IBInf, IInfB, IInfInf, D, Undetermined };

std::string to_string(ClassLabel label);

struct SolutionClass {
    Monotonicity monotonicity = Monotonicity::Undetermined;
    LimitInfo y_limit;
    LimitInfo quasi_limit;
    ClassLabel label = ClassLabel::Undetermined;
};

// Monotonicity from the sign of y' past a logarithmic burn-in; limits by a
// monotone Cauchy test on geometric windows (needs two decades of tail,
// otherwise they stay Undetermined). tail_fraction is the kept share of the
// log time span.
SolutionClass classify_trajectory(const Trajectory& traj, double tail_fraction = 0.8);

} // namespace hldde
