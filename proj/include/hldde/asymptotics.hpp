// Hypothesis checkers and asymptotic-formula verifiers for increasing
// solutions. Four engines cover the coefficient regimes: SV (solution slowly
// varying), RV (quasiderivative carries the growth, solution index rho),
// Gen1/Gen2 (general r routed through the substitution induced by r^{1-beta},
// divergent respectively convergent case).
//
// check_hypotheses_* never throws on a merely inapplicable equation: every
// condition lands in the report as a named check and applicable is their
// conjunction. verify_* does throw -- PreconditionError when the hypotheses
// fail, ClassMismatchError when the trajectory landed in a class other than
// the predicted one.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hldde/change_of_variable.hpp"
#include "hldde/dde.hpp"
#include "hldde/equation.hpp"
#include "hldde/rvkit.hpp"

namespace hldde {

enum class TheoremId { SV, RV, Gen1, Gen2 };
enum class FormulaId { F1, F2, F11, F21, TF11, TF22, TF1C, TF2C };

std::string to_string(TheoremId id);
std::string to_string(FormulaId id);

struct HypothesisCheck {
    std::string name;
    std::string required; // what the condition demands, human readable
    double observed = 0.0;
    bool pass = false;
};

struct HypothesisReport {
    TheoremId theorem = TheoremId::SV;
    std::vector<HypothesisCheck> checks;
    bool applicable = false; // conjunction of the checks
    ClassLabel predicted_class = ClassLabel::Undetermined;
    double predicted_index = 0.0; // of y for SV/RV, of the rectified solution for Gen1/Gen2
    FormulaId formula_id = FormulaId::F1;
};

struct LimitConstants {
    std::optional<double> N; // finite solution limit
    std::optional<double> M; // finite quasiderivative limit
    std::optional<double> A; // additive constant once M is fixed
};

// Outcome of matching a trajectory against the predicted closed-form shape.
// trace holds (t, ratio) samples of the comparison metric; the metric is
// built so the ratio tends to 1. smallness_trace carries the companion
// remainder bound that must tend to 0 (empty when the formula has none).
struct AsymptoticFit {
    FormulaId formula_id = FormulaId::F1;
    std::string comparison_metric;
    std::vector<std::pair<double, double>> trace;
    double final_ratio = 0.0;
    LimitConstants limit_constants;
    std::vector<std::pair<double, double>> smallness_trace;
    // Relative change of the extrapolated N or M between the two trailing
    // fit windows; 0 when the formula fixes no finite limit.
    double limit_stability = 0.0;
    IndexEstimate index_estimate;         // of y (SV/RV) or the rectified solution (Gen1/Gen2)
    std::optional<PiClassReport> pi_report; // de Haan check where the theory grants one
};

struct EngineOptions {
    double trend_threshold = 0.02; // smallness trends must end below this
    double index_tolerance = 0.05; // relative slack on index comparisons
    double sv_threshold = 0.05;    // |index| below this counts as slowly varying
    double probe_hi = 1e6;         // hypothesis trends are sampled up to probe_hi * max(a, 1)
};

HypothesisReport check_hypotheses_sv(const HalfLinearEquation& eq, const EngineOptions& opt = {});
HypothesisReport check_hypotheses_rv(const HalfLinearEquation& eq, const EngineOptions& opt = {});
HypothesisReport check_hypotheses_gen1(const HalfLinearEquation& eq, const EngineOptions& opt = {});
HypothesisReport check_hypotheses_gen2(const HalfLinearEquation& eq, const EngineOptions& opt = {});

AsymptoticFit verify_sv(const HalfLinearEquation& eq, const Trajectory& traj,
                        const EngineOptions& opt = {});
AsymptoticFit verify_rv(const HalfLinearEquation& eq, const Trajectory& traj,
                        const EngineOptions& opt = {});
AsymptoticFit verify_gen1(const HalfLinearEquation& eq, const Trajectory& traj,
                          const EngineOptions& opt = {});
AsymptoticFit verify_gen2(const HalfLinearEquation& eq, const Trajectory& traj,
                          const EngineOptions& opt = {});

// Converse direction: an increasing slowly varying solution forces both
// t^{alpha-1}/r * int_a^t p and t^{alpha+delta-gamma} L_p/L_r to vanish.
// Only meaningful for structured coefficients with gamma > alpha - 1 and a
// delay comparable to t; otherwise the report comes back inapplicable.
struct NecessityReport {
    bool applicable = false;
    bool pass = false;  // both trends vanish
    bool alarm = false; // an increasing SV trajectory coexists with a surviving trend
    std::vector<HypothesisCheck> checks;
    std::vector<std::pair<double, double>> trintp_trace;
    std::vector<std::pair<double, double>> lplr_trace;
    // Scale-normalized residual of the generalized Riccati equation along the
    // trajectory (NaN when no trajectory samples were usable).
    double riccati_residual = 0.0;
};

NecessityReport check_necessity(const HalfLinearEquation& eq, const Trajectory& traj,
                                const EngineOptions& opt = {});

// Residual of the generalized Riccati equation along a trajectory: with
// w = r Phi(y'/y), increasing solutions satisfy
//     w' = p Phi(y(tau))/Phi(y) - (alpha-1) r^{1-beta} w^beta.
// Returns max over the grid of |w' - rhs| / (1 + |rhs|), w' taken by the
// symmetric five point stencil. Usable on its own; check_necessity reports it.
double riccati_residual(const HalfLinearEquation& eq, const Trajectory& traj,
                        const std::vector<double>& grid);

// The quasiderivative u = r Phi(y') of a solution solves the conjugate-degree
// equation (r~ Phi_beta(u'))' = p~ Phi_beta(u(tau)) with r~ = p^{1-beta} and
// p~ = tau' * (r^{1-beta} o tau). Swapping degrees twice returns an equation
// equivalent to the original.
struct ReciprocalTransform {
    HalfLinearEquation equation; // degree beta, same delay and domain start
    HalfLinearEquation base;     // the original equation, kept for the checkers
    std::optional<double> delta_tilde; // delta(1-beta) - beta when p is structured

    // Integrated-form residual over consecutive grid windows with boundaries
    // snapped to trajectory nodes: the flux increment r~ Phi(u')|_{t1}^{t2}
    // (nodal slopes, no interpolation) against the integral of p~ Phi(u(tau)),
    // normalized by 1 + |increment|; max over windows.
    double quasiderivative_residual(const Trajectory& traj,
                                    const std::vector<double>& grid) const;

    // Ratio (t^beta p~/r~) / ((t^alpha p/r)^{beta-1} tau'): bounded above and
    // below when the two smallness quantities are interchangeable.
    std::vector<std::pair<double, double>> smallness_ratio(const std::vector<double>& grid) const;
};

ReciprocalTransform reciprocal_transform(const HalfLinearEquation& eq);

// Rectification s = R(t) by the substitution from build_change_of_variable:
// x(s) = y(t) solves (r^(s) Phi(x'))' = p^(s) Phi(x(tau^(s))) where the
// transformed r^ is identically 1 in the divergent case and s^{2 alpha - 2}
// in the convergent one, and quasiderivatives are preserved pointwise.
struct TransformedEquation {
    ChangeOfVariable cov;
    double alpha = 2.0;
    double s_start = 0.0; // image of the domain start
    std::function<double(double)> p_hat, r_hat;
    std::function<double(double)> tau_hat, tau_hat_prime;

    // max relative deviation of r_hat from its predicted shape on the grid
    double r_hat_deviation(const std::vector<double>& s_grid) const;
    // max over the grid of |r_hat(R(t)) Phi(x'(s)) - y^[1](t)| / (1 + |y^[1](t)|)
    double quasiderivative_equality(const Trajectory& traj,
                                    const std::vector<double>& t_grid) const;
};

TransformedEquation change_of_variables(const HalfLinearEquation& eq, const ChangeOfVariable& cov);

} // namespace hldde
