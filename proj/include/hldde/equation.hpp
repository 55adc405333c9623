// The half-linear delay equation
//     (r(t) Phi(y'))' = p(t) Phi(y(tau(t))),   Phi(u) = |u|^{alpha-1} sgn u,
// on [a, inf) with positive coefficients r, p and increasing tau <= id.
#pragma once

#include "hldde/coefficient.hpp"
#include "hldde/delay.hpp"
#include "hldde/phi.hpp"

namespace hldde {

class HalfLinearEquation {
public:
    HalfLinearEquation(double alpha, CoefficientExpr r, CoefficientExpr p,
                       DelayMap delay, double a);

    double alpha() const { return exps_.alpha; }
    double beta() const { return exps_.beta; }
    double domain_start() const { return a_; }
    const CoefficientExpr& r() const { return r_; }
    const CoefficientExpr& p() const { return p_; }
    const DelayMap& delay() const { return delay_; }
    bool ode_mode() const { return delay_.is_identity(); }

    double r_eval(double t) const { return r_.eval(t); }
    double p_eval(double t) const { return p_.eval(t); }

    // Phi^{-1}(t p(t) / r(t)); its tail integral separates bounded from
    // unbounded increasing solutions in the slowly varying regime.
    double g_eval(double t) const;

    // (t tau'(t))^{alpha-1} p(t) / r(tau(t)); the analogous integrand once
    // the quasiderivative rather than the solution carries the growth.
    double h_tau_eval(double t) const;

    bool coefficients_structured() const { return r_.is_structured() && p_.is_structured(); }

    // Regular-variation indices of p and r; structured coefficients only.
    double delta() const;
    double gamma() const;
    // (-1 - delta) / (alpha - 1), the index the solution inherits in the
    // strongly sublinear regime.
    double rho() const;

    // Structured equivalents (exact for g, asymptotic for h_tau, where the
    // delayed r is replaced through its regular variation).
    CoefficientExpr g_expr() const;
    CoefficientExpr h_tau_equiv_expr() const;

private:
    Exponents exps_;
    CoefficientExpr r_, p_;
    DelayMap delay_;
    double a_;
};

} // namespace hldde
