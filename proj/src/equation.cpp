#include "hldde/equation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hldde/errors.hpp"

namespace hldde {

HalfLinearEquation::HalfLinearEquation(double alpha, CoefficientExpr r, CoefficientExpr p,
                                       DelayMap delay, double a)
    : exps_(alpha), r_(std::move(r)), p_(std::move(p)), delay_(std::move(delay)), a_(a) {
    const double lo = std::max({r_.min_domain_start(), p_.min_domain_start(),
                                delay_.min_domain_start(), 0.0});
    if (!(a_ > 0.0) || a_ < lo)
        throw InvalidParameter("HalfLinearEquation: domain start below the admissible range");
    // tau(a) = 0 is fine: the history interval [tau(a), a] may touch zero
    if (!(delay_.tau(a_) >= 0.0))
        throw InvalidParameter("HalfLinearEquation: tau(a) must be nonnegative");
    // sample the standing structural assumptions across a few decades
    for (double t = a_; t <= 1e6 * a_; t *= 10.0) {
        if (delay_.tau(t) > t + 1e-12 * std::abs(t))
            throw InvalidParameter("HalfLinearEquation: tau(t) must not exceed t");
        if (!(delay_.tau_prime(t) > 0.0))
            throw InvalidParameter("HalfLinearEquation: tau must be increasing");
        (void)r_.eval(t); // positivity and domain checks live in eval
        (void)p_.eval(t);
    }
}

double HalfLinearEquation::g_eval(double t) const {
    return phi_inv(t * p_.eval(t) / r_.eval(t), exps_.alpha);
}

double HalfLinearEquation::h_tau_eval(double t) const {
    const double tp = delay_.tau_prime(t);
    return std::pow(t * tp, exps_.alpha - 1.0) * p_.eval(t) / r_.eval(delay_.tau(t));
}

double HalfLinearEquation::delta() const {
    const auto idx = p_.rv_index();
    if (!idx) throw PreconditionError("HalfLinearEquation::delta: p is not structured");
    return *idx;
}

double HalfLinearEquation::gamma() const {
    const auto idx = r_.rv_index();
    if (!idx) throw PreconditionError("HalfLinearEquation::gamma: r is not structured");
    return *idx;
}

double HalfLinearEquation::rho() const {
    return (-1.0 - delta()) / (exps_.alpha - 1.0);
}

CoefficientExpr HalfLinearEquation::g_expr() const {
    if (!coefficients_structured())
        throw PreconditionError("HalfLinearEquation::g_expr: coefficients are not structured");
    return (p_ * r_.pow(-1.0)).times_power(1.0, 1.0).pow(exps_.beta - 1.0);
}

CoefficientExpr HalfLinearEquation::h_tau_equiv_expr() const {
    if (!coefficients_structured())
        throw PreconditionError("HalfLinearEquation::h_tau_equiv_expr: coefficients are not structured");
    double lambda = 1.0; // shift delays leave r(tau(t)) ~ r(t)
    switch (delay_.kind()) {
        case DelayMap::Kind::Shift: break;
        case DelayMap::Kind::Proportional: lambda = delay_.ratio(); break;
        case DelayMap::Kind::Custom:
            throw PreconditionError("HalfLinearEquation::h_tau_equiv_expr: custom delay has no structured equivalent");
    }
    const double factor = std::pow(lambda, exps_.alpha - 1.0 - gamma());
    return (p_ * r_.pow(-1.0)).times_power(factor, exps_.alpha - 1.0);
}

} // namespace hldde
