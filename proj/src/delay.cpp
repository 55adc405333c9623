#include "hldde/delay.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "hldde/errors.hpp"

namespace hldde {

DelayMap DelayMap::shift(double sigma) {
    if (!(sigma >= 0.0)) throw InvalidParameter("DelayMap::shift: sigma must be >= 0");
    DelayMap d;
    d.kind_ = Kind::Shift;
    d.param_ = sigma;
    return d;
}

DelayMap DelayMap::proportional(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw InvalidParameter("DelayMap::proportional: lambda must lie in (0, 1]");
    DelayMap d;
    d.kind_ = Kind::Proportional;
    d.param_ = lambda;
    return d;
}

DelayMap DelayMap::custom(std::function<double(double)> tau,
                          std::function<double(double)> tau_prime) {
    if (!tau || !tau_prime) throw InvalidParameter("DelayMap::custom: tau and tau_prime required");
    DelayMap d;
    d.kind_ = Kind::Custom;
    d.tau_fn_ = std::move(tau);
    d.tau_prime_fn_ = std::move(tau_prime);
    return d;
}

double DelayMap::tau(double t) const {
    switch (kind_) {
        case Kind::Shift: return t - param_;
        case Kind::Proportional: return param_ * t;
        case Kind::Custom: return tau_fn_(t);
    }
    return t;
}

double DelayMap::tau_prime(double t) const {
    switch (kind_) {
        case Kind::Shift: return 1.0;
        case Kind::Proportional: return param_;
        case Kind::Custom: return tau_prime_fn_(t);
    }
    return 1.0;
}

bool DelayMap::is_identity() const {
    return (kind_ == Kind::Shift && param_ == 0.0) ||
           (kind_ == Kind::Proportional && param_ == 1.0);
}

double DelayMap::shift_amount() const {
    if (kind_ != Kind::Shift) throw PreconditionError("DelayMap::shift_amount: not a shift map");
    return param_;
}

double DelayMap::ratio() const {
    if (kind_ != Kind::Proportional) throw PreconditionError("DelayMap::ratio: not a proportional map");
    return param_;
}

double DelayMap::max_explicit_step(double t) const {
    if (is_identity()) return std::numeric_limits<double>::infinity();
    switch (kind_) {
        case Kind::Shift: return param_;
        case Kind::Proportional: return t * (1.0 - param_) / param_;
        case Kind::Custom: break;
    }
    // tau increasing: bisect tau(t + h) = t after doubling out a bracket
    double hi = 1.0;
    for (int k = 0; k < 200 && tau_fn_(t + hi) <= t; ++k) hi *= 2.0;
    if (tau_fn_(t + hi) <= t) return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (tau_fn_(t + mid) <= t ? lo : hi) = mid;
    }
    return lo;
}

double DelayMap::min_domain_start() const {
    switch (kind_) {
        case Kind::Shift: return param_;
        case Kind::Proportional: return 0.0;
        case Kind::Custom: return 0.0;
    }
    return 0.0;
}

} // namespace hldde
