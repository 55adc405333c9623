// Odd power nonlinearity phi(u) = |u|^{alpha-1} sgn u and its inverse.
// alpha > 1 throughout; the conjugate exponent beta satisfies 1/alpha + 1/beta = 1,
// so phi_inv for degree alpha is phi for degree beta.
#pragma once

#include <cmath>

#include "hldde/errors.hpp"

namespace hldde {

inline double conjugate_exponent(double alpha) {
    if (!(alpha > 1.0)) throw InvalidParameter("conjugate_exponent: alpha must be > 1");
    return alpha / (alpha - 1.0);
}

inline double phi(double u, double alpha) {
    if (!(alpha > 1.0)) throw InvalidParameter("phi: alpha must be > 1");
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(u), alpha - 1.0), u);
}

inline double phi_inv(double v, double alpha) {
    if (!(alpha > 1.0)) throw InvalidParameter("phi_inv: alpha must be > 1");
    if (v == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(v), 1.0 / (alpha - 1.0)), v);
}

// Exponent pair for one equation. beta is derived, never stored independently.
struct Exponents {
    double alpha;
    double beta;

    explicit Exponents(double a) : alpha(a), beta(conjugate_exponent(a)) {}
};

} // namespace hldde
