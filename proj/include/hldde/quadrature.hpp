// Adaptive Gauss-Kronrod (7,15) quadrature on finite intervals plus tail
// integrators for positive integrands on [t, inf) that decay at least like a
// power.
//
// quad() bisects panels until the Kronrod error estimate meets the tolerance
// or the depth/budget cap; exhaustion is reported through converged, never
// silently.
//
// tail_integral(function, ...) substitutes s = t e^v, sums doubling panels in
// v, closes exponentially decaying remainders geometrically and power-law
// remainders by iterated Aitken extrapolation of the partial sums. Inputs it
// can probe only up to the representable range of double; the extrapolation
// is what accounts for the mass beyond it.
//
// tail_integral(CoefficientExpr, ...) strips borderline 1/t factors by the
// exact substitution u = ln s, one log level at a time, until the integrand
// decays exponentially in the transformed variable; this route has no
// blind spot at the representable range.
#pragma once

#include <functional>

#include "hldde/coefficient.hpp"

namespace hldde {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // accumulated estimate, not a bound
    bool converged = true;
};

QuadResult quad(const std::function<double(double)>& f, double lo, double hi,
                double rel_tol = 1e-10, double abs_tol = 1e-13, int max_depth = 40);

QuadResult tail_integral(const std::function<double(double)>& f, double t,
                         double rel_tol = 1e-9);

QuadResult tail_integral(const CoefficientExpr& f, double t, double rel_tol = 1e-10);

} // namespace hldde
