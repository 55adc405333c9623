// Convergence classification for integrals of positive functions over
// [from, inf). Structured power-log coefficients are decided exactly by the
// lexicographic exponent rule; arbitrary integrands get a numerical heuristic
// over dyadic windows that throws InconclusiveError in the boundary band
// instead of guessing.
#pragma once

#include <functional>

#include "hldde/coefficient.hpp"
#include "hldde/quadrature.hpp"

namespace hldde {

enum class Convergence { Convergent, Divergent };

enum class ClassifyMethod { ExactIndexRule, NumericalHeuristic };

struct ImproperVerdict {
    Convergence convergence = Convergence::Divergent;
    ClassifyMethod method = ClassifyMethod::NumericalHeuristic;
    double value = 0.0; // finite tail value when Convergent, +inf when Divergent
};

// Exact rule for t^theta * prod_k (ln_k t)^{e_k}: scanning the power first and
// then the log exponents, the first one different from -1 decides (< -1
// converges); if every exponent equals -1 the integral diverges.
Convergence exponent_rule(const CoefficientExpr& f);

// Asymptotically equivalent primitive under the same rule: the tail integral
// int_t^inf f when convergent, the head integral int_a^t f when divergent
// (then only up to the additive constant swallowed by the equivalence).
CoefficientExpr asymptotic_primitive(const CoefficientExpr& f);

ImproperVerdict classify_improper(const CoefficientExpr& f, double from);
ImproperVerdict classify_improper(const std::function<double(double)>& f, double from);

} // namespace hldde
