// Positive coefficient functions of the form
//     scale * t^power * prod_k (ln_k t)^{e_k} * [exp(gamma t) t^omega] * [custom(t)]
// where ln_k is the k-times iterated logarithm. The structured part (no exp
// factor, no custom factor) is closed under multiplication and real powers and
// carries its regular-variation index (= power) exactly; evaluation and exact
// logarithmic derivatives work for every part.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hldde {

double iterated_log(double t, int depth); // ln_depth(t), throws DomainError off-domain

class CoefficientExpr {
public:
    struct ExpFactor {
        double gamma = 0.0; // rate in exp(gamma * t)
        double omega = 0.0; // companion power t^omega
    };
    struct CustomFactor {
        std::function<double(double)> value;
        std::function<double(double)> derivative;
    };

    CoefficientExpr() = default; // constant 1

    static CoefficientExpr constant(double c);
    static CoefficientExpr power(double scale, double p);
    static CoefficientExpr power_log(double scale, double p, std::vector<double> log_powers);
    static CoefficientExpr exponential(double scale, double gamma, double omega);
    static CoefficientExpr custom_fn(std::function<double(double)> value,
                                     std::function<double(double)> derivative);

    double eval(double t) const;
    double deriv(double t) const;
    double log_deriv(double t) const; // d/dt ln f, exact

    // Structured means: no exp factor, no custom factor. Only then is the
    // regular-variation index known a priori (it equals the power).
    bool is_structured() const { return !exp_.has_value() && !custom_.has_value(); }
    std::optional<double> rv_index() const;

    // eval(t) / t^power; requires a structured expression.
    double slowly_varying_part(double t) const;

    // Limit as t -> +inf for structured expressions: decided by the power,
    // then the first nonzero log exponent, then the scale.
    double limit_at_infinity() const;

    CoefficientExpr pow(double c) const;
    CoefficientExpr times_power(double scale, double dpower) const;
    friend CoefficientExpr operator*(const CoefficientExpr& a, const CoefficientExpr& b);

    // f(e^s) as a structured expression; requires structured with power == 0.
    // Log levels shift down one: scale * prod (ln_k t)^{e_k} becomes
    // scale * s^{e_1} * prod (ln_k s)^{e_{k+1}}.
    CoefficientExpr compose_exp() const;

    // Smallest admissible domain start: every iterated log present must be
    // >= 1 there (so its argument is >= e and all shallower levels positive).
    double min_domain_start() const;

    double scale() const { return scale_; }
    double power_exponent() const { return power_; }
    const std::vector<double>& log_powers() const { return log_powers_; }
    const std::optional<ExpFactor>& exp_factor() const { return exp_; }
    bool has_custom() const { return custom_.has_value(); }

    int log_depth() const; // deepest level with a nonzero exponent, 0 if none

    std::string describe() const;

private:
    double scale_ = 1.0;
    double power_ = 0.0;
    std::vector<double> log_powers_;
    std::optional<ExpFactor> exp_;
    std::optional<CustomFactor> custom_;
};

} // namespace hldde
