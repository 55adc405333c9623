// Strictly monotone cumulative integrals R(t) of a positive integrand and
// their inverses: either the head integral from the domain start (increasing,
// R(a) = 0) or the tail integral to infinity (decreasing). Values combine a
// cached cumulative table on a geometric grid with local quadrature; the
// inverse brackets on the table and polishes with Newton, the derivative
// being the integrand itself.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hldde/coefficient.hpp"

namespace hldde {

class CumulativeMap {
public:
    static CumulativeMap head(std::function<double(double)> integrand, double a, double t_max,
                              int pts_per_decade = 60);
    static CumulativeMap tail(std::function<double(double)> integrand, double a, double t_max,
                              int pts_per_decade = 60);

    double value(double t) const;
    double derivative(double t) const; // signed: negative for tail maps
    double inverse(double s) const;

    bool increasing() const { return increasing_; }
    double domain_lo() const { return grid_.front(); }
    double domain_hi() const { return grid_.back(); }
    double range_lo() const;
    double range_hi() const;

private:
    CumulativeMap() = default;
    std::function<double(double)> f_;
    std::vector<double> grid_;
    std::vector<double> cum_;
    bool increasing_ = true;
};

// The monotone substitution induced by r^{1-beta}: when its integral from a
// diverges this is the head integral R_D (with inverse); when it converges,
// the reciprocal tail Q = 1/R_C (increasing, with inverse). Which case holds
// is decided exactly for structured r, by the dyadic heuristic otherwise.
struct ChangeOfVariable {
    enum class Mode { HeadDivergent, TailConvergent };
    Mode mode;
    std::shared_ptr<CumulativeMap> table; // R_D or R_C
    double forward(double t) const;       // R_D(t) or Q(t)
    double forward_derivative(double t) const;
    double inverse(double s) const;
};

ChangeOfVariable build_change_of_variable(const CoefficientExpr& r, double beta, double a,
                                          double t_max);

} // namespace hldde
