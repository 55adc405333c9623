#include "hldde/change_of_variable.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hldde/errors.hpp"
#include "hldde/grid.hpp"
#include "hldde/improper.hpp"
#include "hldde/quadrature.hpp"

namespace hldde {

CumulativeMap CumulativeMap::head(std::function<double(double)> integrand, double a,
                                  double t_max, int pts_per_decade) {
    CumulativeMap m;
    m.f_ = std::move(integrand);
    m.increasing_ = true;
    if (a > 0.0) {
        m.grid_ = geometric_grid(a, t_max, pts_per_decade);
    } else {
        // geometric spacing needs a positive anchor; prepend the zero node
        m.grid_ = geometric_grid(std::min(1.0, 1e-6 * t_max), t_max, pts_per_decade);
        m.grid_.insert(m.grid_.begin(), 0.0);
    }
    m.cum_.resize(m.grid_.size());
    m.cum_[0] = 0.0;
    for (std::size_t i = 1; i < m.grid_.size(); ++i)
        m.cum_[i] = m.cum_[i - 1] + quad(m.f_, m.grid_[i - 1], m.grid_[i]).value;
    return m;
}

CumulativeMap CumulativeMap::tail(std::function<double(double)> integrand, double a,
                                  double t_max, int pts_per_decade) {
    CumulativeMap m;
    m.f_ = std::move(integrand);
    m.increasing_ = false;
    m.grid_ = geometric_grid(a, t_max, pts_per_decade);
    m.cum_.resize(m.grid_.size());
    const QuadResult tail = tail_integral(m.f_, t_max);
    if (!tail.converged)
        throw PreconditionError("CumulativeMap::tail: tail integral did not converge");
    m.cum_.back() = tail.value;
    for (std::size_t i = m.grid_.size() - 1; i-- > 0;)
        m.cum_[i] = m.cum_[i + 1] + quad(m.f_, m.grid_[i], m.grid_[i + 1]).value;
    return m;
}

double CumulativeMap::value(double t) const {
    if (t < grid_.front() || t > grid_.back())
        throw DomainError("CumulativeMap::value: argument outside the tabulated range");
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t i = (it == grid_.begin()) ? 0 : (it - grid_.begin() - 1);
    const double local = quad(f_, grid_[i], t).value;
    return increasing_ ? cum_[i] + local : cum_[i] - local;
}

double CumulativeMap::derivative(double t) const {
    const double d = f_(t);
    return increasing_ ? d : -d;
}

double CumulativeMap::range_lo() const { return increasing_ ? cum_.front() : cum_.back(); }
double CumulativeMap::range_hi() const { return increasing_ ? cum_.back() : cum_.front(); }

double ChangeOfVariable::forward(double t) const {
    const double v = table->value(t);
    return mode == Mode::HeadDivergent ? v : 1.0 / v;
}

double ChangeOfVariable::forward_derivative(double t) const {
    const double d = table->derivative(t);
    if (mode == Mode::HeadDivergent) return d;
    const double v = table->value(t);
    return -d / (v * v);
}

double ChangeOfVariable::inverse(double s) const {
    return table->inverse(mode == Mode::HeadDivergent ? s : 1.0 / s);
}

double CumulativeMap::inverse(double s) const {
    if (s < range_lo() || s > range_hi())
        throw DomainError("CumulativeMap::inverse: value outside the tabulated range");
    // bracket on the table
    std::size_t lo = 0, hi = grid_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        const bool left = increasing_ ? (s < cum_[mid]) : (s > cum_[mid]);
        (left ? hi : lo) = mid;
    }
    double tl = grid_[lo], th = grid_[hi];
    double t = 0.5 * (tl + th);
    for (int it = 0; it < 60; ++it) {
        const double val = value(t);
        const double d = derivative(t);
        const double err = val - s;
        if (std::abs(err) <= 1e-13 * (std::abs(s) + 1.0)) break;
        (increasing_ == (err > 0.0) ? th : tl) = t;
        double step = d != 0.0 ? t - err / d : 0.0;
        t = (step > tl && step < th) ? step : 0.5 * (tl + th);
    }
    return t;
}

ChangeOfVariable build_change_of_variable(const CoefficientExpr& r, double beta, double a,
                                          double t_max) {
    const CoefficientExpr density = r.pow(1.0 - beta);
    const ImproperVerdict verdict = classify_improper(density, std::max(a, 1.0));
    auto f = [density](double t) { return density.eval(t); };
    ChangeOfVariable cov;
    if (verdict.convergence == Convergence::Divergent) {
        cov.mode = ChangeOfVariable::Mode::HeadDivergent;
        cov.table = std::make_shared<CumulativeMap>(CumulativeMap::head(f, a, t_max));
    } else {
        cov.mode = ChangeOfVariable::Mode::TailConvergent;
        cov.table = std::make_shared<CumulativeMap>(CumulativeMap::tail(f, std::max(a, 1e-12), t_max));
    }
    return cov;
}

} // namespace hldde
