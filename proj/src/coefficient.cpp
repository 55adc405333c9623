#include "hldde/coefficient.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "hldde/errors.hpp"

namespace hldde {

double iterated_log(double t, int depth) {
    double v = t;
    for (int k = 0; k < depth; ++k) {
        if (!(v > 0.0)) throw DomainError("iterated_log: argument left the positive domain");
        v = std::log(v);
    }
    return v;
}

CoefficientExpr CoefficientExpr::constant(double c) { return power(c, 0.0); }

CoefficientExpr CoefficientExpr::power(double scale, double p) {
    if (!(scale > 0.0)) throw InvalidParameter("CoefficientExpr: scale must be positive");
    CoefficientExpr e;
    e.scale_ = scale;
    e.power_ = p;
    return e;
}

CoefficientExpr CoefficientExpr::power_log(double scale, double p, std::vector<double> log_powers) {
    CoefficientExpr e = power(scale, p);
    e.log_powers_ = std::move(log_powers);
    return e;
}

CoefficientExpr CoefficientExpr::exponential(double scale, double gamma, double omega) {
    CoefficientExpr e = power(scale, 0.0);
    e.exp_ = ExpFactor{gamma, omega};
    return e;
}

CoefficientExpr CoefficientExpr::custom_fn(std::function<double(double)> value,
                                           std::function<double(double)> derivative) {
    if (!value || !derivative) throw InvalidParameter("CoefficientExpr: custom factor needs value and derivative");
    CoefficientExpr e;
    e.custom_ = CustomFactor{std::move(value), std::move(derivative)};
    return e;
}

int CoefficientExpr::log_depth() const {
    int depth = 0;
    for (int k = 0; k < static_cast<int>(log_powers_.size()); ++k)
        if (log_powers_[k] != 0.0) depth = k + 1;
    return depth;
}

double CoefficientExpr::eval(double t) const {
    if (!(t > 0.0)) throw DomainError("CoefficientExpr::eval: t must be positive");
    double v = scale_ * std::pow(t, power_);
    double lk = t;
    for (std::size_t k = 0; k < log_powers_.size(); ++k) {
        lk = std::log(lk);
        if (log_powers_[k] == 0.0) {
            if (!(lk > 0.0) && k + 1 < static_cast<std::size_t>(log_depth()))
                throw DomainError("CoefficientExpr::eval: iterated log not positive");
            continue;
        }
        if (!(lk > 0.0)) throw DomainError("CoefficientExpr::eval: iterated log not positive");
        v *= std::pow(lk, log_powers_[k]);
    }
    if (exp_) v *= std::exp(exp_->gamma * t) * std::pow(t, exp_->omega);
    if (custom_) {
        const double c = custom_->value(t);
        // exact zero is allowed: exponentially decaying factors underflow
        if (!(c >= 0.0) || !std::isfinite(c))
            throw DomainError("CoefficientExpr::eval: custom factor not positive finite");
        v *= c;
    }
    if (!std::isfinite(v)) throw DomainError("CoefficientExpr::eval: overflow");
    return v;
}

double CoefficientExpr::log_deriv(double t) const {
    if (!(t > 0.0)) throw DomainError("CoefficientExpr::log_deriv: t must be positive");
    double s = power_ / t;
    // d/dt ln_k(t) = 1 / (t * ln t * ... * ln_{k-1} t)
    double chain = t; // running product t * ln_1 t * ... * ln_{k-1} t
    double lk = t;
    for (std::size_t k = 0; k < log_powers_.size(); ++k) {
        lk = std::log(lk);
        if (!(lk > 0.0)) {
            if (k + 1 <= static_cast<std::size_t>(log_depth()))
                throw DomainError("CoefficientExpr::log_deriv: iterated log not positive");
            break;
        }
        if (log_powers_[k] != 0.0) s += log_powers_[k] / (chain * lk);
        chain *= lk;
    }
    if (exp_) s += exp_->gamma + exp_->omega / t;
    if (custom_) {
        const double c = custom_->value(t);
        if (!(c > 0.0)) throw DomainError("CoefficientExpr::log_deriv: custom factor not positive");
        s += custom_->derivative(t) / c;
    }
    return s;
}

double CoefficientExpr::deriv(double t) const { return eval(t) * log_deriv(t); }

std::optional<double> CoefficientExpr::rv_index() const {
    if (!is_structured()) return std::nullopt;
    return power_;
}

double CoefficientExpr::slowly_varying_part(double t) const {
    if (!is_structured())
        throw PreconditionError("CoefficientExpr::slowly_varying_part: expression is not structured");
    return eval(t) / std::pow(t, power_);
}

double CoefficientExpr::limit_at_infinity() const {
    if (!is_structured())
        throw PreconditionError("CoefficientExpr::limit_at_infinity: expression is not structured");
    if (power_ > 0.0) return INFINITY;
    if (power_ < 0.0) return 0.0;
    for (double e : log_powers_) {
        if (e > 0.0) return INFINITY;
        if (e < 0.0) return 0.0;
    }
    return scale_;
}

CoefficientExpr CoefficientExpr::pow(double c) const {
    CoefficientExpr e;
    e.scale_ = std::pow(scale_, c);
    e.power_ = power_ * c;
    e.log_powers_ = log_powers_;
    for (double& lp : e.log_powers_) lp *= c;
    if (exp_) e.exp_ = ExpFactor{exp_->gamma * c, exp_->omega * c};
    if (custom_) {
        auto v = custom_->value;
        auto d = custom_->derivative;
        e.custom_ = CustomFactor{
            [v, c](double t) { return std::pow(v(t), c); },
            [v, d, c](double t) { return c * std::pow(v(t), c - 1.0) * d(t); }};
    }
    return e;
}

CoefficientExpr CoefficientExpr::times_power(double scale, double dpower) const {
    return *this * CoefficientExpr::power(scale, dpower);
}

CoefficientExpr operator*(const CoefficientExpr& a, const CoefficientExpr& b) {
    CoefficientExpr e;
    e.scale_ = a.scale_ * b.scale_;
    e.power_ = a.power_ + b.power_;
    e.log_powers_ = a.log_powers_;
    if (b.log_powers_.size() > e.log_powers_.size()) e.log_powers_.resize(b.log_powers_.size(), 0.0);
    for (std::size_t k = 0; k < b.log_powers_.size(); ++k) e.log_powers_[k] += b.log_powers_[k];
    if (a.exp_ || b.exp_) {
        CoefficientExpr::ExpFactor f;
        if (a.exp_) { f.gamma += a.exp_->gamma; f.omega += a.exp_->omega; }
        if (b.exp_) { f.gamma += b.exp_->gamma; f.omega += b.exp_->omega; }
        e.exp_ = f;
    }
    if (a.custom_ && b.custom_) {
        auto av = a.custom_->value, ad = a.custom_->derivative;
        auto bv = b.custom_->value, bd = b.custom_->derivative;
        e.custom_ = CoefficientExpr::CustomFactor{
            [av, bv](double t) { return av(t) * bv(t); },
            [av, ad, bv, bd](double t) { return ad(t) * bv(t) + av(t) * bd(t); }};
    } else if (a.custom_) {
        e.custom_ = a.custom_;
    } else if (b.custom_) {
        e.custom_ = b.custom_;
    }
    return e;
}

CoefficientExpr CoefficientExpr::compose_exp() const {
    if (!is_structured() || power_ != 0.0)
        throw PreconditionError("CoefficientExpr::compose_exp: needs a structured expression with power 0");
    CoefficientExpr e;
    e.scale_ = scale_;
    e.power_ = log_powers_.empty() ? 0.0 : log_powers_[0];
    if (log_powers_.size() > 1)
        e.log_powers_.assign(log_powers_.begin() + 1, log_powers_.end());
    return e;
}

double CoefficientExpr::min_domain_start() const {
    const int depth = log_depth();
    double lo = 0.0;
    double tower = 1.0; // requirement: ln_depth(a) >= 1, i.e. a >= e^^depth
    for (int k = 0; k < depth; ++k) tower = std::exp(tower);
    if (depth > 0) lo = tower;
    return lo;
}

std::string CoefficientExpr::describe() const {
    char buf[64];
    auto num = [&buf](double x) {
        std::snprintf(buf, sizeof buf, "%.6g", x);
        return std::string(buf);
    };
    std::string s = num(scale_);
    if (power_ != 0.0) s += " * t^" + num(power_);
    for (std::size_t k = 0; k < log_powers_.size(); ++k) {
        if (log_powers_[k] == 0.0) continue;
        std::string ln = "ln";
        for (std::size_t j = 1; j <= k; ++j) ln = "ln " + ln;
        s += " * (" + ln + " t)^" + num(log_powers_[k]);
    }
    if (exp_) {
        s += " * exp(" + num(exp_->gamma) + " t)";
        if (exp_->omega != 0.0) s += " * t^" + num(exp_->omega);
    }
    if (custom_) s += " * <custom>";
    return s;
}

} // namespace hldde
