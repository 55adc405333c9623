// Deviating argument tau: shift t - sigma, proportional lambda*t, or a custom
// increasing map given with its derivative. Shift(0) and Proportional(1) are
// the identity; the solver then runs in plain ODE mode.
#pragma once

#include <functional>

namespace hldde {

class DelayMap {
public:
    enum class Kind { Shift, Proportional, Custom };

    static DelayMap shift(double sigma);         // tau(t) = t - sigma, sigma >= 0
    static DelayMap proportional(double lambda); // tau(t) = lambda*t, 0 < lambda <= 1
    static DelayMap custom(std::function<double(double)> tau,
                           std::function<double(double)> tau_prime);

    double tau(double t) const;
    double tau_prime(double t) const;

    Kind kind() const { return kind_; }
    bool is_identity() const;

    double shift_amount() const; // Shift only
    double ratio() const;        // Proportional only

    // Largest h with tau(t + h) <= t, the window over which an explicit
    // method-of-steps sweep only reads already computed history. +inf for
    // the identity map.
    double max_explicit_step(double t) const;

    // Smallest a with tau(t) > 0 for all t >= a (up to the caller checking
    // tau(a) itself for custom maps).
    double min_domain_start() const;

private:
    DelayMap() = default;
    Kind kind_ = Kind::Shift;
    double param_ = 0.0;
    std::function<double(double)> tau_fn_;
    std::function<double(double)> tau_prime_fn_;
};

} // namespace hldde
