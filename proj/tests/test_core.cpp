#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "hldde/coefficient.hpp"
#include "hldde/delay.hpp"
#include "hldde/equation.hpp"
#include "hldde/errors.hpp"
#include "hldde/extrapolate.hpp"
#include "hldde/grid.hpp"
#include "hldde/phi.hpp"

using namespace hldde;

TEST_CASE("iterated log") {
    CHECK(iterated_log(7.5, 0) == 7.5);
    CHECK(iterated_log(100.0, 1) == doctest::Approx(std::log(100.0)));
    CHECK(iterated_log(std::exp(std::exp(1.0)), 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(iterated_log(1.0, 2), DomainError);   // ln ln 1 = ln 0
    CHECK_THROWS_AS(iterated_log(-2.0, 1), DomainError);
}

TEST_CASE("power-log evaluation and exact derivatives") {
    auto f = CoefficientExpr::power_log(3.0, 2.0, {1.5});
    const double t = 10.0;
    const double lt = std::log(t);
    CHECK(f.eval(t) == doctest::Approx(3.0 * t * t * std::pow(lt, 1.5)).epsilon(1e-14));
    // f' = 3 t ln^{1/2} t (2 ln t + 3/2)
    CHECK(f.deriv(t) ==
          doctest::Approx(3.0 * t * std::sqrt(lt) * (2.0 * lt + 1.5)).epsilon(1e-13));
    CHECK(f.log_deriv(t) == doctest::Approx(2.0 / t + 1.5 / (t * lt)).epsilon(1e-13));
    CHECK(f.rv_index().value() == 2.0);
    CHECK(f.slowly_varying_part(t) == doctest::Approx(3.0 * std::pow(lt, 1.5)));
    CHECK(f.is_structured());
}

TEST_CASE("exponential and custom factors") {
    auto g = CoefficientExpr::exponential(2.0, -1.0, 3.0); // 2 e^{-t} t^3
    CHECK(g.eval(4.0) == doctest::Approx(2.0 * std::exp(-4.0) * 64.0).epsilon(1e-14));
    CHECK(g.log_deriv(4.0) == doctest::Approx(-1.0 + 3.0 / 4.0).epsilon(1e-14));
    CHECK_FALSE(g.is_structured());
    CHECK_FALSE(g.rv_index().has_value());

    auto c = CoefficientExpr::custom_fn([](double t) { return t * t + 1.0; },
                                        [](double t) { return 2.0 * t; });
    CHECK(c.eval(3.0) == doctest::Approx(10.0));
    CHECK(c.deriv(3.0) == doctest::Approx(6.0));
    CHECK_FALSE(c.is_structured());

    // growing exponential leaves double range: error, not inf
    auto big = CoefficientExpr::exponential(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(big.eval(800.0), DomainError);
}

TEST_CASE("structured algebra") {
    auto a = CoefficientExpr::power(2.0, 1.5);
    auto b = CoefficientExpr::power_log(1.0, -0.5, {2.0});
    auto prod = a * b;
    CHECK(prod.rv_index().value() == doctest::Approx(1.0));
    CHECK(prod.eval(20.0) == doctest::Approx(a.eval(20.0) * b.eval(20.0)).epsilon(1e-14));

    auto pw = b.pow(-2.0); // t^{1} ln^{-4} t
    CHECK(pw.rv_index().value() == doctest::Approx(1.0));
    CHECK(pw.eval(50.0) == doctest::Approx(std::pow(b.eval(50.0), -2.0)).epsilon(1e-13));

    auto tp = a.times_power(0.5, -3.5); // 1 * t^{-2}
    CHECK(tp.eval(8.0) == doctest::Approx(1.0 / 64.0).epsilon(1e-14));

    CHECK_THROWS_AS(CoefficientExpr::constant(-1.0), InvalidParameter);
    CHECK_THROWS_AS(CoefficientExpr::power(0.0, 1.0), InvalidParameter);
}

TEST_CASE("limits at infinity and domain starts") {
    CHECK(CoefficientExpr::constant(5.0).limit_at_infinity() == 5.0);
    CHECK(CoefficientExpr::power(1.0, -1.0).limit_at_infinity() == 0.0);
    CHECK(std::isinf(CoefficientExpr::power_log(1.0, 0.0, {0.5}).limit_at_infinity()));
    CHECK(CoefficientExpr::power_log(3.0, 0.0, {-2.0}).limit_at_infinity() == 0.0);
    // power decides before any log factor
    CHECK(CoefficientExpr::power_log(1.0, -0.1, {4.0}).limit_at_infinity() == 0.0);

    CHECK(CoefficientExpr::power(1.0, 2.0).min_domain_start() == 0.0);
    CHECK(CoefficientExpr::power_log(1.0, 0.0, {1.0}).min_domain_start() ==
          doctest::Approx(std::exp(1.0)));
    CHECK(CoefficientExpr::power_log(1.0, 0.0, {0.0, 1.0}).min_domain_start() ==
          doctest::Approx(std::exp(std::exp(1.0))));
}

TEST_CASE("compose with exponential shifts log levels down") {
    auto f = CoefficientExpr::power_log(2.0, 0.0, {1.5, -2.0});
    auto g = f.compose_exp();
    CHECK(g.power_exponent() == doctest::Approx(1.5));
    for (double s : {3.0, 7.0, 20.0})
        CHECK(g.eval(s) == doctest::Approx(f.eval(std::exp(s))).epsilon(1e-13));
    CHECK_THROWS_AS(CoefficientExpr::power(1.0, 1.0).compose_exp(), PreconditionError);
}

TEST_CASE("delay maps") {
    auto sh = DelayMap::shift(2.0);
    CHECK(sh.tau(5.0) == 3.0);
    CHECK(sh.tau_prime(5.0) == 1.0);
    CHECK(sh.shift_amount() == 2.0);
    CHECK(sh.max_explicit_step(5.0) == 2.0);
    CHECK(sh.min_domain_start() == 2.0);
    CHECK_FALSE(sh.is_identity());
    CHECK(DelayMap::shift(0.0).is_identity());

    auto pr = DelayMap::proportional(0.4);
    CHECK(pr.tau(10.0) == doctest::Approx(4.0));
    CHECK(pr.tau_prime(10.0) == 0.4);
    CHECK(pr.ratio() == 0.4);
    // largest sweep that only reads computed history: tau(t + h) == t
    CHECK(pr.tau(10.0 + pr.max_explicit_step(10.0)) == doctest::Approx(10.0));
    CHECK(DelayMap::proportional(1.0).is_identity());
    CHECK(std::isinf(DelayMap::proportional(1.0).max_explicit_step(3.0)));

    auto cu = DelayMap::custom([](double t) { return 0.5 * t - 1.0; },
                               [](double) { return 0.5; });
    CHECK(cu.tau(8.0) == doctest::Approx(3.0));
    double h = cu.max_explicit_step(8.0);
    CHECK(cu.tau(8.0 + h) == doctest::Approx(8.0).epsilon(1e-10));
    CHECK_THROWS_AS(cu.shift_amount(), PreconditionError);

    CHECK_THROWS_AS(DelayMap::shift(-1.0), InvalidParameter);
    CHECK_THROWS_AS(DelayMap::proportional(0.0), InvalidParameter);
    CHECK_THROWS_AS(DelayMap::proportional(1.5), InvalidParameter);
}

TEST_CASE("phi pair and conjugate exponents") {
    CHECK(phi(3.5, 2.0) == 3.5); // linear case
    CHECK(phi(-3.5, 2.0) == -3.5);
    for (double u : {-4.0, -0.3, 0.0, 0.7, 9.0}) {
        CHECK(phi_inv(phi(u, 1.7), 1.7) == doctest::Approx(u).epsilon(1e-13));
        CHECK(phi(-u, 1.7) == doctest::Approx(-phi(u, 1.7)));
    }
    Exponents e(3.0);
    CHECK(e.beta == doctest::Approx(1.5));
    CHECK((e.alpha - 1.0) * (e.beta - 1.0) == doctest::Approx(1.0));
    // phi_inv at degree alpha is phi at degree beta
    CHECK(phi_inv(2.7, 3.0) == doctest::Approx(phi(2.7, 1.5)));
    CHECK_THROWS_AS(conjugate_exponent(1.0), InvalidParameter);
    CHECK_THROWS_AS(phi(1.0, 0.5), InvalidParameter);
}

TEST_CASE("half-linear equation derived quantities") {
    HalfLinearEquation eq(3.0, CoefficientExpr::power(2.0, 1.0),
                          CoefficientExpr::power_log(1.0, -2.0, {1.0}),
                          DelayMap::proportional(0.5), 4.0);
    CHECK(eq.alpha() == 3.0);
    CHECK(eq.beta() == doctest::Approx(1.5));
    CHECK(eq.delta() == doctest::Approx(-2.0));
    CHECK(eq.gamma() == doctest::Approx(1.0));
    CHECK(eq.rho() == doctest::Approx(0.5)); // (-1 - delta)/(alpha - 1)
    CHECK_FALSE(eq.ode_mode());

    const double t = 25.0;
    CHECK(eq.g_eval(t) ==
          doctest::Approx(std::sqrt(std::log(t) / (2.0 * t * t))).epsilon(1e-13));
    // (t tau')^{alpha-1} p / r(tau): pure-power r makes the RV step exact
    CHECK(eq.h_tau_eval(t) == doctest::Approx(0.25 * std::log(t) / t).epsilon(1e-13));
    CHECK(eq.g_expr().rv_index().value() == doctest::Approx(-1.0));
    CHECK(eq.g_expr().eval(t) == doctest::Approx(eq.g_eval(t)).epsilon(1e-12));
    CHECK(eq.h_tau_equiv_expr().rv_index().value() == doctest::Approx(-1.0));
    CHECK(eq.h_tau_equiv_expr().eval(t) == doctest::Approx(eq.h_tau_eval(t)).epsilon(1e-12));

    // shift delay: the equivalent form is only asymptotic
    HalfLinearEquation eqs(2.0, CoefficientExpr::power(1.0, 2.0), CoefficientExpr::constant(1.0),
                           DelayMap::shift(1.0), 3.0);
    CHECK(eqs.h_tau_equiv_expr().eval(1e8) == doctest::Approx(eqs.h_tau_eval(1e8)).epsilon(1e-6));

    CHECK_THROWS_AS(HalfLinearEquation(1.0, CoefficientExpr::constant(1.0),
                                       CoefficientExpr::constant(1.0), DelayMap::shift(0.0), 1.0),
                    InvalidParameter);
    // tau(a) < 0 leaves no room for a positive history interval
    CHECK_THROWS_AS(HalfLinearEquation(2.0, CoefficientExpr::constant(1.0),
                                       CoefficientExpr::constant(1.0), DelayMap::shift(2.0), 1.0),
                    InvalidParameter);
    CHECK_THROWS_AS(HalfLinearEquation(2.0, CoefficientExpr::constant(1.0),
                                       CoefficientExpr::constant(1.0),
                                       DelayMap::custom([](double t) { return 2.0 * t; },
                                                        [](double) { return 2.0; }),
                                       1.0),
                    InvalidParameter);
}

TEST_CASE("geometric grid") {
    auto g = geometric_grid(2.0, 2000.0, 10);
    CHECK(g.front() == 2.0);
    CHECK(g.back() == 2000.0);
    CHECK(g.size() == 31); // three decades at 10/decade, endpoints included
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(geometric_grid(0.0, 10.0), InvalidParameter);
    CHECK_THROWS_AS(geometric_grid(10.0, 5.0), InvalidParameter);
    CHECK_THROWS_AS(geometric_grid(1.0, 10.0, 0), InvalidParameter);
}

TEST_CASE("aitken acceleration") {
    std::vector<double> partial;
    double s = 0.0;
    for (int k = 0; k < 12; ++k) {
        s += std::pow(0.5, k);
        partial.push_back(s);
    }
    auto res = aitken_limit(partial);
    CHECK(res.limit == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.error_estimate < 1e-10);
    CHECK_THROWS_AS(aitken_limit({1.0, 2.0}), InvalidParameter);
}

TEST_CASE("gauge-based limit fit") {
    std::vector<double> gauges, values;
    for (int k = 0; k < 8; ++k) {
        double gk = std::pow(0.6, k);
        gauges.push_back(gk);
        values.push_back(4.2 - 3.0 * gk + 2.0 * gk * gk);
    }
    auto fit = fit_gauge_limit(gauges, values);
    CHECK(fit.limit == doctest::Approx(4.2).epsilon(1e-10));
    CHECK(fit.c1 == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(fit.c2 == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(fit.rms_residual < 1e-10);
    CHECK_THROWS_AS(fit_gauge_limit({1.0, 0.5, 0.2}, {1.0, 1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(fit_gauge_limit({1.0, 0.5, -0.2, 0.1}, {1.0, 1.0, 1.0, 1.0}), DomainError);
}
