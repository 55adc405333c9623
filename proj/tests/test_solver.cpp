#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hldde/dde.hpp"
#include "hldde/errors.hpp"
#include "hldde/grid.hpp"
#include "hldde/phi.hpp"

using namespace hldde;

namespace {

HalfLinearEquation square_solution_eq(double alpha, double lambda) {
    auto r = CoefficientExpr::constant(1.0);
    auto tau = DelayMap::proportional(lambda);
    return HalfLinearEquation(alpha, r, manufactured_p(r, tau, 2.0, alpha), tau, 1.0);
}

HistorySpec square_history() {
    return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }, std::nullopt};
}

} // namespace

TEST_CASE("manufactured coefficient makes t^2 an exact solution") {
    // alpha = 2, r = 1: (y')' = 2 must equal p * Phi(y(lambda t))
    auto eq = square_solution_eq(2.0, 0.5);
    CHECK(eq.p_eval(3.0) == doctest::Approx(2.0 / (0.25 * 9.0)).epsilon(1e-13));

    auto grid = geometric_grid(2.0, 80.0, 40);
    double res = residual(eq, [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                          grid);
    CHECK(res < 1e-7);

    // a wrong candidate is loudly rejected by the same residual
    double bad = residual(eq, [](double t) { return t * t * t; },
                          [](double t) { return 3.0 * t * t; }, grid);
    CHECK(bad > 1e-2);

    CHECK_THROWS_AS(manufactured_p(CoefficientExpr::power_log(1.0, 0.0, {1.0}),
                                   DelayMap::proportional(0.5), 2.0, 2.0),
                    InvalidParameter);
    CHECK_THROWS_AS(manufactured_p(CoefficientExpr::constant(1.0), DelayMap::shift(1.0), 2.0, 2.0),
                    InvalidParameter);
}

TEST_CASE("solver hits the manufactured solution") {
    auto eq = square_solution_eq(2.0, 0.5);
    Trajectory tr = solve(eq, square_history(), 100.0);
    CHECK(tr.status == TrajectoryStatus::Complete);
    CHECK(tr.t_end() == doctest::Approx(100.0));
    CHECK(std::fabs(tr.value(100.0) - 1e4) / 1e4 < 1e-5);

    // dense output between nodes, and the quasiderivative identity u = r Phi(y')
    for (double t : {7.3, 19.91, 60.007}) {
        CHECK(tr.value(t) == doctest::Approx(t * t).epsilon(1e-7));
        CHECK(tr.derivative(t) == doctest::Approx(2.0 * t).epsilon(1e-6));
        CHECK(tr.quasi_value(t) ==
              doctest::Approx(eq.r_eval(t) * phi(tr.derivative(t), eq.alpha())).epsilon(1e-8));
    }
    for (std::size_t i = 0; i < tr.ts.size(); i += 50)
        CHECK(tr.quasis[i] == doctest::Approx(eq.r_eval(tr.ts[i]) *
                                              phi(tr.y_primes[i], eq.alpha())).epsilon(1e-12));

    // delayed reads below the start node come from the attached history
    CHECK(tr.value(0.7) == doctest::Approx(0.49));
    CHECK(tr.derivative(0.7) == doctest::Approx(1.4));
    CHECK_THROWS_AS(tr.value(0.1), DomainError);      // below tau(a)
    CHECK_THROWS_AS(tr.value(100.5), DomainError);    // never extrapolates
}

TEST_CASE("fixed-step errors shrink at least eight-fold per halving") {
    auto eq = square_solution_eq(1.5, 0.9);
    double prev_err = -1.0;
    for (double h : {0.4, 0.2, 0.1}) {
        Trajectory tr = solve(eq, square_history(), 50.0, {h, 0.0});
        double err = std::fabs(tr.value(50.0) - 2500.0) / 2500.0;
        if (prev_err > 0.0 && prev_err > 1e-12)
            CHECK(prev_err / err >= 8.0);
        prev_err = err;
    }
}

TEST_CASE("adaptive tolerance is honored across a nonstructured coefficient") {
    // alpha = 3, proportional delay, exact solution still t^2
    auto eq = square_solution_eq(3.0, 0.3);
    Trajectory loose = solve(eq, square_history(), 100.0, {0.05, 1e-6});
    Trajectory tight = solve(eq, square_history(), 100.0, {0.05, 1e-11});
    double eloose = std::fabs(loose.value(100.0) - 1e4) / 1e4;
    double etight = std::fabs(tight.value(100.0) - 1e4) / 1e4;
    CHECK(etight < eloose);
    CHECK(etight < 1e-6);
    CHECK(tight.ts.size() > loose.ts.size());
}

TEST_CASE("truncation statuses") {
    // y'' = 100 y: solutions blow up as e^{10 t}, overflow long before t = 200
    HalfLinearEquation up(2.0, CoefficientExpr::constant(1.0), CoefficientExpr::constant(100.0),
                          DelayMap::shift(0.0), 1.0);
    Trajectory tru = solve(up, {[](double t) { return std::exp(10.0 * t); },
                                [](double t) { return 10.0 * std::exp(10.0 * t); },
                                std::nullopt},
                           200.0);
    CHECK(tru.status == TrajectoryStatus::TruncatedOverflow);
    CHECK(tru.t_end() < 200.0);
    CHECK(std::isfinite(tru.ys.back()));

    // steeply decreasing history drives y through zero
    HalfLinearEquation down(2.0, CoefficientExpr::constant(1.0), CoefficientExpr::constant(1.0),
                            DelayMap::shift(1.0), 1.0);
    Trajectory trd = solve(down, {[](double t) { return std::exp(-6.0 * t); },
                                  [](double t) { return -6.0 * std::exp(-6.0 * t); },
                                  std::nullopt},
                           50.0);
    CHECK(trd.status == TrajectoryStatus::TruncatedNonpositive);
    CHECK(trd.t_end() < 50.0);
    CHECK(trd.ys.back() > 0.0); // the offending nodes were dropped
}

TEST_CASE("solver input contracts") {
    auto eq = square_solution_eq(2.0, 0.5);
    CHECK_THROWS_AS(solve(eq, {nullptr, nullptr, std::nullopt}, 10.0), InvalidParameter);
    CHECK_THROWS_AS(solve(eq, square_history(), 0.5), InvalidParameter);
    CHECK_THROWS_AS(solve(eq, square_history(), 10.0, {-0.1, 1e-10}), InvalidParameter);
    CHECK_THROWS_AS(solve(eq, {[](double t) { return t - 0.6; }, [](double) { return 1.0; },
                               std::nullopt},
                          10.0),
                    InvalidParameter); // history vanishes inside [tau(a), a]
}

TEST_CASE("classification of computed trajectories") {
    auto eq = square_solution_eq(2.0, 0.5);
    Trajectory tr = solve(eq, square_history(), 2000.0);
    auto cls = classify_trajectory(tr);
    CHECK(cls.monotonicity == Monotonicity::Increasing);
    CHECK(cls.y_limit.kind == LimitKind::Infinite);
    CHECK(cls.quasi_limit.kind == LimitKind::Infinite);
    CHECK(cls.label == ClassLabel::IInfInf);
    CHECK(to_string(cls.label) == "I_{inf,inf}");

    // too little tail: limits stay undetermined rather than guessed
    Trajectory shorttr = solve(eq, square_history(), 6.0);
    auto u = classify_trajectory(shorttr);
    CHECK(u.monotonicity == Monotonicity::Increasing);
    CHECK(u.y_limit.kind == LimitKind::Undetermined);
    CHECK(u.label == ClassLabel::Undetermined);
}

TEST_CASE("decreasing solutions classify as D") {
    // y'' = (4t^2 - 2) e^{1-2t} y(t-1) has the decreasing solution e^{-t^2}
    auto p = CoefficientExpr::custom_fn(
        [](double t) { return (4.0 * t * t - 2.0) * std::exp(1.0 - 2.0 * t); },
        [](double t) { return std::exp(1.0 - 2.0 * t) * (8.0 * t - 2.0 * (4.0 * t * t - 2.0)); });
    HalfLinearEquation eq(2.0, CoefficientExpr::constant(1.0), p, DelayMap::shift(1.0), 1.0);
    HistorySpec h{[](double t) { return std::exp(-t * t); },
                  [](double t) { return -2.0 * t * std::exp(-t * t); }, std::nullopt};
    Trajectory tr = solve(eq, h, 4.5);
    CHECK(tr.status == TrajectoryStatus::Complete);
    CHECK(std::fabs(tr.value(4.0) - std::exp(-16.0)) / std::exp(-16.0) < 1e-4);
    auto cls = classify_trajectory(tr);
    CHECK(cls.monotonicity == Monotonicity::Decreasing);
    CHECK(cls.label == ClassLabel::D);
}
