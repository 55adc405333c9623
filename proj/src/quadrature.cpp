#include "hldde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hldde/errors.hpp"
#include "hldde/extrapolate.hpp"

namespace hldde {
namespace {

// Kronrod 15 abscissae/weights with the embedded Gauss 7 rule (odd nodes)
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
    double kronrod;
    double err; // |K15 - G7|, rescaled as in QUADPACK
};

PanelEval g7k15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x), f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    double err = std::abs((resk - resg) * h);
    const double scale = std::abs(resk * h);
    if (scale > 0.0 && err > 0.0)
        err = scale * std::min(1.0, std::pow(200.0 * err / scale, 1.5));
    return {resk * h, err};
}

void adapt(const std::function<double(double)>& f, double lo, double hi,
           const PanelEval& pe, double rel_tol, double abs_tol, int depth,
           int max_depth, int& budget, QuadResult& out) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(pe.kronrod));
    if (pe.err <= tol) {
        out.value += pe.kronrod;
        out.abs_error += pe.err;
        return;
    }
    if (depth >= max_depth || budget <= 0) {
        out.value += pe.kronrod;
        out.abs_error += pe.err;
        out.converged = false;
        return;
    }
    budget -= 2;
    const double mid = 0.5 * (lo + hi);
    adapt(f, lo, mid, g7k15(f, lo, mid), rel_tol, 0.5 * abs_tol, depth + 1, max_depth, budget, out);
    adapt(f, mid, hi, g7k15(f, mid, hi), rel_tol, 0.5 * abs_tol, depth + 1, max_depth, budget, out);
}

// Doubling-panel summation in a transformed variable v >= 0 where the
// integrand g decays to 0. v_cap bounds how far g may be probed (infinity if
// unrestricted). Exponentially decaying remainders close geometrically; the
// rest is handed to Aitken extrapolation over the partial sums.
QuadResult tail_by_panels(const std::function<double(double)>& g, double rel_tol, double v_cap) {
    QuadResult out;
    std::vector<double> partial;
    double v_lo = 0.0, v_hi = 1.0;
    double prev_panel = 0.0;
    bool have_prev = false;
    for (int k = 0; k < 48 && v_hi <= v_cap; ++k) {
        const QuadResult panel = quad(g, v_lo, v_hi, 0.05 * rel_tol, 1e-300, 40);
        out.value += panel.value;
        out.abs_error += panel.abs_error;
        out.converged = out.converged && panel.converged;
        partial.push_back(out.value);
        if (have_prev && prev_panel > 0.0 && panel.value >= 0.0) {
            const double ratio = panel.value / prev_panel;
            if (ratio < 0.5) {
                // decay is at least geometric per panel of doubling width,
                // hence super-geometric in v: close the tail directly
                const double correction = panel.value * ratio / (1.0 - ratio);
                if (correction <= 0.1 * rel_tol * std::abs(out.value)) {
                    out.value += correction;
                    out.abs_error += correction;
                    return out;
                }
            }
        }
        prev_panel = panel.value;
        have_prev = true;
        v_lo = v_hi;
        v_hi = 2.0 * v_hi;
    }
    if (partial.size() < 4) {
        out.converged = false;
        return out;
    }
    if (have_prev && prev_panel > 0.0) {
        const std::size_t n = partial.size();
        const double last_panel = partial[n - 1] - partial[n - 2];
        const double before = partial[n - 2] - partial[n - 3];
        if (before > 0.0 && last_panel / before >= 0.98)
            throw PreconditionError("tail integral: panel sums are not decaying; integral diverges");
    }
    // power-law decay in v: partial sums carry geometric error modes
    const auto [limit, est] = aitken_limit(partial);
    out.value = limit;
    out.abs_error += est;
    if (!(est <= rel_tol * std::abs(limit) + 1e-300)) out.converged = false;
    return out;
}

} // namespace

QuadResult quad(const std::function<double(double)>& f, double lo, double hi,
                double rel_tol, double abs_tol, int max_depth) {
    if (!(lo <= hi)) throw InvalidParameter("quad: lo must not exceed hi");
    QuadResult out;
    if (lo == hi) return out;
    int budget = 100000; // total panel cap, independent of the depth cap
    adapt(f, lo, hi, g7k15(f, lo, hi), rel_tol, abs_tol, 0, max_depth, budget, out);
    if (!std::isfinite(out.value)) throw DomainError("quad: integrand produced non-finite values");
    return out;
}

QuadResult tail_integral(const std::function<double(double)>& f, double t, double rel_tol) {
    if (!(t > 0.0)) throw InvalidParameter("tail_integral: t must be positive");
    // s = t e^v maps [t, inf) to v in [0, inf); power decay of f in s becomes
    // exponential decay in v, pure log corrections become power decay in v.
    const auto g = [&f, t](double v) {
        const double s = t * std::exp(v);
        if (!std::isfinite(s)) return 0.0;
        const double val = f(s) * s;
        return std::isfinite(val) ? val : 0.0;
    };
    // never probe past the representable range of s; the extrapolation step
    // accounts for the remaining mass
    const double v_cap = 700.0 - std::log(t);
    QuadResult out = tail_by_panels(g, rel_tol, std::max(v_cap, 8.0));
    if (!std::isfinite(out.value))
        throw PreconditionError("tail_integral: integral does not appear to converge");
    return out;
}

QuadResult tail_integral(const CoefficientExpr& f, double t, double rel_tol) {
    if (!f.is_structured()) return tail_integral([&f](double s) { return f.eval(s); }, t, rel_tol);
    if (!(t > 0.0)) throw InvalidParameter("tail_integral: t must be positive");

    // Strip borderline 1/t factors exactly: with u = ln s,
    //   int_t^inf s^{-1} h(ln s) ds = int_{ln t}^inf h(u) du,
    // which lowers every log level of the integrand by one. Repeat until the
    // power is off the boundary, then integrate with exponential decay in u.
    double scale = f.scale();
    double theta = f.power_exponent();
    std::vector<double> logs = f.log_powers();
    double lo = t;
    while (theta == -1.0) {
        if (logs.empty())
            throw PreconditionError("tail_integral: integral diverges (borderline exponents)");
        theta = logs.front();
        logs.erase(logs.begin());
        lo = std::log(lo);
        if (!(lo > 0.0))
            throw InvalidParameter("tail_integral: start too small for the log substitution");
    }
    if (theta > -1.0)
        throw PreconditionError("tail_integral: integral diverges (power exceeds -1)");

    // remaining integral: int_lo^inf scale * x^theta * prod (ln_k x)^{e_k} dx;
    // substitute x = lo e^v and evaluate in log space so huge x never overflows
    const double kappa = theta + 1.0; // negative
    const double ln_lo = std::log(lo);
    const std::vector<double> e = logs;
    const auto g = [scale, theta, kappa, lo, ln_lo, &e](double v) {
        // x = lo e^v; integrand * x = scale * exp((theta+1) ln x) * prod ...
        double ln_val = std::log(scale) + kappa * (ln_lo + v);
        double lk = ln_lo + v; // ln x
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (k > 0) lk = std::log(lk);
            if (e[k] != 0.0) ln_val += e[k] * std::log(lk);
        }
        (void)theta;
        return std::exp(ln_val);
    };
    QuadResult out = tail_by_panels(g, rel_tol, INFINITY);
    if (!std::isfinite(out.value))
        throw PreconditionError("tail_integral: integral does not appear to converge");
    return out;
}

} // namespace hldde
