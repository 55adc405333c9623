#include "hldde/improper.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hldde/errors.hpp"

namespace hldde {
namespace {

struct Parts {
    double scale;
    double theta;
    std::vector<double> logs;
};

Parts parts_of(const CoefficientExpr& f) {
    if (!f.is_structured())
        throw PreconditionError("exponent rule: expression is not structured");
    return {f.scale(), f.power_exponent(), f.log_powers()};
}

Parts primitive_parts(const Parts& in, bool& divergent) {
    if (in.theta != -1.0) {
        divergent = in.theta > -1.0;
        return {in.scale / std::abs(in.theta + 1.0), in.theta + 1.0, in.logs};
    }
    // substitute u = ln t and recurse one level down
    Parts inner{in.scale, in.logs.empty() ? 0.0 : in.logs[0],
                in.logs.empty() ? std::vector<double>{}
                                : std::vector<double>(in.logs.begin() + 1, in.logs.end())};
    if (in.logs.empty()) {
        divergent = true;
        return {in.scale, 0.0, {1.0}}; // primitive of 1/t is ln t
    }
    Parts prim = primitive_parts(inner, divergent);
    // lift back: exponent on u becomes an exponent on ln t
    std::vector<double> lifted;
    lifted.reserve(prim.logs.size() + 1);
    lifted.push_back(prim.theta);
    lifted.insert(lifted.end(), prim.logs.begin(), prim.logs.end());
    return {prim.scale, 0.0, lifted};
}

} // namespace

Convergence exponent_rule(const CoefficientExpr& f) {
    Parts p = parts_of(f);
    if (p.theta != -1.0) return p.theta < -1.0 ? Convergence::Convergent : Convergence::Divergent;
    for (double e : p.logs) {
        if (e != -1.0) return e < -1.0 ? Convergence::Convergent : Convergence::Divergent;
    }
    return Convergence::Divergent;
}

CoefficientExpr asymptotic_primitive(const CoefficientExpr& f) {
    bool divergent = false;
    Parts p = primitive_parts(parts_of(f), divergent);
    while (!p.logs.empty() && p.logs.back() == 0.0) p.logs.pop_back();
    return CoefficientExpr::power_log(p.scale, p.theta, p.logs);
}

ImproperVerdict classify_improper(const CoefficientExpr& f, double from) {
    if (!f.is_structured()) return classify_improper([&f](double t) { return f.eval(t); }, from);
    ImproperVerdict v;
    v.method = ClassifyMethod::ExactIndexRule;
    v.convergence = exponent_rule(f);
    if (v.convergence == Convergence::Convergent)
        v.value = tail_integral(f, from).value;
    else
        v.value = std::numeric_limits<double>::infinity();
    return v;
}

ImproperVerdict classify_improper(const std::function<double(double)>& f, double from) {
    if (!(from > 0.0)) throw InvalidParameter("classify_improper: from must be positive");
    ImproperVerdict v;
    v.method = ClassifyMethod::NumericalHeuristic;

    // window sums over [from 2^k, from 2^{k+1}]; stop where the integrand
    // leaves the representable range and decide from what was collected
    constexpr int kWindows = 40;
    std::vector<double> win;
    win.reserve(kWindows);
    double lo = from;
    bool overflowed = false;
    for (int k = 0; k < kWindows; ++k) {
        const double hi = 2.0 * lo;
        double w;
        try {
            w = quad(f, lo, hi, 1e-9, 1e-300, 32).value;
        } catch (const std::exception&) {
            break;
        }
        if (std::isnan(w)) break;
        if (std::isinf(w) && w > 0.0) {
            overflowed = true;
            break;
        }
        win.push_back(w);
        lo = hi;
    }
    // a window sum of a nonnegative integrand past double range settles it
    if (overflowed) {
        v.convergence = Convergence::Divergent;
        v.value = std::numeric_limits<double>::infinity();
        return v;
    }

    // trailing behaviour decides; 5 ratios span a factor 64 in t
    constexpr int kTrail = 5;
    const int n = static_cast<int>(win.size());
    if (n < kTrail + 3)
        throw InconclusiveError("classify_improper: too few usable dyadic windows");
    // the verdict stands even when the tail value itself is not computable
    auto tail_value = [&f, from]() {
        try {
            return tail_integral(f, from).value;
        } catch (const std::exception&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    bool all_zero = true;
    for (int k = n - kTrail - 1; k < n; ++k) all_zero = all_zero && win[k] == 0.0;
    if (all_zero) {
        v.convergence = Convergence::Convergent;
        v.value = tail_value();
        return v;
    }
    double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0, ratio_sum = 0.0;
    for (int k = n - kTrail; k < n; ++k) {
        if (!(win[k - 1] > 0.0) || !std::isfinite(win[k]))
            throw InconclusiveError("classify_improper: window sums not usable for a trend");
        const double r = win[k] / win[k - 1];
        ratio_min = std::min(ratio_min, r);
        ratio_max = std::max(ratio_max, r);
        ratio_sum += r;
    }
    const double ratio_mean = ratio_sum / kTrail;
    // window sums of t^sigma scale by 2^{sigma+1} per window
    const double sigma_hat = std::log2(ratio_mean) - 1.0;

    if (ratio_max <= 0.90 || sigma_hat <= -1.35) {
        v.convergence = Convergence::Convergent;
        v.value = tail_value();
    } else if (ratio_min >= 0.98 || sigma_hat >= -0.65) {
        v.convergence = Convergence::Divergent;
        v.value = std::numeric_limits<double>::infinity();
    } else {
        throw InconclusiveError(
            "classify_improper: dyadic window trend sits in the boundary band");
    }
    return v;
}

} // namespace hldde
