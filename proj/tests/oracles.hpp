#pragma once

// Reference computations used only by the tests. Each one takes a different route from
// the library code it checks: explicit formulas, brute-force scans, plain bisection.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double logistic(double x, double center, double beta) { return 1.0 / (1.0 + std::exp(-beta * (x - center))); }

inline double unit_uniform(double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); }

/// Plain bisection; assumes f(lo) and f(hi) have opposite signs.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
    const bool lo_negative = f(lo) < 0.0;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Roots of u = 1 - F(p - k u) by a coarse scan plus bisection, for a logistic F.
inline std::vector<double> logistic_green_roots(double p, double k, double center, double beta) {
    const auto g = [&](double u) { return u - 1.0 + logistic(p - k * u, center, beta); };
    std::vector<double> roots;
    const int cells = 2000;
    for (int i = 0; i < cells; ++i) {
        const double a = static_cast<double>(i) / cells;
        const double b = static_cast<double>(i + 1) / cells;
        if (g(a) == 0.0) roots.push_back(a);
        else if ((g(a) < 0.0) != (g(b) < 0.0) && g(b) != 0.0) roots.push_back(bisect(g, a, b));
    }
    return roots;
}

/// Fold prices found numerically: solve k f(x) = 1 on each side of the centre, then
/// map the tangency point back to the price axis.
inline std::pair<double, double> logistic_folds_numeric(double k, double center, double beta) {
    const auto slope_gap = [&](double x) {
        const double f = logistic(x, center, beta);
        return k * beta * f * (1.0 - f) - 1.0;
    };
    const double right = bisect(slope_gap, center, center + 50.0 / beta);
    const double left = bisect(slope_gap, center - 50.0 / beta, center);
    const auto price = [&](double x) { return x + k * (1.0 - logistic(x, center, beta)); };
    return {price(right), price(left)};
}

}  // namespace oracle
