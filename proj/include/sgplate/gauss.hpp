// gauss.hpp
//
// Gauss-Legendre quadrature rules on [-1,1] and helpers to map them onto
// intervals and panel subdivisions. Nodes are found by Newton iteration on
// the Legendre recurrence, which is accurate to machine precision for the
// modest orders used here.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sgplate/error.hpp"

namespace sgp {

struct QuadRule1 {
    std::vector<double> x; // nodes
    std::vector<double> w; // weights
};

// n-point Gauss-Legendre rule on [-1,1], exact for polynomials of degree
// 2n-1.
inline QuadRule1 gauss_legendre(int n) {
    if (n < 1 || n > 64)
        throw OutOfRange("gauss_legendre: point count " + std::to_string(n) +
                         " outside [1,64]");
    QuadRule1 rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        rule.x[n - 1 - i] = t;
        rule.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

// The same rule mapped onto [a,b].
inline QuadRule1 gauss_on_interval(int n, double a, double b) {
    QuadRule1 base = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        base.x[i] = mid + half * base.x[i];
        base.w[i] *= half;
    }
    return base;
}

// Gauss panels between consecutive breakpoints. Breakpoints must be
// nondecreasing; zero-length panels are skipped.
inline QuadRule1 gauss_panels(int n_per_panel, const std::vector<double>& breaks) {
    QuadRule1 rule;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (b < a)
            throw OutOfRange("gauss_panels: breakpoints must be nondecreasing");
        if (b - a < 1e-300) continue;
        QuadRule1 part = gauss_on_interval(n_per_panel, a, b);
        rule.x.insert(rule.x.end(), part.x.begin(), part.x.end());
        rule.w.insert(rule.w.end(), part.w.begin(), part.w.end());
    }
    return rule;
}

} // namespace sgp
