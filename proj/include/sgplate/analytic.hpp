// analytic.hpp
//
// Closed-form scalar fields built from terms of the shape
//
//     Re( c e^{i phase} x1^p x2^q e^{(k1 + i w1) x1 + (k2 + i w2) x2} )
//
// This family is closed under differentiation (each partial derivative of a
// term yields at most two terms of the same shape), so the full derivative
// triangle up to order 6 is materialized exactly at construction and
// per-point evaluation involves no finite differencing anywhere.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <tuple>
#include <vector>

#include "sgplate/deriv.hpp"

namespace sgp {

// User-facing description of one term.
struct Term {
    double c = 1.0;    // real amplitude
    int px1 = 0;       // power of x1
    int px2 = 0;       // power of x2
    double kx1 = 0.0;  // real exponential rate in x1
    double kx2 = 0.0;  // real exponential rate in x2
    double wx1 = 0.0;  // oscillation frequency in x1
    double wx2 = 0.0;  // oscillation frequency in x2
    double phase = 0.0;
};

namespace detail {

// Internal complexified term: Re( z x1^a x2^b e^{c1 x1 + c2 x2} ).
struct CTerm {
    int a = 0, b = 0;
    std::complex<double> c1{0, 0}, c2{0, 0};
    std::complex<double> z{0, 0};
};

inline std::vector<CTerm> cterm_dx(const std::vector<CTerm>& terms, int axis) {
    std::vector<CTerm> out;
    out.reserve(2 * terms.size());
    for (const CTerm& t : terms) {
        if (axis == 0) {
            if (t.a > 0) {
                CTerm d = t;
                d.z *= double(t.a);
                d.a -= 1;
                out.push_back(d);
            }
            if (t.c1 != std::complex<double>(0, 0)) {
                CTerm d = t;
                d.z *= t.c1;
                out.push_back(d);
            }
        } else {
            if (t.b > 0) {
                CTerm d = t;
                d.z *= double(t.b);
                d.b -= 1;
                out.push_back(d);
            }
            if (t.c2 != std::complex<double>(0, 0)) {
                CTerm d = t;
                d.z *= t.c2;
                out.push_back(d);
            }
        }
    }
    // Merge terms sharing the same monomial and exponent signature.
    std::map<std::tuple<int, int, double, double, double, double>, std::complex<double>> merged;
    for (const CTerm& t : out) {
        auto key = std::make_tuple(t.a, t.b, t.c1.real(), t.c1.imag(), t.c2.real(), t.c2.imag());
        merged[key] += t.z;
    }
    std::vector<CTerm> result;
    result.reserve(merged.size());
    for (const auto& [key, z] : merged) {
        if (z == std::complex<double>(0, 0)) continue;
        CTerm t;
        t.a = std::get<0>(key);
        t.b = std::get<1>(key);
        t.c1 = {std::get<2>(key), std::get<3>(key)};
        t.c2 = {std::get<4>(key), std::get<5>(key)};
        t.z = z;
        result.push_back(t);
    }
    return result;
}

inline double cterm_eval(const std::vector<CTerm>& terms, double x1, double x2) {
    double v = 0.0;
    for (const CTerm& t : terms) {
        double mono = 1.0;
        for (int i = 0; i < t.a; ++i) mono *= x1;
        for (int i = 0; i < t.b; ++i) mono *= x2;
        const std::complex<double> e = std::exp(t.c1 * x1 + t.c2 * x2);
        v += mono * (t.z * e).real();
    }
    return v;
}

} // namespace detail

// Field assembled from a list of terms, with the exact derivative triangle
// precomputed to order 6. Immutable after construction.
class AnalyticField final : public Field2 {
  public:
    explicit AnalyticField(const std::vector<Term>& terms) {
        std::vector<detail::CTerm> base;
        base.reserve(terms.size());
        for (const Term& u : terms) {
            detail::CTerm t;
            t.a = u.px1;
            t.b = u.px2;
            t.c1 = {u.kx1, u.wx1};
            t.c2 = {u.kx2, u.wx2};
            t.z = std::polar(u.c, u.phase);
            base.push_back(t);
        }
        table_[0] = std::move(base);
        for (int total = 1; total <= DerivTable::kMaxOrder; ++total)
            for (int j = 0; j <= total; ++j) {
                const int i = total - j;
                // Differentiate the parent entry one order below.
                if (i > 0)
                    table_[detail::tri_index(i, j)] =
                        detail::cterm_dx(table_[detail::tri_index(i - 1, j)], 0);
                else
                    table_[detail::tri_index(i, j)] =
                        detail::cterm_dx(table_[detail::tri_index(i, j - 1)], 1);
            }
    }

    int max_order() const override { return DerivTable::kMaxOrder; }

    DerivTable derivs(const Eigen::Vector2d& x, int k) const override {
        DerivTable t(k);
        for (int total = 0; total <= k; ++total)
            for (int j = 0; j <= total; ++j)
                t.at(total - j, j) =
                    detail::cterm_eval(table_[detail::tri_index(total - j, j)], x.x(), x.y());
        return t;
    }

  private:
    std::array<std::vector<detail::CTerm>, detail::tri_size(DerivTable::kMaxOrder)> table_;
};

} // namespace sgp
