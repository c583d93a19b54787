#pragma once

// Reduction of the sixth-order moment divergence to principal form.
//
// The third divergence of the higher-order moment tensor,
//   h(u) = M111,111 + M222,222 + M112,112 + M221,221,
// expands by the Leibniz rule into coefficient derivatives times partials
// of u up to order six. The pieces where the coefficients carry at most
// one derivative regroup exactly into
//   (b0 + 2 b1) tri-laplacian(u) + (3 b0 + 6 b1),a (bilaplacian u),a
// leaving a remainder with only fourth and lower order partials of u.
// reduction_point evaluates both groupings; their gap is pure roundoff
// when the regrouping algebra is right. reduction_check sweeps a sample
// set and also reports the smallest constant in the pointwise bound
//   |tri-laplacian u| <= M (|grad bilaplacian u| + sum_{k=0}^{4} |D^k u|)
// which stays finite on solution fields.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/material.hpp"

namespace sgp {

namespace detail {

// One addend of a moment component before the outer differentiation: the
// coefficient combination g0 b0 + g1 b1 times a pure third partial of u.
struct MomentTerm {
    double g0, g1;
    int p, q;
};

// Moment component together with the outer third-derivative multi-index
// it receives inside h(u).
struct MomentComponent {
    int m1, m2;
    MomentTerm terms[2];
};

// Constitutive forms of the four independent components:
//   M111 = (b0 + 2 b1) u,111 + (b0 - 3 b1) u,122
//   M222 = (b0 + 2 b1) u,222 + (b0 - 3 b1) u,112
//   M112 = (b0 + 12 b1) u,112 + (b0 - 3 b1) u,222
//   M221 = (b0 + 12 b1) u,122 + (b0 - 3 b1) u,111
// The mixed components absorb their multiplicity three, so the four sums
// above cover the full symmetric contraction.
inline const MomentComponent* moment_components() {
    static const MomentComponent comps[4] = {
        {3, 0, {{1.0, 2.0, 3, 0}, {1.0, -3.0, 1, 2}}},
        {0, 3, {{1.0, 2.0, 0, 3}, {1.0, -3.0, 2, 1}}},
        {2, 1, {{1.0, 12.0, 2, 1}, {1.0, -3.0, 0, 3}}},
        {1, 2, {{1.0, 12.0, 1, 2}, {1.0, -3.0, 3, 0}}},
    };
    return comps;
}

}  // namespace detail

// Both groupings of h(u) at one point plus the regrouping ingredients.
struct ReductionPoint {
    double direct = 0.0;
    double regrouped = 0.0;
    double principal = 0.0;
    Eigen::Vector2d fifth_coef = Eigen::Vector2d::Zero();
    double fifth = 0.0;
    double remainder = 0.0;
    double gap = 0.0;
};

// Worst-case figures over a sample set.
struct ReductionReport {
    double max_gap = 0.0;
    double scale = 0.0;
    double ineq_m = 0.0;
    int n_points = 0;
};

// Coefficient field tables at one point, differentiated to order k. Both
// b0 and b1 scale linearly with the shear modulus, so their tables are
// the modulus table scaled by the unit-modulus coefficient values.
inline std::pair<DerivTable, DerivTable> moment_coefficients(const MaterialField& mat,
                                                             const Eigen::Vector2d& x, int k) {
    const DerivTable mu = mat.mu->derivs(x, k);
    const auto unit =
        eval_coefficients(1.0, 0.0, mat.t, mat.l0, mat.l1, mat.l2, mat.q9_ratio);
    DerivTable b0(k), b1(k);
    b0.axpy(unit.b0, mu);
    b1.axpy(unit.b1, mu);
    return {b0, b1};
}

// Core evaluation from prepared tables: u to order six, coefficients to
// order three. Terms whose coefficient factor carries two or three
// derivatives involve u only to order four and form the remainder.
inline ReductionPoint reduction_point(const DerivTable& ut, const DerivTable& b0,
                                      const DerivTable& b1) {
    ReductionPoint out;
    out.principal = (b0.value() + 2.0 * b1.value()) * ut.trilaplacian();
    out.fifth_coef = 3.0 * b0.gradient() + 6.0 * b1.gradient();
    out.fifth = out.fifth_coef.dot(ut.grad_bilaplacian());
    const detail::MomentComponent* comps = detail::moment_components();
    for (int c = 0; c < 4; ++c) {
        const auto& comp = comps[c];
        for (const auto& term : comp.terms) {
            for (int k1 = 0; k1 <= comp.m1; ++k1) {
                for (int k2 = 0; k2 <= comp.m2; ++k2) {
                    const double w =
                        detail::binomial(comp.m1, k1) * detail::binomial(comp.m2, k2);
                    const double cd = term.g0 * b0.at(k1, k2) + term.g1 * b1.at(k1, k2);
                    const double ud =
                        ut.at(term.p + comp.m1 - k1, term.q + comp.m2 - k2);
                    const double add = w * cd * ud;
                    out.direct += add;
                    if (k1 + k2 >= 2) out.remainder += add;
                }
            }
        }
    }
    out.regrouped = out.principal + out.fifth + out.remainder;
    out.gap = std::abs(out.direct - out.regrouped);
    return out;
}

inline ReductionPoint reduction_point(const Field2& u, const MaterialField& mat,
                                      const Eigen::Vector2d& x) {
    const auto [b0, b1] = moment_coefficients(mat, x, 3);
    return reduction_point(u.derivs(x, 6), b0, b1);
}

// Smallest admissible constant at one point for
// |tri-laplacian u| <= M (|grad bilaplacian u| + sum_{k=0}^{4} |D^k u|).
// Zero when the left side vanishes; infinity when only the right side
// does (the field then violates the solution-form bound at that point).
inline double diff_ineq_ratio(const DerivTable& ut) {
    const double lhs = std::abs(ut.trilaplacian());
    if (lhs == 0.0) return 0.0;
    double rhs = ut.grad_bilaplacian().norm();
    for (int k = 0; k <= 4; ++k) rhs += std::sqrt(ut.tensor_norm_sq(k));
    if (rhs == 0.0) return std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

// Concentric-ring sample set strictly inside the disk of the given
// radius. The center is excluded so homogeneous fields keep finite
// inequality ratios.
inline std::vector<Eigen::Vector2d> disk_samples(double radius = 1.0, int n_r = 6,
                                                 int n_theta = 16) {
    if (!(radius > 0.0) || n_r < 1 || n_theta < 1)
        throw OutOfRange("disk_samples: radius and counts must be positive");
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_r; ++i) {
        const double r = radius * double(i + 1) / double(n_r + 1);
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * M_PI * double(j) / double(n_theta);
            pts.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    return pts;
}

inline ReductionReport reduction_check(const Field2& u, const MaterialField& mat,
                                       std::vector<Eigen::Vector2d> points = {}) {
    if (points.empty()) points = disk_samples();
    ReductionReport rep;
    rep.n_points = static_cast<int>(points.size());
    for (const auto& x : points) {
        const DerivTable ut = u.derivs(x, 6);
        const auto [b0, b1] = moment_coefficients(mat, x, 3);
        const ReductionPoint p = reduction_point(ut, b0, b1);
        rep.max_gap = std::max(rep.max_gap, p.gap);
        rep.scale = std::max({rep.scale, std::abs(p.direct), std::abs(p.regrouped)});
        rep.ineq_m = std::max(rep.ineq_m, diff_ineq_ratio(ut));
    }
    return rep;
}

}  // namespace sgp
