#pragma once

// Weighted Sobolev norms over the plate domain, boundary data norm
// surrogates, and the affine projection used to compare solutions that
// are only determined modulo affine functions.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/assemble.hpp"
#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"
#include "sgplate/neumann.hpp"
#include "sgplate/quadrature.hpp"
#include "sgplate/spline.hpp"

namespace sgp {

// Evaluation callback for norm integrals: parametric quadrature point in,
// physical cartesian derivative table out.
using FieldEval = std::function<DerivTable(const Eigen::Vector2d&)>;

struct FieldNorm {
    int order = 0;
    std::array<double, 4> seminorm{}; // sqrt of the order-i derivative integral
    double value = 0.0;               // r0^{-1} (sum_i r0^{2i} seminorm_i^2)^{1/2}
};

// Norm of the reference-length-weighted Sobolev space H^k, k <= 3, with
// each distinct partial counted once. Cell breaks control the quadrature
// panels; pass the spline breakpoints when integrating spline fields.
inline FieldNorm hk_norm(const Domain& dom, const FieldEval& f, int k,
                         const std::vector<double>& bx, const std::vector<double>& by,
                         int n1d = 8) {
    if (k < 0) throw OutOfRange("hk_norm: negative order");
    if (k > 3) throw OrderTooHigh("hk_norm: order exceeds 3");
    std::array<double, 4> acc{};
    for (const CellRule& cell : domain_cell_rules(dom, bx, by, n1d))
        for (const CellQuadPoint& qp : cell.pts) {
            const DerivTable t = f(qp.xp);
            for (int i = 0; i <= k; ++i) acc[std::size_t(i)] += qp.w * t.partial_norm_sq(i);
        }
    FieldNorm out;
    out.order = k;
    const double r0 = dom.r0();
    double total = 0.0, weight = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double a = std::max(acc[std::size_t(i)], 0.0);
        out.seminorm[std::size_t(i)] = std::sqrt(a);
        total += weight * a;
        weight *= r0 * r0;
    }
    out.value = std::sqrt(total) / r0;
    return out;
}

// Physical derivatives of a spline coefficient field. The space and domain
// must outlive the returned callback.
inline FieldEval spline_field(const SplineSpace& sp, const Domain& dom, Eigen::VectorXd coefs,
                              int k) {
    return [&sp, &dom, coefs = std::move(coefs), k](const Eigen::Vector2d& xp) {
        DerivTable t = sp.eval_field(coefs, xp, k);
        if (sp.mapped()) t = pull_table(t, dom.map_jacobians(xp));
        return t;
    };
}

// Difference between a spline field and an exact field given in physical
// coordinates. The space, domain and exact field must outlive the callback.
inline FieldEval difference_field(const SplineSpace& sp, const Domain& dom,
                                  Eigen::VectorXd coefs, const Field2& exact, int k) {
    return [&sp, &dom, coefs = std::move(coefs), &exact, k](const Eigen::Vector2d& xp) {
        DerivTable t = sp.eval_field(coefs, xp, k);
        if (sp.mapped()) t = pull_table(t, dom.map_jacobians(xp));
        t.axpy(-1.0, exact.derivs(dom.to_physical(xp), k));
        return t;
    };
}

// L2(Omega)-orthogonal projection of the field value onto span{1, x1, x2}
// in physical coordinates. Returns the coefficient triple.
inline Eigen::Vector3d affine_fit(const Domain& dom, const FieldEval& f,
                                  const std::vector<double>& bx, const std::vector<double>& by,
                                  int n1d = 8) {
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const CellRule& cell : domain_cell_rules(dom, bx, by, n1d))
        for (const CellQuadPoint& qp : cell.pts) {
            const Eigen::Vector2d x = dom.to_physical(qp.xp);
            const Eigen::Vector3d phi(1.0, x.x(), x.y());
            G += qp.w * phi * phi.transpose();
            b += qp.w * f(qp.xp).at(0, 0) * phi;
        }
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(G);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("affine_fit: degenerate moment matrix");
    return ldlt.solve(b);
}

// Subtracts the affine c0 + c1 x1 + c2 x2 from a field callback, adjusting
// value and gradient and leaving higher derivatives untouched.
inline FieldEval subtract_affine(FieldEval f, const Domain& dom, const Eigen::Vector3d& c) {
    return [f = std::move(f), &dom, c](const Eigen::Vector2d& xp) {
        DerivTable t = f(xp);
        const Eigen::Vector2d x = dom.to_physical(xp);
        t.at(0, 0) -= c(0) + c(1) * x.x() + c(2) * x.y();
        if (t.order() >= 1) {
            t.at(1, 0) -= c(1);
            t.at(0, 1) -= c(2);
        }
        return t;
    };
}

// L2 norm of periodic uniform boundary samples by the trapezoid rule,
// which is spectrally accurate on a periodic grid.
inline double boundary_l2(const Eigen::VectorXd& samples, double perimeter) {
    if (samples.size() == 0) return 0.0;
    return std::sqrt(perimeter * samples.squaredNorm() / double(samples.size()));
}

// Data norm surrogate for the stability diagnostic: the boundary L2 norms
// of the three data channels with the reference-length weights of their
// derivative orders.
inline double data_norm_surrogate(const NeumannData& data, double r0) {
    const double P = data.perimeter();
    return boundary_l2(data.Vhat_samples(), P) +
           boundary_l2(data.Mn_hat_samples(), P) / r0 +
           boundary_l2(data.Mnh_hat_samples(), P) / (r0 * r0);
}

}  // namespace sgp
