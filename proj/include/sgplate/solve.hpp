#pragma once

// Solution of the constrained Galerkin saddle system. A bordered sparse
// matrix couples the stiffness block with the three normalization rows;
// the direct factorization is polished by iterative refinement, with a
// MINRES fallback for matrices the factorization cannot handle.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include "sgplate/assemble.hpp"
#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"
#include "sgplate/material.hpp"
#include "sgplate/neumann.hpp"
#include "sgplate/norms.hpp"
#include "sgplate/spline.hpp"

namespace sgp {

struct SolveOptions {
    bool force_iterative = false; // skip the direct factorization
    int refine_steps = 2;         // iterative refinement passes after the direct solve
    double iterative_rtol = 1e-12;
    double incompat_tol = 1e-6;   // relative unbalanced-load fraction that flags bad data
    bool check_compatibility = true;
    int norm_quad = 0;            // points per direction for norm integrals; 0: degree + 2
};

struct SolveResult {
    Eigen::VectorXd coefs;        // full tensor-product vector; pruned dofs stay zero
    Eigen::Vector3d multipliers = Eigen::Vector3d::Zero();
    double energy = 0.0;
    double h3_norm = 0.0;
    double galerkin_residual = 0.0;
    double constraint_residual = 0.0;
    double residual = 0.0;        // max of the two relative residuals
    double stability_ratio = std::numeric_limits<double>::quiet_NaN();
    double r0 = 1.0;
};

namespace detail {

// Bordered matrix [[K, C^T], [C, 0]] in one sparse object.
inline Eigen::SparseMatrix<double> bordered_matrix(const AssembledSystem& sys) {
    const int na = sys.active_dim();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(sys.K.nonZeros()) + 6 * std::size_t(na));
    for (int o = 0; o < sys.K.outerSize(); ++o)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, o); it; ++it)
            trips.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int r = 0; r < 3; ++r)
        for (int j = 0; j < na; ++j)
            if (sys.C(r, j) != 0.0) {
                trips.emplace_back(na + r, j, sys.C(r, j));
                trips.emplace_back(j, na + r, sys.C(r, j));
            }
    Eigen::SparseMatrix<double> B(na + 3, na + 3);
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

// Symmetric diagonal equilibration by inverse square roots of the row
// infinity norms. Keeps the matrix symmetric and tames the scale gap
// between the stiffness block and the constraint rows.
inline Eigen::VectorXd equilibration(const Eigen::SparseMatrix<double>& B) {
    Eigen::VectorXd rn = Eigen::VectorXd::Zero(B.rows());
    for (int o = 0; o < B.outerSize(); ++o)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, o); it; ++it) {
            rn[it.row()] = std::max(rn[it.row()], std::abs(it.value()));
            rn[it.col()] = std::max(rn[it.col()], std::abs(it.value()));
        }
    Eigen::VectorXd d(B.rows());
    for (int i = 0; i < B.rows(); ++i)
        d[i] = rn[i] > 0.0 ? 1.0 / std::sqrt(rn[i]) : 1.0;
    return d;
}

}  // namespace detail

// Solves the saddle system and fills the well-posedness diagnostics. The
// space and domain are the ones the system was assembled on; they supply
// the norm quadrature and the reference length.
inline SolveResult solve(const AssembledSystem& sys, const SplineSpace& space, const Domain& dom,
                         const SolveOptions& opts = {}) {
    const int na = sys.active_dim();
    if (na == 0) throw SingularSystem("solve: no active degrees of freedom");
    const int n = na + 3;
    const Eigen::SparseMatrix<double> B = detail::bordered_matrix(sys);
    const Eigen::VectorXd d = detail::equilibration(B);
    const Eigen::SparseMatrix<double> Bs =
        d.asDiagonal() * B * d.asDiagonal();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs.head(na) = sys.F;

    const double bnorm = [&] {
        double m = 0.0;
        for (int o = 0; o < B.outerSize(); ++o)
            for (Eigen::SparseMatrix<double>::InnerIterator it(B, o); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }();
    const double tiny = std::numeric_limits<double>::min();
    auto rel_residual = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd r = rhs - B * x;
        const double den =
            bnorm * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff() + tiny;
        return r.cwiseAbs().maxCoeff() / den;
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    bool solved = false;
    if (!opts.force_iterative) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(Bs);
        if (lu.info() == Eigen::Success) {
            x = d.asDiagonal() * Eigen::VectorXd(lu.solve(d.asDiagonal() * rhs));
            for (int pass = 0; pass < opts.refine_steps; ++pass) {
                const Eigen::VectorXd r = rhs - B * x;
                x += d.asDiagonal() * Eigen::VectorXd(lu.solve(d.asDiagonal() * r));
            }
            solved = rel_residual(x) <= 1e-8;
        }
    }
    if (!solved) {
        Eigen::MINRES<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> minres;
        minres.setTolerance(opts.iterative_rtol);
        minres.setMaxIterations(50 * n);
        minres.compute(Bs);
        x = d.asDiagonal() * Eigen::VectorXd(minres.solve(d.asDiagonal() * rhs));
        if (minres.info() != Eigen::Success || !x.allFinite() || rel_residual(x) > 1e-6)
            throw SingularSystem("solve: factorization and iterative fallback both failed");
    }

    SolveResult res;
    const Eigen::VectorXd u = x.head(na);
    res.multipliers = x.tail(3);

    // Compatible data lie in the range of the stiffness block, so the
    // multipliers stay at roundoff. A large unbalanced fraction means the
    // data violate the closed-boundary equilibrium conditions.
    const double kscale = sys.k_scale();
    if (opts.check_compatibility) {
        const Eigen::VectorXd unbalanced = sys.C.transpose() * res.multipliers;
        const double den = sys.F.norm() + kscale * u.norm() + tiny;
        if (unbalanced.norm() / den > opts.incompat_tol)
            throw IncompatibleData("solve: load violates the compatibility conditions");
    }

    res.energy = u.dot(sys.K * u);
    const Eigen::VectorXd g = sys.K * u + sys.C.transpose() * res.multipliers - sys.F;
    const double gden =
        kscale * u.cwiseAbs().maxCoeff() + sys.F.cwiseAbs().maxCoeff() + tiny;
    res.galerkin_residual = g.cwiseAbs().maxCoeff() / gden;
    const Eigen::Vector3d cu = sys.C * u;
    const double cden = sys.C.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff() + tiny;
    res.constraint_residual = cu.cwiseAbs().maxCoeff() / cden;
    res.residual = std::max(res.galerkin_residual, res.constraint_residual);

    res.coefs = Eigen::VectorXd::Zero(space.dim());
    for (int a = 0; a < na; ++a) res.coefs[sys.active[std::size_t(a)]] = u[a];
    res.r0 = dom.r0();
    const int n1d = opts.norm_quad > 0 ? opts.norm_quad : space.degree() + 2;
    res.h3_norm = hk_norm(dom, spline_field(space, dom, res.coefs, 3), 3,
                          space.basis_x().breakpoints(), space.basis_y().breakpoints(), n1d)
                      .value;
    return res;
}

// Stability diagnostic: the H3 norm of the solution against the weighted
// boundary L2 surrogate of the data norms. Zero data make the ratio
// meaningless, reported as NaN.
inline double stability_report(const SolveResult& result, const NeumannData& data) {
    const double den = data_norm_surrogate(data, result.r0);
    if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return result.h3_norm / den;
}

// Convenience front end: compatibility check, assembly, solve and the
// stability diagnostic in one call.
inline SolveResult solve_neumann(const Domain& dom, const SplineSpace& space,
                                 const MaterialField& mat, const NeumannData& data,
                                 const AssembleOptions& aopts = {},
                                 const SolveOptions& sopts = {}) {
    if (sopts.check_compatibility) {
        const CompatibilityReport rep = compatibility_check(data, dom);
        if (!rep.pass)
            throw IncompatibleData("solve_neumann: data fail the compatibility conditions");
    }
    const AssembledSystem sys = assemble(dom, space, mat, &data, aopts);
    SolveResult res = solve(sys, space, dom, sopts);
    res.stability_ratio = stability_report(res, data);
    return res;
}

}  // namespace sgp
