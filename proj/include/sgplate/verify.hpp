// verify.hpp
//
// Cross-module invariant suite behind the `verify` subcommand. Every check
// re-derives a property the library promises elsewhere (tensor symmetry,
// spline reproduction, Galerkin orthogonality, weight bounds, profile
// ratios) and reports a named verdict. The measured value and the
// tolerance it was held against travel with the verdict so a failure
// pinpoints the module, the property and the margin in one row.
//
// The meaning of `value` is check-specific: usually the worst relative
// gap seen, for positivity checks the smallest margin, for the
// convergence check the observed rate. `pass` is authoritative either
// way; value and tol are diagnostic.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgplate/analytic.hpp"
#include "sgplate/artifact.hpp"
#include "sgplate/battery.hpp"
#include "sgplate/carleman.hpp"
#include "sgplate/config.hpp"
#include "sgplate/profile.hpp"
#include "sgplate/reduction.hpp"
#include "sgplate/solve.hpp"

namespace sgp {

struct InvariantResult {
    std::string module;
    std::string property;
    bool pass = false;
    double value = 0.0;
    double tol = 0.0;
};

namespace detail {

// Coefficients of the univariate spline interpolating f at the Greville
// abscissae. The collocation matrix is totally positive and banded; full
// pivoting on these small systems is simplest and loses nothing.
inline Eigen::VectorXd greville_interp(const SplineBasis1D& b,
                                       const std::function<double(double)>& f) {
    const int n = b.dim();
    const int p = b.degree();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const double g = b.greville(i);
        const int span = b.find_span(g);
        const Eigen::MatrixXd d = b.ders(g, 0);
        for (int k = 0; k <= p; ++k) A(i, span - p + k) = d(0, k);
        rhs[i] = f(g);
    }
    return A.fullPivLu().solve(rhs);
}

// Tensor-product coefficients of fx(x1) * fy(x2) on the full space.
inline Eigen::VectorXd tensor_coefs(const SplineSpace& sp, const std::function<double(double)>& fx,
                                    const std::function<double(double)>& fy) {
    const Eigen::VectorXd cx = greville_interp(sp.basis_x(), fx);
    const Eigen::VectorXd cy = greville_interp(sp.basis_y(), fy);
    Eigen::VectorXd c(sp.dim());
    for (int i = 0; i < sp.basis_x().dim(); ++i)
        for (int j = 0; j < sp.basis_y().dim(); ++j) c[sp.index(i, j)] = cx[i] * cy[j];
    return c;
}

inline Eigen::VectorXd restrict_active(const AssembledSystem& sys, const Eigen::VectorXd& full) {
    Eigen::VectorXd out(sys.active_dim());
    for (int a = 0; a < sys.active_dim(); ++a) out[a] = full[sys.active[std::size_t(a)]];
    return out;
}

// Relative H^3 distance between a spline solution and a manufactured
// field, measured modulo affine functions as the problem only determines
// the solution up to that kernel.
inline double relative_h3_error(const Domain& dom, const SplineSpace& sp,
                                const Eigen::VectorXd& coefs, const Field2& exact) {
    const auto& bx = sp.basis_x().breakpoints();
    const auto& by = sp.basis_y().breakpoints();
    FieldEval diff = difference_field(sp, dom, coefs, exact, 3);
    const Eigen::Vector3d fit = affine_fit(dom, diff, bx, by, sp.degree() + 2);
    const double err =
        hk_norm(dom, subtract_affine(std::move(diff), dom, fit), 3, bx, by, sp.degree() + 2)
            .value;
    const double ref = hk_norm(
                           dom,
                           [&](const Eigen::Vector2d& xp) {
                               return exact.derivs(dom.to_physical(xp), 3);
                           },
                           3, bx, by, sp.degree() + 2)
                           .value;
    return err / ref;
}

// Shared Neumann solve reused by several checks: unit disk, constant
// material, manufactured cubic, solved once directly and once through
// the iterative fallback.
struct VerifyContext {
    Domain dom;
    MaterialField mat;
    SplineSpace space;
    PolyField cubic;
    NeumannData data;
    AssembledSystem sys;
    SolveResult direct;
    SolveResult iterative;

    VerifyContext()
        : dom(Domain::disk(1.0)),
          mat(MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)),
          space(build_space(dom, 4, 8)),
          cubic(Poly2::monomial(3, 0)),
          data(synthesize(cubic, mat, dom)),
          sys(assemble(dom, space, mat, &data)),
          direct(solve(sys, space, dom)) {
        SolveOptions it;
        it.force_iterative = true;
        iterative = solve(sys, space, dom, it);
    }
};

inline MaterialField random_material(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(0.5, 3.0), la(0.1, 2.0), th(0.4, 1.5),
        len(0.5, 1.5), q9(-0.5, 0.8);
    MaterialField m =
        MaterialField::constants(mu(rng), la(rng), th(rng), len(rng), len(rng), len(rng));
    m.q9_ratio = q9(rng);
    return m;
}

inline Eigen::Matrix2d random_sym2(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Matrix2d a;
    const double off = g(rng);
    a << g(rng), off, off, g(rng);
    return a;
}

inline Sym3 random_sym3(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Sym3 s;
    for (int m = 0; m < 4; ++m) s.slot(m) = g(rng);
    return s;
}

template <typename Arr>
inline double max_abs(const Arr& a) {
    double m = 0.0;
    for (const double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline InvariantResult check_tensor_symmetry(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xa1u);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const MaterialField m = random_material(rng);
        const StiffnessTensors ten = eval_tensors(m, Eigen::Vector2d(0.3, -0.2));
        const Eigen::Matrix2d A = random_sym2(rng), B = random_sym2(rng);
        const double pscale =
            (max_abs(ten.P) + max_abs(ten.Ph)) * A.norm() * B.norm();
        worst = std::max(worst, std::abs(p_contract_direct(ten, A, B) -
                                         p_contract_direct(ten, B, A)) /
                                    pscale);
        const Sym3 S = random_sym3(rng), T = random_sym3(rng);
        const double qscale =
            max_abs(ten.Q) * std::sqrt(S.norm_sq_full() * T.norm_sq_full());
        worst = std::max(worst, std::abs(q_contract_direct(ten, S, T) -
                                         q_contract_direct(ten, T, S)) /
                                    qscale);
    }
    return {"material", "tensor-symmetry", worst <= 1e-12, worst, 1e-12};
}

inline InvariantResult check_constitutive_equivalence(std::uint64_t seed) {
    using detail::idx6;
    std::mt19937_64 rng(seed ^ 0xb2u);
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
        const MaterialField m = random_material(rng);
        const StiffnessTensors ten = eval_tensors(m, Eigen::Vector2d(-0.1, 0.4));
        const Sym3 S = random_sym3(rng);
        const Sym3 red = couple_Mh(ten, S);
        const double scale = max_abs(ten.Q) * std::sqrt(S.norm_sq_full()) + 1e-300;
        const int rep[4][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}};
        for (int s = 0; s < 4; ++s) {
            double direct = 0.0;
            for (int l = 0; l < 2; ++l)
                for (int mm = 0; mm < 2; ++mm)
                    for (int n = 0; n < 2; ++n)
                        direct +=
                            ten.Q[idx6(rep[s][0], rep[s][1], rep[s][2], l, mm, n)] * S(l, mm, n);
            worst = std::max(worst, std::abs(red.slot(s) - direct) / scale);
        }
    }
    return {"material", "constitutive-equivalence", worst <= 1e-12, worst, 1e-12};
}

inline InvariantResult check_convexity_positivity(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xc3u);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int it = 0; it < 20 && ok; ++it) {
        const MaterialField m = random_material(rng);
        const StiffnessTensors ten = eval_tensors(m, Eigen::Vector2d(0.2, 0.1));
        try {
            const auto [xp, xq] = convexity_probe(ten, 2000, seed + std::uint64_t(it));
            worst = std::min({worst, xp, xq});
        } catch (const ConvexityViolation&) {
            ok = false;
            worst = 0.0;
        }
    }
    return {"material", "convexity-positivity", ok && worst > 0.0, worst, 0.0};
}

inline InvariantResult check_split_invariance(std::uint64_t seed) {
    MaterialField m = MaterialField::constants(1.4, 0.8, 0.9, 0.7, 1.2, 0.8);
    double base_p = 0.0, base_q = 0.0, worst = 0.0;
    bool first = true;
    for (const double ratio : {0.0, 0.7, -0.4}) {
        m.q9_ratio = ratio;
        const StiffnessTensors ten = eval_tensors(m, Eigen::Vector2d::Zero());
        const auto [xp, xq] = convexity_probe(ten, 500, seed ^ 0xd4u);
        if (first) {
            base_p = xp;
            base_q = xq;
            first = false;
        } else {
            worst = std::max({worst, std::abs(xp - base_p) / base_p,
                              std::abs(xq - base_q) / base_q});
        }
    }
    return {"material", "split-invariance", worst <= 1e-12, worst, 1e-12};
}

inline InvariantResult check_frame_orthonormality(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xe5u);
    const double h = 1e-6, tol = 1e-8;
    double worst = 0.0;
    for (const Domain& d : {Domain::disk(1.7), Domain::rectangle(2.0, 1.4, 0.2)}) {
        std::uniform_real_distribution<double> dist(0.0, d.perimeter());
        int done = 0;
        while (done < 500) {
            const double s = dist(rng);
            const BoundaryFrame f = d.boundary_frame(s);
            const BoundaryFrame fp = d.boundary_frame(s + h);
            const BoundaryFrame fm = d.boundary_frame(s - h);
            // Skip straddles of curvature jumps (piece junctions).
            if (std::abs(fp.curvature - fm.curvature) > 1e-6 * (1 + std::abs(f.curvature)))
                continue;
            // Exact orthonormality carries no differencing error, so it
            // gets the raw values; the Frenet clauses divide by their
            // curvature scale so one threshold covers everything.
            const double kscale = 1 + std::abs(f.curvature);
            const Eigen::Vector2d dn = (fp.n - fm.n) / (2 * h);
            const Eigen::Vector2d dtau = (fp.tau - fm.tau) / (2 * h);
            worst = std::max({worst, std::abs(f.n.norm() - 1.0), std::abs(f.tau.norm() - 1.0),
                              std::abs(f.n.dot(f.tau)),
                              (dn - f.curvature * f.tau).norm() / kscale,
                              (dtau + f.curvature * f.n).norm() / kscale,
                              ((fp.point - fm.point) / (2 * h) - f.tau).norm()});
            ++done;
        }
    }
    return {"geometry", "frame-orthonormality", worst <= tol, worst, tol};
}

inline InvariantResult check_hessian_roundtrip(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xf6u);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (const Domain& d : {Domain::disk(1.3), Domain::rectangle(1.6, 1.1, 0.25)}) {
        std::uniform_real_distribution<double> dist(0.0, d.perimeter());
        for (int it = 0; it < 50; ++it) {
            const BoundaryFrame f = d.boundary_frame(dist(rng));
            DerivTable t(2);
            t.at(0, 0) = g(rng);
            t.at(1, 0) = g(rng);
            t.at(0, 1) = g(rng);
            t.at(2, 0) = g(rng);
            t.at(1, 1) = g(rng);
            t.at(0, 2) = g(rng);
            const SurfaceDerivs d2 = surface_derivatives(t, f);
            const Eigen::Matrix2d H = hessian_from_surface(d2, f);
            const Eigen::Vector2d gr = gradient_from_surface(d2, f);
            worst = std::max({worst, (H - t.hessian()).norm() / (1 + t.hessian().norm()),
                              (gr - t.gradient()).norm() / (1 + t.gradient().norm())});
        }
    }
    return {"geometry", "hessian-roundtrip", worst <= 1e-10, worst, 1e-10};
}

inline InvariantResult check_perimeter_consistency(std::uint64_t) {
    const int n = 65536;
    double worst = 0.0;
    for (const Domain& d : {Domain::disk(1.3), Domain::rectangle(2.0, 1.4, 0.2)}) {
        const double per = d.perimeter();
        double chord = 0.0;
        Eigen::Vector2d prev = d.boundary_frame(0.0).point;
        for (int i = 1; i <= n; ++i) {
            const Eigen::Vector2d p = d.boundary_frame(per * double(i) / n).point;
            chord += (p - prev).norm();
            prev = p;
        }
        worst = std::max(worst, std::abs(chord - per) / per);
    }
    // The disk perimeter also has a closed form to compare against.
    worst = std::max(worst, std::abs(Domain::disk(1.3).perimeter() - 2.0 * M_PI * 1.3) /
                                (2.0 * M_PI * 1.3));
    return {"geometry", "perimeter-consistency", worst <= 1e-8, worst, 1e-8};
}

inline InvariantResult check_green_identity(const VerifyContext& cx) {
    // The manufactured cubic lies in the spline space, so its Greville
    // interpolant is an exact particular solution of the discrete system.
    const Eigen::VectorXd full = tensor_coefs(
        cx.space, [](double x) { return x * x * x; }, [](double) { return 1.0; });
    const Eigen::VectorXd c = restrict_active(cx.sys, full);
    const double res = (cx.sys.K * c - cx.sys.F).cwiseAbs().maxCoeff();
    const double scale =
        cx.sys.k_scale() * c.cwiseAbs().maxCoeff() + cx.sys.F.cwiseAbs().maxCoeff();
    const double rel = res / scale;
    return {"neumann_data", "green-identity", rel <= 1e-7, rel, 1e-7};
}

inline InvariantResult check_compatibility_refinement(const VerifyContext& cx) {
    double worst = 0.0;
    bool ok = true;
    for (const int n : {256, 1024}) {
        const NeumannData d = synthesize(cx.cubic, cx.mat, cx.dom, n);
        const CompatibilityReport rep = compatibility_check(d, cx.dom);
        ok = ok && rep.pass;
        worst = std::max(worst, rep.residuals.cwiseAbs().maxCoeff());
    }
    return {"neumann_data", "compatibility-refinement", ok, worst, 1e-8};
}

inline InvariantResult check_partition_of_unity(const VerifyContext& cx, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x17u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (const int p : {4, 6}) {
        const SplineBasis1D b(-1.0, 1.0, p, 8);
        for (int it = 0; it < 200; ++it) {
            const double x = U(rng);
            const Eigen::MatrixXd d = b.ders(x, 0);
            worst = std::max(worst, std::abs(d.row(0).sum() - 1.0));
        }
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cx.space.dim());
    for (int it = 0; it < 50; ++it) {
        const Eigen::Vector2d xp(U(rng), U(rng));
        const DerivTable t = cx.space.eval_field(ones, xp, 1);
        worst = std::max({worst, std::abs(t.value() - 1.0), t.gradient().norm()});
    }
    return {"discretization", "partition-of-unity", worst <= 1e-12, worst, 1e-12};
}

inline InvariantResult check_affine_reproduction(const VerifyContext& cx, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x28u);
    std::uniform_real_distribution<double> U(-0.99, 0.99);
    const SplineSpace& sp = cx.space;
    Eigen::VectorXd cone = Eigen::VectorXd::Ones(sp.dim());
    Eigen::VectorXd cx1(sp.dim()), cx2(sp.dim());
    for (int i = 0; i < sp.basis_x().dim(); ++i)
        for (int j = 0; j < sp.basis_y().dim(); ++j) {
            cx1[sp.index(i, j)] = sp.basis_x().greville(i);
            cx2[sp.index(i, j)] = sp.basis_y().greville(j);
        }
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Eigen::Vector2d xp(U(rng), U(rng));
        const DerivTable t1 = sp.eval_field(cx1, xp, 2);
        const DerivTable t2 = sp.eval_field(cx2, xp, 2);
        worst = std::max({worst, std::abs(t1.value() - xp.x()), std::abs(t1.at(1, 0) - 1.0),
                          std::abs(t1.at(0, 1)), std::abs(t2.value() - xp.y()),
                          std::abs(t2.at(0, 1) - 1.0), std::abs(t2.at(1, 0)),
                          t1.hessian().norm(), t2.hessian().norm()});
    }
    return {"discretization", "affine-reproduction", worst <= 1e-10, worst, 1e-10};
}

inline InvariantResult check_stiffness_symmetry(const VerifyContext& cx) {
    const Eigen::MatrixXd K(cx.sys.K);
    const double gap = (K - K.transpose()).cwiseAbs().maxCoeff() / cx.sys.k_scale();
    return {"discretization", "stiffness-symmetry", gap <= 1e-12, gap, 1e-12};
}

inline InvariantResult check_affine_annihilation(const VerifyContext& cx) {
    double worst = 0.0;
    const auto probe = [&](const std::function<double(double)>& fx,
                           const std::function<double(double)>& fy) {
        const Eigen::VectorXd c = restrict_active(cx.sys, tensor_coefs(cx.space, fx, fy));
        const double num = (cx.sys.K * c).cwiseAbs().maxCoeff();
        worst = std::max(worst, num / (cx.sys.k_scale() * std::max(1.0, c.cwiseAbs().maxCoeff())));
    };
    probe([](double) { return 1.0; }, [](double) { return 1.0; });
    probe([](double x) { return x; }, [](double) { return 1.0; });
    probe([](double) { return 1.0; }, [](double y) { return y; });
    return {"discretization", "affine-annihilation", worst <= 1e-10, worst, 1e-10};
}

inline InvariantResult check_constrained_coercivity() {
    const Domain dom = Domain::rectangle(1.2, 0.9, 0.15);
    const MaterialField mat = MaterialField::constants(1.0, 0.5, 1.0, 0.8, 0.9, 1.0);
    double prev = 0.0, worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const int n_el : {2, 4}) {
        const SplineSpace sp = build_space(dom, 3, n_el);
        const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
        const int na = sys.active_dim();
        const Eigen::MatrixXd Ct = sys.C.transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Ct);
        const Eigen::MatrixXd Q = qr.householderQ();
        const Eigen::MatrixXd Z = Q.rightCols(na - 3);
        const Eigen::MatrixXd K(sys.K);
        const Eigen::MatrixXd M = 0.5 * (Z.transpose() * K * Z +
                                         (Z.transpose() * K * Z).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        const double emin = es.eigenvalues().minCoeff() / sys.k_scale();
        ok = ok && emin > 0.0;
        if (prev > 0.0) ok = ok && emin > 1e-3 * prev;
        prev = emin;
        worst = std::min(worst, emin);
    }
    return {"discretization", "constrained-coercivity", ok, worst, 0.0};
}

inline InvariantResult check_galerkin_orthogonality(const VerifyContext& cx) {
    const double r = cx.direct.galerkin_residual;
    return {"discretization", "galerkin-orthogonality", r <= 1e-9, r, 1e-9};
}

inline InvariantResult check_quadrature_convergence() {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 4, 4);
    const MaterialField mat = MaterialField::constants(1.2, 0.4, 0.9, 0.5, 0.6, 0.7);
    AssembleOptions lo, hi;
    lo.n_quad = 6;
    hi.n_quad = 8;
    const AssembledSystem a = assemble(dom, sp, mat, nullptr, lo);
    const AssembledSystem b = assemble(dom, sp, mat, nullptr, hi);
    const double gap =
        (Eigen::MatrixXd(a.K) - Eigen::MatrixXd(b.K)).cwiseAbs().maxCoeff() / a.k_scale();
    return {"discretization", "quadrature-convergence", gap <= 1e-10, gap, 1e-10};
}

inline InvariantResult check_normalization(const VerifyContext& cx) {
    const double r = std::max(cx.direct.constraint_residual, cx.iterative.constraint_residual);
    return {"solver", "normalization", r <= 1e-9, r, 1e-9};
}

inline InvariantResult check_affine_uniqueness(const VerifyContext& cx) {
    const double scale = std::max(1.0, cx.direct.coefs.cwiseAbs().maxCoeff());
    const double gap = (cx.direct.coefs - cx.iterative.coefs).cwiseAbs().maxCoeff() / scale;
    return {"solver", "affine-uniqueness", gap <= 1e-10, gap, 1e-10};
}

inline InvariantResult check_energy_identity(const VerifyContext& cx) {
    const Eigen::VectorXd u = restrict_active(cx.sys, cx.direct.coefs);
    const double gap = std::abs(cx.direct.energy - cx.sys.F.dot(u)) /
                       std::max(1e-300, std::abs(cx.direct.energy));
    return {"solver", "energy-identity", gap <= 1e-9, gap, 1e-9};
}

inline InvariantResult check_h_convergence() {
    const Domain dom = Domain::disk(1.0);
    const MaterialField mat = MaterialField::constants(1.0, 0.6, 0.9, 0.8, 1.0, 0.9);
    // Harmonic fields solve the homogeneous interior equation for any
    // constant coefficients, so the synthesized data are consistent.
    Term ta;
    ta.kx1 = 1.1;
    ta.wx2 = 1.1;
    Term tb;
    tb.c = 0.5;
    tb.kx2 = 0.6;
    tb.wx1 = 0.6;
    const AnalyticField u({ta, tb});
    const NeumannData data = synthesize(u, mat, dom);
    double e4 = 0.0, e8 = 0.0;
    for (const int n_el : {4, 8}) {
        const SplineSpace sp = build_space(dom, 4, n_el);
        const SolveResult res = solve_neumann(dom, sp, mat, data);
        (n_el == 4 ? e4 : e8) = relative_h3_error(dom, sp, res.coefs, u);
    }
    const double rate = std::log2(e4 / e8);
    return {"solver", "h-convergence", rate >= 1.7, rate, 1.7};
}

inline InvariantResult check_weight_bounds(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x39u);
    std::uniform_real_distribution<double> U(0.0, 1.0), ang(0.0, 2.0 * M_PI);
    double worst = 0.0;
    for (const double eps : {0.2, 0.25, 0.5}) {
        const CarlemanWeight w(eps);
        const double floor_c = std::pow(2.0, -1.0 / eps);
        for (int it = 0; it < 3000; ++it) {
            const double r = std::sqrt(U(rng));
            const double t = ang(rng);
            const Eigen::Vector2d x(r * std::cos(t), r * std::sin(t));
            const double rho = w.rho(x);
            const double s = x.norm();
            // Violation margins; both stay <= 0 when the bounds hold.
            worst = std::max({worst, floor_c * s - rho * (1 + 1e-12), rho - s * (1 + 1e-12)});
        }
        for (int it = 0; it < 1000; ++it) {
            const double s = 1e-6 + U(rng);
            if (!(w.phi_d1(s) > 0.0)) worst = std::max(worst, 1.0);
        }
    }
    return {"uc_lab", "weight-bounds", worst <= 0.0, worst, 0.0};
}

inline InvariantResult check_identity_battery(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x4au);
    std::uniform_real_distribution<double> alo(0.25, 0.5), wid(0.2, 0.45), amp(0.5, 2.0),
        con(0.5, 2.0);
    std::uniform_int_distribution<int> azim(0, 4);
    const CarlemanWeight w(0.5);
    const double qs[4] = {-2.0, -1.0, 1.0, 2.0};
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
        const double a = alo(rng);
        const double b = std::min(a + wid(rng), 0.95);
        const AnnularBump u(a, b, amp(rng), azim(rng));
        const ZetaEval zeta =
            it % 2 == 0 ? zeta_weight_power(w, qs[(it / 2) % 4]) : zeta_constant(con(rng));
        const IdentityReport rep = identity_check(1 + it % 3, u, zeta);
        worst = std::max(worst, rep.gap / (rep.scale + 1e-300));
    }
    return {"uc_lab", "identity-battery", worst <= 1e-7, worst, 1e-7};
}

inline InvariantResult check_reduction_battery(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5bu);
    std::uniform_real_distribution<double> U(-1.0, 1.0), q9(-0.3, 0.6);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(7, 7);
        for (int i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6 - i; ++j) c(i, j) = U(rng);
        const PolyField u((Poly2(c)));
        MaterialField m;
        m.mu = std::make_shared<PolyField>(Poly2::constant(1.5) + Poly2::monomial(1, 0, 0.3) +
                                           Poly2::monomial(0, 1, 0.2) +
                                           Poly2::monomial(2, 0, 0.15) +
                                           Poly2::monomial(1, 1, 0.1) -
                                           Poly2::monomial(0, 2, 0.1));
        m.lambda = std::make_shared<PolyField>(Poly2::constant(0.8) +
                                               Poly2::monomial(0, 1, 0.2) +
                                               Poly2::monomial(2, 0, 0.1));
        m.t = 0.9;
        m.l0 = 0.7;
        m.l1 = 0.8;
        m.l2 = 1.1;
        m.q9_ratio = q9(rng);
        m.validate();
        const ReductionReport rep = reduction_check(u, m);
        worst = std::max(worst, rep.max_gap / rep.scale);
    }
    return {"uc_lab", "reduction-battery", worst <= 1e-6, worst, 1e-6};
}

inline InvariantResult check_carleman_stability(std::uint64_t seed) {
    const std::vector<SweepMember> members = sweep_battery(0.5, unsigned(seed));
    const std::vector<double> taus = {8.0, 16.0, 32.0};
    PolarQuadOptions qa, qb;
    qa.n_panels = 24;
    qa.n_radial = 8;
    qa.n_theta = 48;
    qb.n_panels = 40;
    qb.n_radial = 10;
    qb.n_theta = 72;
    double worst = 0.0;
    bool ok = true;
    for (int order = 1; order <= 3; ++order) {
        const CarlemanWeight w(order == 3 ? 0.2 : 0.5);
        for (const SweepMember& mem : members) {
            SweepOptions oa, ob;
            oa.quad = qa;
            ob.quad = qb;
            const SweepResult ra = carleman_sweep(order, mem.bump, w, taus, oa);
            const SweepResult rb = carleman_sweep(order, mem.bump, w, taus, ob);
            ok = ok && std::isfinite(ra.constant) && std::isfinite(rb.constant) &&
                 ra.constant > 0.0 && rb.constant > 0.0;
            const double drift =
                std::abs(ra.constant - rb.constant) / std::max(ra.constant, rb.constant);
            worst = std::max(worst, drift);
        }
    }
    return {"uc_lab", "carleman-stability", ok && worst <= 0.05, worst, 0.05};
}

inline InvariantResult check_doubling_three_sphere(const VerifyContext& cx) {
    const std::vector<double> radii = dyadic_radii(0.5, 10);
    PolarQuadOptions quad;
    quad.n_panels = 16;
    quad.n_radial = 6;
    quad.n_theta = 32;
    double worst = 0.0;
    bool ok = true;
    int m = 0;
    for (const TriharmonicMember& mem : triharmonic_battery()) {
        const BallProfile prof = ball_profile(mem.field, radii, 1.0, quad);
        const DoublingReport rep = doubling_report(prof, 0.5);
        const double want_ratio = std::pow(4.0, m + 1);
        const double want_n = std::pow(2.0, 7.0 * (2.0 * m + 2.0));
        for (const auto& row : rep.rows)
            worst = std::max(worst, std::abs(row.ratio - want_ratio) / want_ratio);
        worst = std::max(worst, std::abs(rep.n_frequency - want_n) / want_n);
        ok = ok && std::isfinite(rep.certified_c);
        const ThreeSphereReport ts = three_sphere_report(prof, radii[0], radii[1], 0.5);
        ok = ok && ts.theta == 1.0 / 17.0 && std::isfinite(ts.certified_c);
        ++m;
    }
    // A genuine solver output must profile the same way, with a finite
    // certificate even though no closed-form ratio is available.
    const SplineSolutionField sol(cx.space, cx.direct.coefs);
    const BallProfile prof = ball_profile(sol, radii, 1.0, quad);
    const DoublingReport rep = doubling_report(prof, 0.5);
    ok = ok && std::isfinite(rep.certified_c) && rep.certified_c > 0.0;
    const ThreeSphereReport ts = three_sphere_report(prof, radii[0], radii[1], 0.5);
    ok = ok && ts.theta == 1.0 / 17.0 && std::isfinite(ts.certified_c);
    return {"uc_lab", "doubling-three-sphere", ok && worst <= 1e-7, worst, 1e-7};
}

inline InvariantResult check_caccioppoli_bounded(std::uint64_t seed) {
    const PolyField linear(Poly2::monomial(1, 0));
    const CaccioppoliReport rep = caccioppoli_report(linear, 0.5);
    double worst = std::abs(rep.ratio[0] - 1.0);
    bool ok = true;
    for (const double r : rep.ratio) ok = ok && std::isfinite(r);
    const std::vector<SweepMember> members = sweep_battery(0.5, unsigned(seed));
    for (const double r : {0.4, 0.2}) {
        const CaccioppoliReport b = caccioppoli_report(members[0].bump, r);
        for (const double v : b.ratio) ok = ok && std::isfinite(v);
    }
    return {"uc_lab", "caccioppoli-bounded", ok && worst <= 1e-12, worst, 1e-12};
}

inline InvariantResult check_hash_stability() {
    Json a;
    a["experiment"] = "verify";
    a["seed"] = 7;
    a["domain"] = {{"kind", "disk"}, {"radius", 1.0}};
    Json b;
    b["domain"] = {{"radius", 1.0}, {"kind", "disk"}};
    b["seed"] = 7;
    b["experiment"] = "verify";
    const Json c = Json::parse(R"({ "seed" : 7, "experiment" : "verify",
                                    "domain" : { "kind" : "disk", "radius" : 1.0 } })");
    bool ok = config_hash(a) == config_hash(b) && config_hash(a) == config_hash(c);
    Json d = a;
    d["seed"] = 8;
    ok = ok && config_hash(d) != config_hash(a);
    int failures = 0;
    const double battery[] = {0.1,     1.0 / 3.0, 1e300, 5e-324, 2.2250738585072014e-308,
                              M_PI,    1234.5678e-12, -0.0,  1.0,    6.02214076e23};
    for (const double v : battery) {
        const double back = std::strtod(g17(v).c_str(), nullptr);
        if (std::memcmp(&back, &v, sizeof v) != 0) ++failures;
    }
    ok = ok && failures == 0;
    return {"cli", "hash-stability", ok, double(failures), 0.0};
}

} // namespace detail

// Runs every invariant check and returns one named verdict per property.
// The seed feeds the randomized batteries; two runs with the same seed
// perform identical arithmetic.
inline std::vector<InvariantResult> run_verification(std::uint64_t seed = 7) {
    using namespace detail;
    std::vector<InvariantResult> out;
    out.push_back(check_tensor_symmetry(seed));
    out.push_back(check_constitutive_equivalence(seed));
    out.push_back(check_convexity_positivity(seed));
    out.push_back(check_split_invariance(seed));
    out.push_back(check_frame_orthonormality(seed));
    out.push_back(check_hessian_roundtrip(seed));
    out.push_back(check_perimeter_consistency(seed));
    const VerifyContext cx;
    out.push_back(check_green_identity(cx));
    out.push_back(check_compatibility_refinement(cx));
    out.push_back(check_partition_of_unity(cx, seed));
    out.push_back(check_affine_reproduction(cx, seed));
    out.push_back(check_stiffness_symmetry(cx));
    out.push_back(check_affine_annihilation(cx));
    out.push_back(check_constrained_coercivity());
    out.push_back(check_galerkin_orthogonality(cx));
    out.push_back(check_quadrature_convergence());
    out.push_back(check_normalization(cx));
    out.push_back(check_affine_uniqueness(cx));
    out.push_back(check_energy_identity(cx));
    out.push_back(check_h_convergence());
    out.push_back(check_weight_bounds(seed));
    out.push_back(check_identity_battery(seed));
    out.push_back(check_reduction_battery(seed));
    out.push_back(check_carleman_stability(seed));
    out.push_back(check_doubling_three_sphere(cx));
    out.push_back(check_caccioppoli_bounded(seed));
    out.push_back(check_hash_stability());
    return out;
}

} // namespace sgp
