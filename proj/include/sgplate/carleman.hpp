#pragma once

// Singular Carleman weight, polar quadrature over annuli, tau sweeps of
// the three weighted estimates (Laplacian, bilaplacian, trilaplacian) and
// the integration-by-parts identity checks the estimates rest on.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/gauss.hpp"

namespace sgp {

// rho(x) = phi_eps(|x|) with phi_eps(s) = s (1 + s^eps)^{-1/eps}. The
// weight is comparable to |x| from below by 2^{-1/eps} on the unit ball
// and its radial derivatives have closed forms.
class CarlemanWeight {
  public:
    explicit CarlemanWeight(double epsilon) : eps_(epsilon) {
        if (!(epsilon > 0.0 && epsilon <= 0.5))
            throw OutOfRange("CarlemanWeight: epsilon must lie in (0, 1/2]");
    }

    double epsilon() const { return eps_; }

    double phi(double s) const {
        return s / std::pow(1.0 + std::pow(s, eps_), 1.0 / eps_);
    }
    double phi_d1(double s) const {
        return std::pow(1.0 + std::pow(s, eps_), -1.0 - 1.0 / eps_);
    }
    double phi_d2(double s) const {
        return -(eps_ + 1.0) * std::pow(s, eps_ - 1.0) *
               std::pow(1.0 + std::pow(s, eps_), -2.0 - 1.0 / eps_);
    }

    double rho(const Eigen::Vector2d& x) const { return phi(x.norm()); }

    // Value, gradient and hessian of rho^q. The origin is a cusp: only
    // powers with two bounded derivatives may be evaluated there.
    DerivTable power(const Eigen::Vector2d& x, double q) const {
        const double s = x.norm();
        DerivTable t(2);
        if (s == 0.0) {
            if (q < 0.0) throw OriginSingular("CarlemanWeight: negative power at the origin");
            if (q < 2.0) throw OriginSingular("CarlemanWeight: power has singular derivatives at the origin");
            return t;
        }
        const double r = phi(s), r1 = phi_d1(s), r2 = phi_d2(s);
        const double pq = std::pow(r, q);
        const double u1 = q * pq / r * r1;              // d/ds of phi^q
        const double u2 = q * (q - 1.0) * pq / (r * r) * r1 * r1 + q * pq / r * r2;
        const Eigen::Vector2d e = x / s;
        t.at(0, 0) = pq;
        t.at(1, 0) = u1 * e.x();
        t.at(0, 1) = u1 * e.y();
        const double radial = u2, tangent = u1 / s;
        t.at(2, 0) = radial * e.x() * e.x() + tangent * e.y() * e.y();
        t.at(0, 2) = radial * e.y() * e.y() + tangent * e.x() * e.x();
        t.at(1, 1) = (radial - tangent) * e.x() * e.y();
        return t;
    }

  private:
    double eps_;
};

struct PolarNode {
    Eigen::Vector2d x;
    double w = 0.0; // includes the polar measure r
};

struct PolarQuadOptions {
    int n_panels = 48; // radial panels between the support radii
    int n_radial = 10; // Gauss points per panel
    int n_theta = 64;  // uniform angular nodes (trapezoid, periodic)
};

// Tensor polar rule over the annulus a < |x| < b.
inline std::vector<PolarNode> polar_rule(double a, double b, const PolarQuadOptions& opts = {}) {
    if (!(0.0 <= a && a < b)) throw OutOfRange("polar_rule: need 0 <= a < b");
    if (opts.n_panels < 1 || opts.n_theta < 4)
        throw OutOfRange("polar_rule: too few quadrature nodes");
    const QuadRule1 g = gauss_legendre(opts.n_radial);
    const double dth = 2.0 * M_PI / double(opts.n_theta);
    std::vector<PolarNode> nodes;
    nodes.reserve(std::size_t(opts.n_panels) * g.x.size() * std::size_t(opts.n_theta));
    for (int pnl = 0; pnl < opts.n_panels; ++pnl) {
        const double r0 = a + (b - a) * double(pnl) / double(opts.n_panels);
        const double r1 = a + (b - a) * double(pnl + 1) / double(opts.n_panels);
        const double mid = 0.5 * (r0 + r1), half = 0.5 * (r1 - r0);
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double r = mid + half * g.x[j];
            const double wr = half * g.w[j] * r;
            for (int tth = 0; tth < opts.n_theta; ++tth) {
                const double th = dth * double(tth);
                nodes.push_back({Eigen::Vector2d(r * std::cos(th), r * std::sin(th)), wr * dth});
            }
        }
    }
    return nodes;
}

namespace detail {

// Declared support annulus of a compactly supported test field, with a
// numerical spot check that the field really vanishes outside it.
inline std::pair<double, double> sweep_support(const Field2& u, double R1) {
    const auto ann = u.support_annulus();
    if (!ann) throw SupportViolation("carleman_sweep: field declares no compact support");
    const auto [a, b] = *ann;
    if (!(a > 0.0)) throw SupportViolation("carleman_sweep: support must avoid the origin");
    if (!(b <= R1)) throw SupportViolation("carleman_sweep: support exceeds the admissible ball");
    double inside = 0.0, outside = 0.0;
    for (int j = 0; j < 32; ++j) {
        const double th = 2.0 * M_PI * double(j) / 32.0;
        const Eigen::Vector2d e(std::cos(th), std::sin(th));
        inside = std::max(inside, std::abs(u.derivs(0.5 * (a + b) * e, 0).at(0, 0)));
        for (const double r : {0.5 * a, std::min(1.0, 1.02 * b), std::min(1.0, R1)})
            outside = std::max(outside, std::abs(u.derivs(r * e, 0).at(0, 0)));
    }
    if (outside > 1e-12 * std::max(inside, 1e-300))
        throw SupportViolation("carleman_sweep: field does not vanish outside its annulus");
    return {a, b};
}

}  // namespace detail

struct SweepOptions {
    double R1 = 0.5;       // admissibility radius for the support
    bool doubling = false; // include the interior-weight term
    double hole_r = 0.0;   // doubling hole parameter r; support must avoid B_{r/4}
    PolarQuadOptions quad;
};

struct SweepPoint {
    double tau = 0.0;
    double lhs = 0.0;   // the majorant integral (the side multiplied by C)
    double rhs = 0.0;   // the weighted derivative sum
    double ratio = 0.0; // rhs / lhs, the empirical constant at this tau
};

struct SweepResult {
    int order = 0;
    std::vector<SweepPoint> points;
    double constant = 0.0; // sup over tau of the ratio
};

// Sweeps the weighted estimate of the given operator power over a tau
// list. Every per-tau integral carries the common factor rho_ref^{-2 tau}
// removed, which cancels in the ratio and keeps the powers representable.
inline SweepResult carleman_sweep(int order, const Field2& u, const CarlemanWeight& w,
                                  const std::vector<double>& taus,
                                  const SweepOptions& opts = {}) {
    if (order < 1 || order > 3) throw OutOfRange("carleman_sweep: order must be 1, 2 or 3");
    if (order == 3 && w.epsilon() > 0.2 + 1e-15)
        throw OutOfRange("carleman_sweep: the trilaplacian estimate needs epsilon <= 1/5");
    if (taus.empty()) throw OutOfRange("carleman_sweep: empty tau list");
    for (const double t : taus)
        if (!(t > 1.0)) throw OutOfRange("carleman_sweep: tau must exceed 1");
    const auto [a, b] = detail::sweep_support(u, opts.R1);
    if (opts.doubling) {
        if (!(opts.hole_r > 0.0 && opts.hole_r < opts.R1))
            throw OutOfRange("carleman_sweep: doubling hole outside (0, R1)");
        if (a < 0.25 * opts.hole_r)
            throw SupportViolation("carleman_sweep: support must avoid the doubling hole");
    }
    const double eps = w.epsilon();

    // Exponent list: entry 0 is the majorant side, the rest are the
    // weighted derivative terms with their tau powers.
    struct TermSpec {
        double alpha;    // rho exponent before the -2tau shift
        double tau_pow;  // power of tau in the coefficient
        double coef;     // tau-independent coefficient
        int kind;        // 0..4: |D^k u|^2; 5: operator power; 6: |D lap^2 u|^2
    };
    std::vector<TermSpec> terms;
    switch (order) {
        case 1:
            terms.push_back({4.0, 0.0, 1.0, 5});
            for (int k = 0; k <= 1; ++k)
                terms.push_back({2.0 * k + eps, 3.0 - 2.0 * k, 1.0, k});
            if (opts.doubling) terms.push_back({-1.0, 2.0, opts.hole_r, 0});
            break;
        case 2:
            terms.push_back({8.0, 0.0, 1.0, 5});
            for (int k = 0; k <= 3; ++k)
                terms.push_back({2.0 * k + 2.0 * eps, 6.0 - 2.0 * k, 1.0, k});
            break;
        default:
            terms.push_back({4.0, 0.0, 1.0, 5});
            terms.push_back({2.0 + eps, 1.0, 1.0, 6});
            for (int k = 0; k <= 4; ++k)
                terms.push_back({2.0 * k + 5.0 * eps - 8.0, 9.0 - 2.0 * k, 1.0, k});
            if (opts.doubling)
                terms.push_back({-11.0, 6.0, std::pow(opts.hole_r, 3), 0});
            break;
    }

    const int max_k = order == 1 ? 2 : (order == 2 ? 4 : 6);
    const std::vector<PolarNode> nodes = polar_rule(a, b, opts.quad);
    const double rho_ref = w.phi(b);

    // Per-node data, tau independent: quadrature weight, log of the weight
    // contrast, and each term's rho^alpha f value.
    const std::size_t nt = terms.size();
    std::vector<double> logc(nodes.size());
    std::vector<double> vals(nodes.size() * nt);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const PolarNode& nd = nodes[i];
        const double rho = w.rho(nd.x);
        logc[i] = std::log(rho / rho_ref);
        const DerivTable t = u.derivs(nd.x, max_k);
        double f[7] = {0, 0, 0, 0, 0, 0, 0};
        for (int k = 0; k <= std::min(max_k, 4); ++k) f[k] = t.tensor_norm_sq(k);
        const double op =
            order == 1 ? t.laplacian() : (order == 2 ? t.bilaplacian() : t.trilaplacian());
        f[5] = op * op;
        if (order == 3) f[6] = t.grad_bilaplacian().squaredNorm();
        for (std::size_t j = 0; j < nt; ++j)
            vals[i * nt + j] = std::pow(rho, terms[j].alpha) * f[std::size_t(terms[j].kind)];
    }

    SweepResult res;
    res.order = order;
    res.points.reserve(taus.size());
    for (const double tau : taus) {
        SweepPoint pt;
        pt.tau = tau;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double contrast = std::exp(-2.0 * tau * logc[i]);
            const double base = nodes[i].w * contrast;
            pt.lhs += base * vals[i * nt];
            double sum = 0.0;
            for (std::size_t j = 1; j < nt; ++j)
                sum += terms[j].coef * std::pow(tau, terms[j].tau_pow) * vals[i * nt + j];
            pt.rhs += base * sum;
        }
        if (!(pt.lhs > 0.0))
            throw QuadratureUnderflow("carleman_sweep: majorant integral vanished");
        pt.ratio = pt.rhs / pt.lhs;
        res.points.push_back(pt);
        res.constant = std::max(res.constant, pt.ratio);
    }
    return res;
}

// Weight-like coefficient for the identity checks: order-2 table of a
// power of the Carleman weight.
using ZetaEval = std::function<DerivTable(const Eigen::Vector2d&)>;

inline ZetaEval zeta_weight_power(const CarlemanWeight& w, double q) {
    return [w, q](const Eigen::Vector2d& x) { return w.power(x, q); };
}

inline ZetaEval zeta_constant(double c) {
    return [c](const Eigen::Vector2d&) {
        DerivTable t(2);
        t.at(0, 0) = c;
        return t;
    };
}

struct IdentityReport {
    int which = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double scale = 0.0;
};

// Integration-by-parts identities behind the estimates: both sides by the
// same polar rule, the gap relative to the larger side.
inline IdentityReport identity_check(int which, const Field2& u, const ZetaEval& zeta,
                                     const PolarQuadOptions& opts = {}) {
    if (which < 1 || which > 3) throw OutOfRange("identity_check: identity index must be 1..3");
    const auto ann = u.support_annulus();
    if (!ann) throw SupportViolation("identity_check: field declares no compact support");
    const auto [a, b] = *ann;
    IdentityReport rep;
    rep.which = which;
    for (const PolarNode& nd : polar_rule(a, b, opts)) {
        const DerivTable t = u.derivs(nd.x, which + 1);
        const DerivTable z = zeta(nd.x);
        const double zv = z.at(0, 0);
        const Eigen::Vector2d zg = z.gradient();
        const Eigen::Matrix2d zh = z.hessian();
        const double zlap = zh.trace();
        const Eigen::Vector2d ug = t.gradient();
        double l = 0.0, r = 0.0;
        if (which == 1) {
            l = zv * t.at(0, 0) * t.laplacian();
            r = -(zv * ug.squaredNorm() + ug.dot(zg) * t.at(0, 0));
        } else if (which == 2) {
            const double lap = t.laplacian();
            l = zv * t.tensor_norm_sq(2);
            r = -ug.dot(zh * ug) + zlap * ug.squaredNorm() + zv * lap * lap;
        } else {
            const Eigen::Matrix2d uh = t.hessian();
            const double lap = t.laplacian();
            l = zv * t.tensor_norm_sq(3);
            r = -zv * lap * t.bilaplacian() - (uh * zh * uh).trace() +
                zlap * t.tensor_norm_sq(2) + 0.5 * zlap * lap * lap;
        }
        rep.lhs += nd.w * l;
        rep.rhs += nd.w * r;
    }
    rep.gap = std::abs(rep.lhs - rep.rhs);
    rep.scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    return rep;
}

}  // namespace sgp
