#pragma once

// Ball profiles of squared fields and the measurements built on them:
// doubling ratios with the frequency-style normalization N, three-sphere
// interpolation bounds, and Caccioppoli derivative ratios. All balls are
// centered at the origin.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/carleman.hpp"
#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/spline.hpp"

namespace sgp {

// Integrals of u^2 over concentric balls, tabulated at a fixed radius
// grid. Entries are nondecreasing in the radius and every radius is
// strictly positive; the zero-radius integral is zero by definition and
// not stored.
struct BallProfile {
    std::vector<double> radii;
    std::vector<double> l2;

    // Index of a tabulated radius, located with a small relative slack so
    // dyadic grids survive repeated halving.
    std::size_t find(double r) const {
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (std::abs(radii[i] - r) <= 1e-9 * std::max(r, radii[i])) return i;
        throw OutOfRange("BallProfile: radius " + std::to_string(r) + " not tabulated");
    }

    double l2_at(double r) const { return l2[find(r)]; }
};

// Quadrature of u^2 over each ball. The grid is sorted and deduplicated;
// each annulus between consecutive radii is integrated once with the
// polar rule and the ball values are prefix sums.
inline BallProfile ball_profile(const Field2& u, std::vector<double> radii, double rmax = 1.0,
                                const PolarQuadOptions& quad = {}) {
    if (radii.empty()) throw OutOfRange("ball_profile: no radii requested");
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    if (!(radii.front() > 0.0) || !(radii.back() <= rmax))
        throw RadiusOutOfDomain("ball_profile: radii must lie in (0, " + std::to_string(rmax) +
                                "]");
    BallProfile prof;
    prof.radii = radii;
    prof.l2.reserve(radii.size());
    double acc = 0.0;
    double prev = 0.0;
    for (const double r : radii) {
        double annulus = 0.0;
        for (const auto& node : polar_rule(prev, r, quad)) {
            const double v = u.derivs(node.x, 0).value();
            annulus += node.w * v * v;
        }
        acc += annulus;
        prof.l2.push_back(acc);
        prev = r;
    }
    return prof;
}

// Dyadic radius grid R1 / 2^j for j = 0..levels, ascending.
inline std::vector<double> dyadic_radii(double R1, int levels) {
    if (!(R1 > 0.0) || levels < 0) throw OutOfRange("dyadic_radii: bad arguments");
    std::vector<double> r(static_cast<std::size_t>(levels) + 1);
    for (int j = 0; j <= levels; ++j) r[static_cast<std::size_t>(levels - j)] = R1 / double(1 << j);
    return r;
}

struct DoublingRow {
    double r = 0.0;
    double ratio = 0.0;
};

// Doubling measurement: N compares the outermost ball with the one seven
// halvings in, and each row checks l2(2r) <= C N^8 l2(r) for a tested
// radius r below R1/2^8. certified_c is the smallest admissible C.
struct DoublingReport {
    double n_frequency = 0.0;
    double certified_c = 0.0;
    std::vector<DoublingRow> rows;
};

inline DoublingReport doubling_report(const BallProfile& prof, double R1) {
    if (!(R1 > 0.0)) throw RadiusOutOfDomain("doubling_report: R1 must be positive");
    const double outer = prof.l2_at(R1);
    const double inner = prof.l2_at(R1 / 128.0);
    if (!(inner > 0.0))
        throw DegenerateDenominator(
            "doubling_report: vanishing mass at R1/2^7, profile cannot be normalized");
    DoublingReport rep;
    rep.n_frequency = outer / inner;
    const double n8 = std::pow(rep.n_frequency, 8);
    const double r_cap = R1 / 256.0;
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        const double r = prof.radii[i];
        if (r > r_cap * (1.0 + 1e-9)) continue;
        std::size_t j;
        try {
            j = prof.find(2.0 * r);
        } catch (const OutOfRange&) {
            continue;
        }
        if (!(prof.l2[i] > 0.0))
            throw DegenerateDenominator("doubling_report: vanishing mass at r = " +
                                        std::to_string(r));
        DoublingRow row;
        row.r = r;
        row.ratio = prof.l2[j] / prof.l2[i];
        rep.certified_c = std::max(rep.certified_c, row.ratio / n8);
        rep.rows.push_back(row);
    }
    if (rep.rows.empty())
        throw OutOfRange("doubling_report: no tabulated (r, 2r) pair below R1/2^8");
    return rep;
}

// Three-sphere measurement at radii r < s within R1/2^8:
//   l2(s) <= (C l2(R1))^(1-theta) l2(r)^theta,
// theta = 1/(1 + 16 log2(s/r)). rhs is the bound at the certified C, so
// it reproduces lhs up to roundoff.
struct ThreeSphereReport {
    double theta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double certified_c = 0.0;
};

inline ThreeSphereReport three_sphere_report(const BallProfile& prof, double r, double s,
                                             double R1) {
    if (!(R1 > 0.0)) throw RadiusOutOfDomain("three_sphere_report: R1 must be positive");
    if (2.0 * r > s * (1.0 + 1e-12))
        throw RadiusOrdering("three_sphere_report: need 2r <= s");
    if (s > (R1 / 256.0) * (1.0 + 1e-12))
        throw RadiusOrdering("three_sphere_report: need s <= R1/2^8");
    ThreeSphereReport rep;
    rep.theta = 1.0 / (1.0 + 16.0 * std::log2(s / r));
    rep.lhs = prof.l2_at(s);
    const double l2r = prof.l2_at(r);
    const double l2R = prof.l2_at(R1);
    if (!(l2r > 0.0) || !(l2R > 0.0))
        throw DegenerateDenominator("three_sphere_report: vanishing ball mass");
    rep.certified_c =
        std::pow(rep.lhs / std::pow(l2r, rep.theta), 1.0 / (1.0 - rep.theta)) / l2R;
    rep.rhs = std::pow(rep.certified_c * l2R, 1.0 - rep.theta) * std::pow(l2r, rep.theta);
    return rep;
}

// Caccioppoli derivative ratios |D^h u|_{L2(B_{r/2})} r^h / |u|_{L2(B_r)}
// for h = 1..6, with the derivative tensors measured in the full-tuple
// norm. Finite for fields with six derivatives and nonzero mass.
struct CaccioppoliReport {
    double r = 0.0;
    double u_l2 = 0.0;
    std::array<double, 6> ratio{};
};

inline CaccioppoliReport caccioppoli_report(const Field2& u, double r, double rmax = 1.0,
                                            const PolarQuadOptions& quad = {}) {
    if (!(r > 0.0) || !(r <= rmax))
        throw RadiusOutOfDomain("caccioppoli_report: radius outside (0, " +
                                std::to_string(rmax) + "]");
    CaccioppoliReport rep;
    rep.r = r;
    double mass = 0.0;
    for (const auto& node : polar_rule(0.0, r, quad)) {
        const double v = u.derivs(node.x, 0).value();
        mass += node.w * v * v;
    }
    if (!(mass > 0.0))
        throw DegenerateDenominator("caccioppoli_report: field has no mass on the ball");
    rep.u_l2 = std::sqrt(mass);
    std::array<double, 6> num{};
    for (const auto& node : polar_rule(0.0, 0.5 * r, quad)) {
        const DerivTable t = u.derivs(node.x, 6);
        for (int h = 1; h <= 6; ++h)
            num[static_cast<std::size_t>(h - 1)] += node.w * t.tensor_norm_sq(h);
    }
    double rh = 1.0;
    for (int h = 1; h <= 6; ++h) {
        rh *= r;
        rep.ratio[static_cast<std::size_t>(h - 1)] =
            std::sqrt(num[static_cast<std::size_t>(h - 1)]) * rh / rep.u_l2;
    }
    return rep;
}

// Cartesian field view of a spline coefficient vector. Valid on identity
// maps only, where parametric partials coincide with cartesian ones; the
// caller keeps the space alive for the lifetime of the view.
class SplineSolutionField final : public Field2 {
  public:
    SplineSolutionField(const SplineSpace& space, Eigen::VectorXd coefs)
        : space_(&space), coefs_(std::move(coefs)) {
        if (space_->mapped())
            throw SingularMap(
                "SplineSolutionField: mapped domains have no cartesian spline view");
        if (coefs_.size() != space_->dim())
            throw OutOfRange("SplineSolutionField: coefficient size mismatch");
    }

    int max_order() const override { return std::min(space_->degree(), DerivTable::kMaxOrder); }

    DerivTable derivs(const Eigen::Vector2d& x, int k) const override {
        return space_->eval_field(coefs_, x, k);
    }

  private:
    const SplineSpace* space_;
    Eigen::VectorXd coefs_;
};

}  // namespace sgp
