#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgplate/analytic.hpp"
#include "sgplate/battery.hpp"
#include "sgplate/profile.hpp"

using namespace sgp;

namespace {

constexpr double kR1 = 0.5;

// Closed-form ball integral of (Re z^m)^2: pi r^(2m+2) / (2 (m + 1)).
double harmonic_l2(int m, double r) {
    return M_PI * std::pow(r, 2 * m + 2) / (2.0 * double(m + 1));
}

}  // namespace

TEST_CASE("Ball profiles reproduce the closed forms for the harmonic battery") {
    const auto radii = dyadic_radii(kR1, 10);
    for (const auto& member : triharmonic_battery()) {
        const BallProfile prof = ball_profile(member.field, radii);
        REQUIRE(prof.radii.size() == 11);
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            const double r = prof.radii[i];
            double expected = 0.0;
            if (member.name == "one") expected = M_PI * r * r;
            else if (member.name == "x1") expected = M_PI * std::pow(r, 4) / 4.0;
            else if (member.name == "re_z2") expected = harmonic_l2(2, r);
            else if (member.name == "re_z3") expected = harmonic_l2(3, r);
            else expected = harmonic_l2(4, r);
            CHECK(prof.l2[i] == doctest::Approx(expected).epsilon(1e-12));
            if (i > 0) CHECK(prof.l2[i] >= prof.l2[i - 1]);
        }
    }
}

TEST_CASE("Profile construction validates and orders its input") {
    const PolyField one(Poly2::constant(1.0));
    CHECK_THROWS_AS(ball_profile(one, {}), OutOfRange);
    CHECK_THROWS_AS(ball_profile(one, {0.0, 0.5}), RadiusOutOfDomain);
    CHECK_THROWS_AS(ball_profile(one, {0.5, 1.5}), RadiusOutOfDomain);
    const BallProfile prof = ball_profile(one, {0.5, 0.25, 0.25});
    REQUIRE(prof.radii.size() == 2);
    CHECK(prof.radii[0] == 0.25);
    CHECK(prof.l2_at(0.25 * (1.0 + 1e-10)) == prof.l2[0]);
    CHECK_THROWS_AS(prof.l2_at(0.123), OutOfRange);
}

TEST_CASE("Doubling ratios follow the homogeneity degree") {
    const auto radii = dyadic_radii(kR1, 10);
    // Expected two-radius mass ratio is 4^(m+1) for a degree-m harmonic.
    const double expected_ratio[] = {4.0, 16.0, 64.0, 256.0, 1024.0};
    const auto battery = triharmonic_battery();
    for (std::size_t b = 0; b < battery.size(); ++b) {
        const BallProfile prof = ball_profile(battery[b].field, radii);
        const DoublingReport rep = doubling_report(prof, kR1);
        // Radii R1/2^10, R1/2^9, R1/2^8 admit a tabulated doubling.
        CHECK(rep.rows.size() == 3);
        for (const auto& row : rep.rows)
            CHECK(row.ratio == doctest::Approx(expected_ratio[b]).epsilon(1e-7));
        const double n_exp = std::pow(2.0, 7.0 * (2.0 * double(b) + 2.0));
        // N = (2^7)^(2m+2) for a degree-m homogeneous field.
        CHECK(rep.n_frequency == doctest::Approx(n_exp).epsilon(1e-9));
        CHECK(rep.certified_c ==
              doctest::Approx(expected_ratio[b] / std::pow(n_exp, 8)).epsilon(1e-6));
        CHECK(std::isfinite(rep.certified_c));
        CHECK(rep.certified_c > 0.0);
    }
}

TEST_CASE("Doubling report rejects degenerate centers and missing pairs") {
    const auto radii = dyadic_radii(kR1, 10);
    // Mass concentrated away from the center leaves the normalizing ball
    // empty, the unique-continuation edge case.
    const AnnularBump bump(0.1, 0.4, 1.0, 0);
    const BallProfile prof = ball_profile(bump, radii);
    CHECK_THROWS_AS(doubling_report(prof, kR1), DegenerateDenominator);
    const PolyField one(Poly2::constant(1.0));
    const BallProfile coarse = ball_profile(one, {kR1 / 128.0, kR1});
    CHECK_THROWS_AS(doubling_report(coarse, kR1), OutOfRange);
}

TEST_CASE("Three-sphere exponents come out exactly at dyadic separations") {
    const auto radii = dyadic_radii(kR1, 11);
    const BallProfile prof = ball_profile(PolyField(Poly2::monomial(1, 0)), radii);
    const double r = kR1 / 1024.0;
    const ThreeSphereReport two = three_sphere_report(prof, r, 2.0 * r, kR1);
    CHECK(two.theta == 1.0 / 17.0);
    const ThreeSphereReport four = three_sphere_report(prof, r, 4.0 * r, kR1);
    CHECK(four.theta == 1.0 / 33.0);
    // The certified constant makes the bound tight, and it matches the
    // value computed from the closed-form profile of x1.
    CHECK(two.lhs <= two.rhs * (1.0 + 1e-12));
    CHECK(two.lhs == doctest::Approx(two.rhs).epsilon(1e-12));
    const double l2r = M_PI * std::pow(r, 4) / 4.0;
    const double l2s = M_PI * std::pow(2.0 * r, 4) / 4.0;
    const double l2R = M_PI * std::pow(kR1, 4) / 4.0;
    const double theta = 1.0 / 17.0;
    const double c_exp = std::pow(l2s / std::pow(l2r, theta), 1.0 / (1.0 - theta)) / l2R;
    CHECK(two.certified_c == doctest::Approx(c_exp).epsilon(1e-9));
}

TEST_CASE("Three-sphere report enforces the radius chain") {
    const auto radii = dyadic_radii(kR1, 10);
    const BallProfile prof = ball_profile(PolyField(Poly2::monomial(1, 0)), radii);
    const double r = kR1 / 1024.0;
    CHECK_THROWS_AS(three_sphere_report(prof, r, 1.5 * r, kR1), RadiusOrdering);
    CHECK_THROWS_AS(three_sphere_report(prof, kR1 / 64.0, kR1 / 32.0, kR1), RadiusOrdering);
    const AnnularBump bump(0.1, 0.4, 1.0, 0);
    const BallProfile bprof = ball_profile(bump, radii);
    CHECK_THROWS_AS(three_sphere_report(bprof, r, 2.0 * r, kR1), DegenerateDenominator);
}

TEST_CASE("Caccioppoli ratios match the closed form for x1") {
    const CaccioppoliReport rep = caccioppoli_report(PolyField(Poly2::monomial(1, 0)), 0.5);
    // First-order ratio is exactly one: both sides reduce to r^2 sqrt(pi)/2.
    CHECK(rep.ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int h = 2; h <= 6; ++h) CHECK(rep.ratio[static_cast<std::size_t>(h - 1)] == 0.0);
    CHECK(rep.u_l2 == doctest::Approx(std::sqrt(M_PI / 64.0)).epsilon(1e-12));
}

TEST_CASE("Caccioppoli ratios are scale invariant for homogeneous fields") {
    const PolyField u(Poly2::harmonic_re(3));
    const CaccioppoliReport a = caccioppoli_report(u, 0.4);
    const CaccioppoliReport b = caccioppoli_report(u, 0.2);
    for (int h = 0; h < 6; ++h)
        CHECK(a.ratio[static_cast<std::size_t>(h)] ==
              doctest::Approx(b.ratio[static_cast<std::size_t>(h)]).epsilon(1e-10));
    const PolyField one(Poly2::constant(1.0));
    const CaccioppoliReport c = caccioppoli_report(one, 0.7);
    for (int h = 0; h < 6; ++h) CHECK(c.ratio[static_cast<std::size_t>(h)] == 0.0);
    CHECK_THROWS_AS(caccioppoli_report(u, 0.0), RadiusOutOfDomain);
    CHECK_THROWS_AS(caccioppoli_report(u, 1.5), RadiusOutOfDomain);
    CHECK_THROWS_AS(caccioppoli_report(PolyField(Poly2()), 0.5), DegenerateDenominator);
}

TEST_CASE("Profiles of a non-polynomial field are quadrature stable") {
    Term t;
    t.kx1 = 1.0;
    const AnalyticField u(std::vector<Term>{t});
    const BallProfile coarse = ball_profile(u, {0.25, 0.5});
    PolarQuadOptions fine;
    fine.n_panels = 96;
    fine.n_radial = 16;
    fine.n_theta = 128;
    const BallProfile refined = ball_profile(u, {0.25, 0.5}, 1.0, fine);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(coarse.l2[i] == doctest::Approx(refined.l2[i]).epsilon(1e-9));
}

TEST_CASE("Spline coefficient fields profile through the cartesian view") {
    const Domain dom = Domain::rectangle(1.0, 1.0, 0.0, 1.0);
    const SplineSpace space = build_space(dom, 3, 4);
    const SplineSolutionField one(space, Eigen::VectorXd::Ones(space.dim()));
    // All-ones coefficients give the constant one by partition of unity.
    const BallProfile prof = ball_profile(one, {0.25, 0.5});
    CHECK(prof.l2[0] == doctest::Approx(M_PI / 16.0).epsilon(1e-10));
    CHECK(prof.l2[1] == doctest::Approx(M_PI / 4.0).epsilon(1e-10));
    // Degree three cannot deliver the sixth derivatives Caccioppoli needs.
    CHECK_THROWS_AS(caccioppoli_report(one, 0.5), OrderTooHigh);
    CHECK_THROWS_AS(SplineSolutionField(space, Eigen::VectorXd::Ones(3)), OutOfRange);
    // The disk is an identity-parametrized pruned region, so its spaces
    // profile directly; only genuinely mapped domains are refused.
    const SplineSpace disk_space = build_space(Domain::disk(1.0), 3, 4);
    const SplineSolutionField disk_one(disk_space, Eigen::VectorXd::Ones(disk_space.dim()));
    CHECK(ball_profile(disk_one, {0.5}).l2[0] == doctest::Approx(M_PI / 4.0).epsilon(1e-10));
    MapSpec shear;
    shear.phi1 = std::make_shared<PolyField>(Poly2::monomial(1, 0) + Poly2::monomial(0, 2, 0.2));
    shear.phi2 = std::make_shared<PolyField>(Poly2::monomial(0, 1) + Poly2::monomial(2, 0, 0.3));
    const Domain warped = Domain::mapped(1.0, 1.0, 0.0, shear, 1.0);
    const SplineSpace mapped_space = build_space(warped, 3, 4);
    CHECK_THROWS_AS(SplineSolutionField(mapped_space, Eigen::VectorXd::Ones(mapped_space.dim())),
                    SingularMap);
}
