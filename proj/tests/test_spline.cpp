#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sgplate/poly2.hpp"
#include "sgplate/spline.hpp"

using namespace sgp;

namespace {

// Polar-form coefficients of the monomial x^m in a degree-p B-spline
// basis: c_i is the elementary symmetric polynomial e_m of the p knots
// t_{i+1}..t_{i+p} divided by binomial(p, m). Exact for m <= p, which
// makes it an independent reproduction oracle.
std::vector<double> monomial_coefs(const SplineBasis1D& basis, int m) {
    const int p = basis.degree();
    const auto& U = basis.knots();
    std::vector<double> out(std::size_t(basis.dim()));
    for (int i = 0; i < basis.dim(); ++i) {
        std::vector<double> e(std::size_t(m) + 1, 0.0);
        e[0] = 1.0;
        for (int j = 1; j <= p; ++j) {
            const double t = U[std::size_t(i + j)];
            for (int q = std::min(m, j); q >= 1; --q) e[std::size_t(q)] += t * e[std::size_t(q - 1)];
        }
        double binom = 1.0;
        for (int q = 1; q <= m; ++q) binom *= double(p - q + 1) / double(q);
        out[std::size_t(i)] = e[std::size_t(m)] / binom;
    }
    return out;
}

Eigen::VectorXd tensor_coefs(const SplineSpace& sp, const std::vector<double>& cx,
                             const std::vector<double>& cy) {
    Eigen::VectorXd c(sp.dim());
    for (int i = 0; i < sp.basis_x().dim(); ++i)
        for (int j = 0; j < sp.basis_y().dim(); ++j)
            c[sp.index(i, j)] = cx[std::size_t(i)] * cy[std::size_t(j)];
    return c;
}

}  // namespace

TEST_CASE("Space dimensions and knot layout") {
    const Domain dom = Domain::rectangle(1.0, 1.0, 0.125);
    CHECK(build_space(dom, 3, 1).dim() == 16);
    CHECK(build_space(dom, 3, 4).dim() == 49);
    CHECK(build_space(dom, 5, 4).dim() == 81);

    const SplineBasis1D b(0.0, 1.0, 3, 4);
    CHECK(b.dim() == 7);
    REQUIRE(b.knots().size() == 11);
    CHECK(b.knots()[0] == 0.0);
    CHECK(b.knots()[3] == 0.0);
    CHECK(b.knots()[4] == doctest::Approx(0.25));
    CHECK(b.knots()[6] == doctest::Approx(0.75));
    CHECK(b.knots()[7] == 1.0);
    CHECK(b.knots()[10] == 1.0);

    const auto bp = b.breakpoints();
    REQUIRE(bp.size() == 5);
    CHECK(bp.front() == 0.0);
    CHECK(bp.back() == 1.0);
    CHECK(bp[2] == doctest::Approx(0.5));
}

TEST_CASE("Degree and element-count validation") {
    const Domain dom = Domain::disk(1.0);
    CHECK_THROWS_AS(build_space(dom, 2, 4), InvalidDegree);
    CHECK_THROWS_AS(build_space(dom, 9, 4), InvalidDegree);
    CHECK_THROWS_AS(build_space(dom, 4, 0), OutOfRange);
    CHECK_THROWS_AS(SplineBasis1D(1.0, 1.0, 3, 2), OutOfRange);
}

TEST_CASE("Knot spans bracket their argument") {
    const SplineBasis1D b(-1.0, 1.0, 4, 5);
    const auto& U = b.knots();
    CHECK(b.find_span(-1.0) == 4);
    CHECK(b.find_span(1.0) == b.dim() - 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = unif(rng);
        const int s = b.find_span(x);
        CHECK(U[std::size_t(s)] <= x);
        CHECK(x <= U[std::size_t(s + 1)]);
        CHECK(U[std::size_t(s)] < U[std::size_t(s + 1)]);
    }
}

TEST_CASE("Partition of unity and vanishing derivative sums") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int p : {3, 5, 8}) {
        const SplineBasis1D b(-2.0, 3.0, p, 6);
        for (int trial = 0; trial < 100; ++trial) {
            const double x = -2.0 + 5.0 * unif(rng);
            const Eigen::MatrixXd d = b.ders(x, std::min(p, 4));
            CHECK(d.row(0).sum() == doctest::Approx(1.0).epsilon(1e-13));
            for (int k = 1; k < d.rows(); ++k)
                CHECK(std::abs(d.row(k).sum()) <= 1e-10 * (1.0 + d.row(k).cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("Greville abscissae give linear precision") {
    const SplineBasis1D b(0.5, 2.5, 5, 7);
    double prev = b.a() - 1.0;
    for (int i = 0; i < b.dim(); ++i) {
        const double g = b.greville(i);
        CHECK(g >= b.a());
        CHECK(g <= b.b());
        CHECK(g > prev);
        prev = g;
    }
    CHECK(b.greville(0) == doctest::Approx(b.a()));
    CHECK(b.greville(b.dim() - 1) == doctest::Approx(b.b()));

    const Domain dom = Domain::rectangle(2.0, 3.0, 0.25);
    const SplineSpace sp = build_space(dom, 4, 5);
    Eigen::VectorXd coefs(sp.dim());
    for (int i = 0; i < sp.basis_x().dim(); ++i)
        for (int j = 0; j < sp.basis_y().dim(); ++j)
            coefs[sp.index(i, j)] = sp.basis_x().greville(i);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Vector2d x(ux(rng), uy(rng));
        const DerivTable t = sp.eval_field(coefs, x, 2);
        CHECK(t.value() == doctest::Approx(x.x()).epsilon(1e-12));
        CHECK(t.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(t.at(0, 1)) <= 1e-11);
        CHECK(std::abs(t.at(2, 0)) <= 1e-10);
    }
}

TEST_CASE("Polar-form coefficients reproduce monomials") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-1.0, 2.0);
    for (int p : {3, 5}) {
        const SplineBasis1D b(-1.0, 2.0, p, 4);
        for (int m = 0; m <= p; ++m) {
            const auto coefs = monomial_coefs(b, m);
            for (int trial = 0; trial < 40; ++trial) {
                const double x = unif(rng);
                const Eigen::MatrixXd d = b.ders(x, 3);
                const int span = b.find_span(x);
                double val = 0.0, d1 = 0.0, d3 = 0.0;
                for (int j = 0; j <= p; ++j) {
                    const double c = coefs[std::size_t(span - p + j)];
                    val += c * d(0, j);
                    d1 += c * d(1, j);
                    d3 += c * d(3, j);
                }
                CHECK(val == doctest::Approx(std::pow(x, m)).epsilon(1e-11));
                const double want1 = m >= 1 ? m * std::pow(x, m - 1) : 0.0;
                const double want3 = m >= 3 ? m * (m - 1) * (m - 2) * std::pow(x, m - 3) : 0.0;
                CHECK(d1 == doctest::Approx(want1).epsilon(1e-9));
                CHECK(std::abs(d3 - want3) <= 1e-8 * (1.0 + std::abs(want3)));
            }
        }
    }
}

TEST_CASE("Tensor fields match the polynomial oracle") {
    const Domain dom = Domain::rectangle(2.0, 2.0, 0.25);
    const SplineSpace sp = build_space(dom, 4, 3);
    const auto cx = monomial_coefs(sp.basis_x(), 2);
    const auto cy = monomial_coefs(sp.basis_y(), 3);
    const Eigen::VectorXd coefs = tensor_coefs(sp, cx, cy);
    const Poly2 q = Poly2::monomial(2, 3);
    const PolyField fld(q);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        const DerivTable got = sp.eval_field(coefs, x, 4);
        const DerivTable want = fld.derivs(x, 4);
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; i + j <= 4; ++j)
                CHECK(std::abs(got.at(i, j) - want.at(i, j)) <=
                      1e-9 * (1.0 + std::abs(want.at(i, j))));
    }

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(sp.dim());
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        const DerivTable t = sp.eval_field(ones, x, 3);
        CHECK(t.value() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(t.gradient().norm() <= 1e-10);
    }
}

TEST_CASE("Interior continuity is C^{p-1}") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int p : {3, 4, 6}) {
        const SplineBasis1D b(0.0, 1.0, p, 5);
        Eigen::VectorXd coefs(b.dim());
        for (int i = 0; i < b.dim(); ++i) coefs[i] = gauss(rng);
        const double eps = 1e-9;
        for (int e = 1; e < b.n_el(); ++e) {
            const double xk = double(e) / b.n_el();
            const Eigen::MatrixXd dl = b.ders(xk - eps, p);
            const Eigen::MatrixXd dr = b.ders(xk + eps, p);
            const int sl = b.find_span(xk - eps), sr = b.find_span(xk + eps);
            for (int k = 0; k <= p - 1; ++k) {
                double vl = 0.0, vr = 0.0, scale = 1.0;
                for (int j = 0; j <= p; ++j) {
                    vl += coefs[sl - p + j] * dl(k, j);
                    vr += coefs[sr - p + j] * dr(k, j);
                    scale = std::max(scale, std::abs(dl(std::min(k + 1, p), j)));
                }
                CHECK(std::abs(vl - vr) <= 4.0 * eps * scale * 10.0);
            }
        }
    }
}

TEST_CASE("Derivative order is capped at the degree") {
    const SplineBasis1D b(0.0, 1.0, 3, 2);
    CHECK_THROWS_AS(b.ders(0.3, 4), OrderTooHigh);
    CHECK_THROWS_AS(b.ders(0.3, -1), OutOfRange);
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 3, 2);
    const Eigen::VectorXd coefs = Eigen::VectorXd::Ones(sp.dim());
    CHECK_THROWS_AS(sp.eval_field(coefs, Eigen::Vector2d(0.1, 0.2), 4), OrderTooHigh);
    Eigen::VectorXd bad = Eigen::VectorXd::Ones(sp.dim() + 1);
    CHECK_THROWS_AS(sp.eval_field(bad, Eigen::Vector2d(0.1, 0.2), 2), OutOfRange);
}

TEST_CASE("Fourth derivatives agree with finite differences") {
    const Domain dom = Domain::rectangle(2.0, 2.0, 0.25);
    const SplineSpace sp = build_space(dom, 6, 3);
    std::mt19937_64 rng(43);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd coefs(sp.dim());
    for (int i = 0; i < coefs.size(); ++i) coefs[i] = gauss(rng);
    const double h = 1e-5;
    // Element centers keep the finite-difference stencil away from knots,
    // where the sixth derivative jumps.
    for (double cx : {-2.0 / 3.0, 0.0, 2.0 / 3.0}) {
        for (double cy : {-2.0 / 3.0, 2.0 / 3.0}) {
            const Eigen::Vector2d x(cx, cy);
            const DerivTable t4 = sp.eval_field(coefs, x, 4);
            auto d2 = [&](const Eigen::Vector2d& y, int i, int j) {
                return sp.eval_field(coefs, y, 2).at(i, j);
            };
            const double fd40 =
                (d2(x + Eigen::Vector2d(h, 0), 2, 0) - 2 * d2(x, 2, 0) +
                 d2(x - Eigen::Vector2d(h, 0), 2, 0)) / (h * h);
            const double fd22 =
                (d2(x + Eigen::Vector2d(0, h), 2, 0) - 2 * d2(x, 2, 0) +
                 d2(x - Eigen::Vector2d(0, h), 2, 0)) / (h * h);
            CHECK(std::abs(t4.at(4, 0) - fd40) <= 1e-5 * (1.0 + std::abs(fd40)));
            CHECK(std::abs(t4.at(2, 2) - fd22) <= 1e-5 * (1.0 + std::abs(fd22)));
        }
    }
}

TEST_CASE("Mapped flag follows the domain kind") {
    CHECK_FALSE(build_space(Domain::disk(1.0), 3, 2).mapped());
    CHECK_FALSE(build_space(Domain::rectangle(1.0, 2.0, 0.2), 3, 2).mapped());
    MapSpec map;
    map.phi1 = std::make_shared<PolyField>(Poly2::monomial(1, 0));
    map.phi2 = std::make_shared<PolyField>(Poly2::monomial(0, 1) +
                                           Poly2::monomial(2, 0) * 0.1);
    CHECK(build_space(Domain::mapped(2.0, 2.0, 0.25, map), 3, 2).mapped());
}
