// test_core.cpp
//
// Unit tests for the derivative-table container, Gauss-Legendre quadrature,
// bivariate polynomials, and analytic exp/trig fields.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sgplate/analytic.hpp"
#include "sgplate/deriv.hpp"
#include "sgplate/gauss.hpp"
#include "sgplate/poly2.hpp"

using namespace sgp;

TEST_CASE("DerivTable indexing and composite accessors") {
    // Fill the table with the exact partials of u = x1^3 x2 at x = (2, -1).
    Poly2 u = Poly2::monomial(3, 1);
    const Eigen::Vector2d x(2.0, -1.0);
    DerivTable t = u.derivs(x, 6);

    CHECK(t.value() == doctest::Approx(-8.0).epsilon(1e-15));
    CHECK(t.gradient().x() == doctest::Approx(-12.0));
    CHECK(t.gradient().y() == doctest::Approx(8.0));
    CHECK(t.hessian()(0, 0) == doctest::Approx(-12.0)); // 6 x1 x2
    CHECK(t.hessian()(0, 1) == doctest::Approx(12.0));  // 3 x1^2
    CHECK(t.hessian()(1, 0) == t.hessian()(0, 1));
    CHECK(t.hessian()(1, 1) == doctest::Approx(0.0));
    CHECK(t.laplacian() == doctest::Approx(-12.0));
    CHECK(t.bilaplacian() == doctest::Approx(0.0));
    CHECK(t.trilaplacian() == doctest::Approx(0.0));

    auto third = t.third();
    CHECK(third[0] == doctest::Approx(-6.0)); // 6 x2
    CHECK(third[1] == doctest::Approx(12.0)); // 6 x1
    CHECK(third[2] == doctest::Approx(0.0));
    CHECK(third[3] == doctest::Approx(0.0));

    // grad of laplacian of x1^3 x2 = grad(6 x1 x2) = (6 x2, 6 x1).
    CHECK(t.grad_laplacian().x() == doctest::Approx(-6.0));
    CHECK(t.grad_laplacian().y() == doctest::Approx(12.0));
    CHECK(t.grad_bilaplacian().norm() == doctest::Approx(0.0));
}

TEST_CASE("DerivTable norm conventions differ by index multiplicity") {
    DerivTable t(2);
    t.at(2, 0) = 1.0;
    t.at(1, 1) = 3.0;
    t.at(0, 2) = 2.0;
    // Full tensor contraction counts the mixed partial twice.
    CHECK(t.tensor_norm_sq(2) == doctest::Approx(1.0 + 2.0 * 9.0 + 4.0));
    CHECK(t.partial_norm_sq(2) == doctest::Approx(1.0 + 9.0 + 4.0));
}

TEST_CASE("DerivTable rejects out-of-range orders") {
    CHECK_THROWS_AS(DerivTable(7), OrderTooHigh);
    DerivTable t(2);
    CHECK_THROWS_AS(t.at(2, 1), OrderTooHigh);
    CHECK_THROWS_AS(t.at(-1, 0), OrderTooHigh);
}

TEST_CASE("Gauss-Legendre integrates monomials to machine precision") {
    for (int n : {1, 2, 3, 5, 8, 12, 20}) {
        QuadRule1 rule = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : rule.w) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        // Exact through degree 2n-1.
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rule.w[i] * std::pow(rule.x[i], k);
            const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("Gauss panels integrate a piecewise-smooth function") {
    // int_0^2 |x - 1| dx = 1, exact once the kink is a breakpoint.
    QuadRule1 rule = gauss_panels(4, {0.0, 1.0, 2.0});
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::abs(rule.x[i] - 1.0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    // Zero-length panels are skipped without error.
    QuadRule1 degenerate = gauss_panels(2, {0.0, 0.5, 0.5, 1.0});
    CHECK(degenerate.x.size() == 4);
}

TEST_CASE("Poly2 arithmetic and differentiation") {
    Poly2 p = Poly2::monomial(2, 1, 3.0) + Poly2::monomial(0, 3, -1.0); // 3 x1^2 x2 - x2^3
    CHECK(p.eval(2.0, -1.0) == doctest::Approx(-12.0 + 1.0));
    CHECK(p.dx1().eval(2.0, -1.0) == doctest::Approx(6.0 * 2.0 * -1.0));
    CHECK(p.dx2().eval(2.0, -1.0) == doctest::Approx(3.0 * 4.0 - 3.0 * 1.0));
    CHECK(p.laplacian().eval(2.0, -1.0) == doctest::Approx(6.0 * -1.0 - 6.0 * -1.0));

    Poly2 q = Poly2::monomial(1, 0) * Poly2::monomial(0, 1); // x1 x2
    CHECK(q.eval(3.0, 5.0) == doctest::Approx(15.0));
    CHECK((p * q).eval(1.5, 0.5) == doctest::Approx(p.eval(1.5, 0.5) * q.eval(1.5, 0.5)));
}

TEST_CASE("Harmonic polynomials are annihilated by the laplacian") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int m = 0; m <= 8; ++m) {
        Poly2 re = Poly2::harmonic_re(m);
        Poly2 im = Poly2::harmonic_im(m);
        for (int trial = 0; trial < 5; ++trial) {
            const double x1 = dist(rng), x2 = dist(rng);
            CHECK(re.laplacian().eval(x1, x2) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(im.laplacian().eval(x1, x2) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    // Spot value: Re (x1 + i x2)^3 = x1^3 - 3 x1 x2^2.
    CHECK(Poly2::harmonic_re(3).eval(2.0, 1.0) == doctest::Approx(8.0 - 6.0));
}

TEST_CASE("PolyField matches direct polynomial differentiation") {
    Poly2 p = Poly2::harmonic_re(4) + Poly2::monomial(2, 3, 0.7);
    PolyField f(p);
    const Eigen::Vector2d x(0.3, -1.2);
    DerivTable a = f.derivs(x, 6);
    DerivTable b = p.derivs(x, 6);
    for (int total = 0; total <= 6; ++total)
        for (int j = 0; j <= total; ++j)
            CHECK(a.at(total - j, j) == doctest::Approx(b.at(total - j, j)).epsilon(1e-13));
}

TEST_CASE("AnalyticField reproduces polynomial fields") {
    // 2 x1^2 x2 - 0.5 x2^3 as terms with no exponential part.
    AnalyticField f({Term{2.0, 2, 1, 0, 0, 0, 0, 0}, Term{-0.5, 0, 3, 0, 0, 0, 0, 0}});
    Poly2 p = Poly2::monomial(2, 1, 2.0) + Poly2::monomial(0, 3, -0.5);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Vector2d x(dist(rng), dist(rng));
        DerivTable a = f.derivs(x, 6);
        DerivTable b = p.derivs(x, 6);
        for (int total = 0; total <= 6; ++total)
            for (int j = 0; j <= total; ++j)
                CHECK(a.at(total - j, j) ==
                      doctest::Approx(b.at(total - j, j)).epsilon(1e-12));
    }
}

TEST_CASE("AnalyticField exponential and trigonometric derivatives") {
    // u = e^{2 x1}: every x1-derivative multiplies by 2.
    AnalyticField e2({Term{1.0, 0, 0, 2.0, 0, 0, 0, 0}});
    const Eigen::Vector2d x(0.4, 0.0);
    DerivTable t = e2.derivs(x, 4);
    const double u = std::exp(0.8);
    CHECK(t.value() == doctest::Approx(u).epsilon(1e-14));
    CHECK(t.at(1, 0) == doctest::Approx(2 * u).epsilon(1e-14));
    CHECK(t.at(4, 0) == doctest::Approx(16 * u).epsilon(1e-14));

    // u = cos(3 x2): second derivative is -9 cos(3 x2).
    AnalyticField c3({Term{1.0, 0, 0, 0, 0, 0, 3.0, 0}});
    const Eigen::Vector2d y(0.0, 0.7);
    DerivTable s = c3.derivs(y, 6);
    CHECK(s.value() == doctest::Approx(std::cos(2.1)).epsilon(1e-14));
    CHECK(s.at(0, 1) == doctest::Approx(-3 * std::sin(2.1)).epsilon(1e-13));
    CHECK(s.at(0, 2) == doctest::Approx(-9 * std::cos(2.1)).epsilon(1e-13));
    CHECK(s.at(0, 6) == doctest::Approx(-729 * std::cos(2.1)).epsilon(1e-12));

    // Phase shifts rotate cosine into sine.
    AnalyticField sine({Term{1.0, 0, 0, 0, 0, 1.0, 0, -M_PI / 2}});
    CHECK(sine.derivs(Eigen::Vector2d(0.3, 0.0), 0).value() ==
          doctest::Approx(std::sin(0.3)).epsilon(1e-14));
}

TEST_CASE("AnalyticField x1 e^{x1} cos(x2) is biharmonic") {
    AnalyticField f({Term{1.0, 1, 0, 1.0, 0, 0, 1.0, 0}});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector2d x(dist(rng), dist(rng));
        DerivTable t = f.derivs(x, 6);
        CHECK(t.value() == doctest::Approx(x.x() * std::exp(x.x()) * std::cos(x.y()))
                               .epsilon(1e-14));
        CHECK(t.bilaplacian() == doctest::Approx(0.0).epsilon(1e-11));
        CHECK(t.trilaplacian() == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("AnalyticField derivatives agree with central differences") {
    AnalyticField f({Term{0.8, 2, 1, 0.3, -0.2, 1.5, 0.7, 0.4},
                     Term{-1.3, 0, 2, -0.1, 0.5, 0.0, 2.0, 1.1}});
    const Eigen::Vector2d x(0.6, -0.4);
    const double h = 1e-5;
    DerivTable t = f.derivs(x, 2);
    auto val = [&](double a, double b) { return f.derivs({a, b}, 0).value(); };
    const double d1 = (val(x.x() + h, x.y()) - val(x.x() - h, x.y())) / (2 * h);
    const double d2 = (val(x.x(), x.y() + h) - val(x.x(), x.y() - h)) / (2 * h);
    const double d11 =
        (val(x.x() + h, x.y()) - 2 * val(x.x(), x.y()) + val(x.x() - h, x.y())) / (h * h);
    const double d12 = (val(x.x() + h, x.y() + h) - val(x.x() + h, x.y() - h) -
                        val(x.x() - h, x.y() + h) + val(x.x() - h, x.y() - h)) /
                       (4 * h * h);
    CHECK(t.at(1, 0) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(t.at(0, 1) == doctest::Approx(d2).epsilon(1e-8));
    CHECK(t.at(2, 0) == doctest::Approx(d11).epsilon(1e-5));
    CHECK(t.at(1, 1) == doctest::Approx(d12).epsilon(1e-5));
}
