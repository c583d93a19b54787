#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sgplate/assemble.hpp"
#include "sgplate/poly2.hpp"

using namespace sgp;

namespace {

// Polar-form B-spline coefficients of the monomial x^m, the same exact
// reproduction device the spline suite uses.
std::vector<double> monomial_coefs(const SplineBasis1D& basis, int m) {
    const int p = basis.degree();
    const auto& U = basis.knots();
    std::vector<double> out(std::size_t(basis.dim()));
    for (int i = 0; i < basis.dim(); ++i) {
        std::vector<double> e(std::size_t(m) + 1, 0.0);
        e[0] = 1.0;
        for (int j = 1; j <= p; ++j) {
            const double t = U[std::size_t(i + j)];
            for (int q = std::min(m, j); q >= 1; --q)
                e[std::size_t(q)] += t * e[std::size_t(q - 1)];
        }
        double binom = 1.0;
        for (int q = 1; q <= m; ++q) binom *= double(p - q + 1) / double(q);
        out[std::size_t(i)] = e[std::size_t(m)] / binom;
    }
    return out;
}

// Coefficients of a separable polynomial sum c * x^a y^b over given terms.
Eigen::VectorXd poly_coefs(const SplineSpace& sp,
                           const std::vector<std::array<double, 3>>& terms) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.dim());
    for (const auto& t : terms) {
        const auto cx = monomial_coefs(sp.basis_x(), int(t[1]));
        const auto cy = monomial_coefs(sp.basis_y(), int(t[2]));
        for (int i = 0; i < sp.basis_x().dim(); ++i)
            for (int j = 0; j < sp.basis_y().dim(); ++j)
                c[sp.index(i, j)] += t[0] * cx[std::size_t(i)] * cy[std::size_t(j)];
    }
    return c;
}

Eigen::VectorXd restrict_active(const AssembledSystem& sys, const Eigen::VectorXd& full) {
    Eigen::VectorXd r(sys.active_dim());
    for (int a = 0; a < sys.active_dim(); ++a) r[a] = full[sys.active[std::size_t(a)]];
    return r;
}

MapSpec shear_map() {
    MapSpec map;
    map.phi1 = std::make_shared<PolyField>(Poly2::monomial(1, 0) + Poly2::monomial(0, 2) * 0.2);
    map.phi2 = std::make_shared<PolyField>(Poly2::monomial(0, 1) + Poly2::monomial(2, 0) * 0.3 +
                                           Poly2::monomial(1, 1) * 0.1);
    return map;
}

}  // namespace

TEST_CASE("Pullback through the map reproduces physical derivatives") {
    const MapSpec map = shear_map();
    const Domain dom = Domain::mapped(2.0, 2.0, 0.25, map);
    // Physical field u = x1^3 + 2 x2^2 composed with the map, expanded as
    // a parametric polynomial.
    const Poly2 f1 = Poly2::monomial(1, 0) + Poly2::monomial(0, 2) * 0.2;
    const Poly2 f2 = Poly2::monomial(0, 1) + Poly2::monomial(2, 0) * 0.3 +
                     Poly2::monomial(1, 1) * 0.1;
    const Poly2 upar = f1 * f1 * f1 + (f2 * f2) * 2.0;
    const PolyField upar_field(upar);
    const PolyField uphys(Poly2::monomial(3, 0) + Poly2::monomial(0, 2) * 2.0);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Vector2d xi(unif(rng), unif(rng));
        const DerivTable par = upar_field.derivs(xi, 3);
        const DerivTable got = pull_table(par, dom.map_jacobians(xi));
        const DerivTable want = uphys.derivs(dom.to_physical(xi), 3);
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; i + j <= 3; ++j)
                CHECK(std::abs(got.at(i, j) - want.at(i, j)) <=
                      1e-10 * (1.0 + std::abs(want.at(i, j))));
    }
    CHECK_THROWS_AS(pull_table(DerivTable(4), MapJacobians{}), OrderTooHigh);
}

TEST_CASE("Stiffness is symmetric and annihilates affine functions") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 4, 6);
    const MaterialField mat = MaterialField::constants(1.0, 0.5, 1.0, 0.6, 0.7, 0.8);
    const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
    const double kmax = sys.k_scale();
    REQUIRE(kmax > 0.0);

    const Eigen::MatrixXd Kd = Eigen::MatrixXd(sys.K);
    CHECK((Kd - Kd.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * kmax);

    for (const auto& terms :
         {std::vector<std::array<double, 3>>{{1.0, 0, 0}},
          std::vector<std::array<double, 3>>{{1.0, 1, 0}, {2.0, 0, 1}, {-0.5, 0, 0}}}) {
        const Eigen::VectorXd c = restrict_active(sys, poly_coefs(sp, terms));
        CHECK((sys.K * c).cwiseAbs().maxCoeff() <= 1e-10 * kmax * c.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("Single-element stiffness is positive off the affine kernel") {
    const Domain dom = Domain::rectangle(1.0, 1.0);
    const SplineSpace sp = build_space(dom, 3, 1);
    const MaterialField mat = MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
    REQUIRE(sys.active_dim() == 16);
    const Eigen::MatrixXd Kd = Eigen::MatrixXd(sys.K);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd);
    REQUIRE(es.info() == Eigen::Success);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev[ev.size() - 1];
    REQUIRE(emax > 0.0);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(ev[i]) <= 1e-10 * emax);
    for (int i = 3; i < ev.size(); ++i) CHECK(ev[i] > 1e-8 * emax);
}

TEST_CASE("Raising the quadrature order leaves entries unchanged") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 3, 4);
    const MaterialField mat = MaterialField::constants(1.2, 0.4, 0.9, 0.5, 0.6, 0.7);
    AssembleOptions lo, hi;
    lo.n_quad = 5;
    hi.n_quad = 7;
    const AssembledSystem a = assemble(dom, sp, mat, nullptr, lo);
    const AssembledSystem b = assemble(dom, sp, mat, nullptr, hi);
    REQUIRE(a.active_dim() == b.active_dim());
    const double kmax = a.k_scale();
    const Eigen::MatrixXd da = Eigen::MatrixXd(a.K), db = Eigen::MatrixXd(b.K);
    CHECK((da - db).cwiseAbs().maxCoeff() <= 1e-10 * kmax);
    CHECK((a.C - b.C).cwiseAbs().maxCoeff() <= 1e-10 * a.C.cwiseAbs().maxCoeff());
}

TEST_CASE("Support pruning removes only exactly-exterior dofs") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 3, 8);
    const MaterialField mat = MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
    CHECK(sys.total_dim == 121);
    CHECK(sys.active_dim() < sys.total_dim);
    CHECK(sys.active_dim() > 100);
    // The extreme corner basis function lives on the single corner cell,
    // which misses the disk entirely.
    CHECK(sys.global_to_active[std::size_t(sp.index(0, 0))] == -1);
    CHECK(sys.global_to_active[std::size_t(sp.index(5, 5))] >= 0);
}

TEST_CASE("Thread count does not change the assembled bytes") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 3, 4);
    const MaterialField mat = MaterialField::constants(1.0, 0.3, 1.0, 0.5, 0.5, 0.5);
    AssembleOptions serial, par;
    serial.threads = 1;
    par.threads = 4;
    const AssembledSystem a = assemble(dom, sp, mat, nullptr, serial);
    const AssembledSystem b = assemble(dom, sp, mat, nullptr, par);
    std::ostringstream sa, sb;
    write_coo(a.K, sa);
    write_coo(b.K, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("Load vector entries match the scalar load functional") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 4, 4);
    const MaterialField mat = MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    const PolyField u(Poly2::monomial(3, 0));
    const NeumannData data = synthesize(u, mat, dom);
    const AssembledSystem sys = assemble(dom, sp, mat, &data);
    const double fmax = sys.F.cwiseAbs().maxCoeff();
    REQUIRE(fmax > 0.0);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, sys.active_dim() - 1);
    for (int trial = 0; trial < 6; ++trial) {
        const int ra = pick(rng);
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(sp.dim());
        unit[sys.active[std::size_t(ra)]] = 1.0;
        // Align the functional's panels with the knot lines so its rule
        // sees the same piecewise-smooth integrand the assembly does.
        const double L = load_functional(
            data, dom, [&](const Eigen::Vector2d& x) { return sp.eval_field(unit, x, 2); }, 14,
            sp.basis_x().breakpoints(), sp.basis_y().breakpoints());
        CHECK(std::abs(sys.F[ra] - L) <= 1e-8 * std::max(1.0, fmax));
    }
}

TEST_CASE("Mapped assembly annihilates physical affines") {
    const Domain dom = Domain::mapped(2.0, 2.0, 0.25, shear_map());
    const SplineSpace sp = build_space(dom, 3, 3);
    const MaterialField mat = MaterialField::constants(1.0, 0.5, 1.0, 0.6, 0.6, 0.6);
    const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
    const double kmax = sys.k_scale();
    REQUIRE(kmax > 0.0);
    const Eigen::MatrixXd Kd = Eigen::MatrixXd(sys.K);
    CHECK((Kd - Kd.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * kmax);
    // Physical coordinates are parametric polynomials of degree two, so
    // both lie in the space exactly.
    const Eigen::VectorXd cx1 =
        restrict_active(sys, poly_coefs(sp, {{1.0, 1, 0}, {0.2, 0, 2}}));
    const Eigen::VectorXd cx2 =
        restrict_active(sys, poly_coefs(sp, {{1.0, 0, 1}, {0.3, 2, 0}, {0.1, 1, 1}}));
    CHECK((sys.K * cx1).cwiseAbs().maxCoeff() <= 1e-9 * kmax * cx1.cwiseAbs().maxCoeff());
    CHECK((sys.K * cx2).cwiseAbs().maxCoeff() <= 1e-9 * kmax * cx2.cwiseAbs().maxCoeff());
}

TEST_CASE("Coordinate export round-trips the sparse matrix") {
    const Domain dom = Domain::rectangle(1.0, 1.0);
    const SplineSpace sp = build_space(dom, 3, 2);
    const MaterialField mat = MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    const AssembledSystem sys = assemble(dom, sp, mat, nullptr);
    std::ostringstream os;
    write_coo(sys.K, os);
    std::istringstream is(os.str());
    int rows = 0, cols = 0;
    long nnz = 0;
    is >> rows >> cols >> nnz;
    CHECK(rows == sys.active_dim());
    CHECK(cols == sys.active_dim());
    CHECK(nnz == long(sys.K.nonZeros()));
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(rows, cols);
    for (long k = 0; k < nnz; ++k) {
        int i = 0, j = 0;
        double v = 0.0;
        is >> i >> j >> v;
        back(i, j) = v;
    }
    CHECK((back - Eigen::MatrixXd(sys.K)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Assembly validates quadrature order") {
    const Domain dom = Domain::disk(1.0);
    const SplineSpace sp = build_space(dom, 4, 2);
    const MaterialField mat = MaterialField::constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    AssembleOptions bad;
    bad.n_quad = 4;
    CHECK_THROWS_AS(assemble(dom, sp, mat, nullptr, bad), OutOfRange);
}
