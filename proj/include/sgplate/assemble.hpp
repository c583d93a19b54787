#pragma once

// Galerkin assembly of the sixth-order bilinear form over the spline
// space, with cut-cell quadrature, optional map pullback, normalization
// constraint rows and the boundary load vector. Degrees of freedom whose
// support does not meet the domain are pruned; everything else is kept so
// the stiffness kernel is exactly the affine functions.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"
#include "sgplate/material.hpp"
#include "sgplate/neumann.hpp"
#include "sgplate/quadrature.hpp"
#include "sgplate/spline.hpp"

namespace sgp {

// Physical cartesian derivatives (order <= 3) of a field given through its
// parametric derivatives and the map derivative arrays at the same point.
// The forward chain rule expresses parametric derivatives in terms of
// physical ones; solving that triangular relation order by order needs
// only the inverse of the map gradient.
inline DerivTable pull_table(const DerivTable& par, const MapJacobians& jac) {
    const int k = par.order();
    if (k > 3) throw OrderTooHigh("pull_table: pullback implemented to order 3");
    DerivTable out(k);
    out.at(0, 0) = par.at(0, 0);
    if (k < 1) return out;

    const Eigen::Matrix2d S = jac.S;
    const Eigen::Matrix2d A = S.inverse();

    // Order 1: du_par(a) = du(k) S(k,a), so the gradient comes back
    // through the transposed inverse.
    const Eigen::Vector2d gp(par.at(1, 0), par.at(0, 1));
    const Eigen::Vector2d g = A.transpose() * gp;
    out.at(1, 0) = g(0);
    out.at(0, 1) = g(1);
    if (k < 2) return out;

    // Order 2: d2u_par(a,b) = d2u(k,l) S(k,a) S(l,b) + du(k) R_k(a,b).
    Eigen::Matrix2d Hp;
    Hp << par.at(2, 0), par.at(1, 1), par.at(1, 1), par.at(0, 2);
    Eigen::Matrix2d rhs2 = Hp;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m) rhs2(a, b) -= g(m) * jac.R(m, a, b);
    const Eigen::Matrix2d H = A.transpose() * rhs2 * A;
    out.at(2, 0) = H(0, 0);
    out.at(1, 1) = 0.5 * (H(0, 1) + H(1, 0));
    out.at(0, 2) = H(1, 1);
    if (k < 3) return out;

    // Order 3: subtract the second- and first-order map terms, then strip
    // one S factor per slot. The bracket is symmetric against a symmetric
    // hessian, so symmetric storage suffices.
    double rhs3[2][2][2];
    auto par3 = [&](int a, int b, int c) {
        const int m = a + b + c;
        return par.at(3 - m, m);
    };
    auto Hsym = [&](int i, int j) { return H(i, j); };
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double v = par3(a, b, c);
                for (int m = 0; m < 2; ++m) v -= g(m) * jac.Z(m, a, b, c);
                for (int m = 0; m < 2; ++m)
                    for (int l = 0; l < 2; ++l)
                        v -= Hsym(m, l) * (jac.R(m, a, b) * S(l, c) + jac.R(m, a, c) * S(l, b) +
                                           S(m, a) * jac.R(l, b, c));
                rhs3[a][b][c] = v;
            }
    double T3[4] = {0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m) {
                double v = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            v += rhs3[a][b][c] * A(a, i) * A(b, j) * A(c, m);
                T3[i + j + m] = v;
            }
    out.at(3, 0) = T3[0];
    out.at(2, 1) = T3[1];
    out.at(1, 2) = T3[2];
    out.at(0, 3) = T3[3];
    return out;
}

struct AssembleOptions {
    int n_quad = 0;     // Gauss points per direction; 0 means degree + 2
    int n_boundary = 0; // Gauss points per boundary panel; 0 means 2*degree + 4
    int threads = 1;
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> K; // active x active stiffness
    Eigen::VectorXd F;             // active load vector
    Eigen::Matrix<double, 3, Eigen::Dynamic> C; // normalization rows
    std::vector<int> active;           // active index -> tensor dof
    std::vector<int> global_to_active; // tensor dof -> active index or -1
    int total_dim = 0;

    int active_dim() const { return int(active.size()); }

    double k_scale() const {
        double m = 0.0;
        for (int o = 0; o < K.outerSize(); ++o)
            for (Eigen::SparseMatrix<double>::InnerIterator it(K, o); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }
};

namespace detail {

// Derivative tables (physical, order 3) of all local basis functions at
// one quadrature point.
inline void local_tables(const SplineSpace& space, const Domain& dom,
                         const CellQuadPoint& qp, bool mapped,
                         std::vector<DerivTable>& tabs) {
    const int p = space.degree();
    const TensorBasisEval ev = space.basis_eval(qp.xp, 3);
    MapJacobians jac;
    if (mapped) jac = dom.map_jacobians(qp.xp);
    int idx = 0;
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j, ++idx) {
            DerivTable t(3);
            for (int dx = 0; dx <= 3; ++dx)
                for (int dy = 0; dy + dx <= 3; ++dy)
                    t.at(dx, dy) = ev.dx(dx, i) * ev.dy(dy, j);
            tabs[std::size_t(idx)] = mapped ? pull_table(t, jac) : t;
        }
}

}  // namespace detail

inline AssembledSystem assemble(const Domain& dom, const SplineSpace& space,
                                const MaterialField& mat, const NeumannData* data,
                                AssembleOptions opts = {}) {
    const int p = space.degree();
    const int n_quad = opts.n_quad == 0 ? p + 2 : opts.n_quad;
    const int n_boundary = opts.n_boundary == 0 ? 2 * p + 4 : opts.n_boundary;
    if (n_quad < p + 2)
        throw OutOfRange("assemble: quadrature order below degree + 2");
    if (n_boundary < p + 2)
        throw OutOfRange("assemble: boundary quadrature order below degree + 2");
    const int threads = std::max(1, opts.threads);
    const bool mapped = space.mapped();
    const bool constant_mat = dynamic_cast<const ConstantField*>(mat.mu.get()) != nullptr &&
                              dynamic_cast<const ConstantField*>(mat.lambda.get()) != nullptr;

    const std::vector<double> bx = space.basis_x().breakpoints();
    const std::vector<double> by = space.basis_y().breakpoints();
    std::vector<CellRule> cells;
    try {
        cells = domain_cell_rules(dom, bx, by, n_quad);
    } catch (const SingularMap& e) {
        throw QuadratureUnderflow(std::string("assemble: degenerate cell jacobian: ") + e.what());
    }

    AssembledSystem sys;
    sys.total_dim = space.dim();

    // Pruning: a tensor dof stays active when any element of its support
    // rectangle meets the domain. Cells absent from the rule list were
    // classified as having empty intersection.
    const int nex = space.basis_x().n_el(), ney = space.basis_y().n_el();
    std::vector<char> cell_nonempty(std::size_t(nex) * std::size_t(ney), 0);
    for (const CellRule& c : cells) cell_nonempty[std::size_t(c.ix) * std::size_t(ney) + std::size_t(c.iy)] = 1;
    sys.global_to_active.assign(std::size_t(space.dim()), -1);
    const int ndx = space.basis_x().dim(), ndy = space.basis_y().dim();
    for (int i = 0; i < ndx; ++i)
        for (int j = 0; j < ndy; ++j) {
            bool live = false;
            for (int ex = std::max(0, i - p); ex <= std::min(nex - 1, i) && !live; ++ex)
                for (int ey = std::max(0, j - p); ey <= std::min(ney - 1, j) && !live; ++ey)
                    live = cell_nonempty[std::size_t(ex) * std::size_t(ney) + std::size_t(ey)] != 0;
            if (live) {
                sys.global_to_active[std::size_t(space.index(i, j))] = int(sys.active.size());
                sys.active.push_back(space.index(i, j));
            }
        }
    const int na = sys.active_dim();

    // Stiffness: per-cell dense blocks scattered into an ordered triplet
    // list. Worker c takes every threads-th cell; the merge keeps cell
    // order, so the assembled matrix does not depend on the thread count.
    const StiffnessTensors frozen =
        constant_mat ? eval_tensors(mat, Eigen::Vector2d::Zero()) : StiffnessTensors{};
    const int nloc = (p + 1) * (p + 1);
    using Trip = Eigen::Triplet<double>;
    std::vector<std::vector<Trip>> chunk(cells.size());
    auto do_cell = [&](std::size_t ci) {
        const CellRule& cell = cells[ci];
        if (cell.pts.empty()) return;
        Eigen::MatrixXd kloc = Eigen::MatrixXd::Zero(nloc, nloc);
        std::vector<DerivTable> tabs(std::size_t(nloc), DerivTable(3));
        std::vector<Eigen::Matrix2d> Hs(static_cast<std::size_t>(nloc));
        std::vector<Sym3> Ts(static_cast<std::size_t>(nloc));
        for (const CellQuadPoint& qp : cell.pts) {
            detail::local_tables(space, dom, qp, mapped, tabs);
            const StiffnessTensors ten = constant_mat ? frozen : eval_tensors(mat, qp.x);
            for (int a = 0; a < nloc; ++a) {
                Hs[std::size_t(a)] = tabs[std::size_t(a)].hessian();
                Ts[std::size_t(a)] = Sym3::from_table(tabs[std::size_t(a)]);
            }
            for (int a = 0; a < nloc; ++a)
                for (int b = a; b < nloc; ++b) {
                    const double v = p_bilinear(ten, Hs[std::size_t(a)], Hs[std::size_t(b)]) +
                                     q_bilinear(ten, Ts[std::size_t(a)], Ts[std::size_t(b)]);
                    kloc(a, b) += qp.w * v;
                    if (b != a) kloc(b, a) += qp.w * v;
                }
        }
        std::vector<Trip>& out = chunk[ci];
        out.reserve(std::size_t(nloc) * std::size_t(nloc));
        for (int a = 0; a < nloc; ++a) {
            const int ga = space.index(cell.ix + a / (p + 1), cell.iy + a % (p + 1));
            const int ra = sys.global_to_active[std::size_t(ga)];
            for (int b = 0; b < nloc; ++b) {
                const int gb = space.index(cell.ix + b / (p + 1), cell.iy + b % (p + 1));
                const int rb = sys.global_to_active[std::size_t(gb)];
                if (ra >= 0 && rb >= 0 && kloc(a, b) != 0.0)
                    out.emplace_back(ra, rb, kloc(a, b));
            }
        }
    };
    if (threads == 1) {
        for (std::size_t ci = 0; ci < cells.size(); ++ci) do_cell(ci);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < threads; ++c)
            pool.emplace_back([&, c] {
                for (std::size_t ci = std::size_t(c); ci < cells.size(); ci += std::size_t(threads))
                    do_cell(ci);
            });
        for (auto& th : pool) th.join();
    }
    std::vector<Trip> trips;
    for (const auto& ch : chunk) trips.insert(trips.end(), ch.begin(), ch.end());
    sys.K.resize(na, na);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.K.makeCompressed();

    // Normalization rows: mean of the function and of both physical
    // gradient components.
    sys.C = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, na);
    for (const CellRule& cell : cells) {
        std::vector<DerivTable> tabs(std::size_t(nloc), DerivTable(3));
        for (const CellQuadPoint& qp : cell.pts) {
            detail::local_tables(space, dom, qp, mapped, tabs);
            for (int a = 0; a < nloc; ++a) {
                const int ga = space.index(cell.ix + a / (p + 1), cell.iy + a % (p + 1));
                const int ra = sys.global_to_active[std::size_t(ga)];
                if (ra < 0) continue;
                sys.C(0, ra) += qp.w * tabs[std::size_t(a)].value();
                sys.C(1, ra) += qp.w * tabs[std::size_t(a)].at(1, 0);
                sys.C(2, ra) += qp.w * tabs[std::size_t(a)].at(0, 1);
            }
        }
    }

    // Load vector from the boundary data triple.
    sys.F = Eigen::VectorXd::Zero(na);
    if (data != nullptr) {
        const auto bquad = boundary_quadrature(dom, bx, by, n_boundary);
        for (const BoundaryQuadPoint& qp : bquad) {
            const double V = data->Vhat(qp.frame.s);
            const double Mn = data->Mn_hat(qp.frame.s);
            const double Mnh = data->Mnh_hat(qp.frame.s);
            const Eigen::Vector2d& nn = qp.frame.n;
            const TensorBasisEval ev = space.basis_eval(qp.frame.param, 2);
            MapJacobians jac;
            if (mapped) jac = dom.map_jacobians(qp.frame.param);
            for (int i = 0; i <= p; ++i)
                for (int j = 0; j <= p; ++j) {
                    const int ga = space.index(ev.i0 + i, ev.j0 + j);
                    const int ra = sys.global_to_active[std::size_t(ga)];
                    if (ra < 0) continue;
                    DerivTable t(2);
                    for (int dx = 0; dx <= 2; ++dx)
                        for (int dy = 0; dy + dx <= 2; ++dy)
                            t.at(dx, dy) = ev.dx(dx, i) * ev.dy(dy, j);
                    if (mapped) t = pull_table(t, jac);
                    const double wn = nn.dot(t.gradient());
                    const double wnn = nn.dot(t.hessian() * nn);
                    sys.F[ra] -= qp.w * (V * t.value() + Mn * wn + Mnh * wnn);
                }
        }
    }
    return sys;
}

// Coordinate-format text export: header "rows cols nnz", then zero-based
// "i j value" triples in row-major order.
inline void write_coo(const Eigen::SparseMatrix<double>& K, std::ostream& os) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> R(K);
    R.makeCompressed();
    os << R.rows() << " " << R.cols() << " " << R.nonZeros() << "\n";
    char buf[96];
    for (int o = 0; o < R.outerSize(); ++o)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(R, o); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", int(it.row()), int(it.col()),
                          it.value());
            os << buf;
        }
}

}  // namespace sgp
