#pragma once

// Tensor-product B-spline spaces with open uniform knots. The basis is
// C^{p-1} across interior knots, so any degree p >= 3 gives a space of
// C^2 functions whose third derivatives are piecewise continuous, which
// is what the sixth-order bilinear form needs.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"

namespace sgp {

// Univariate B-spline basis of degree p on [a, b] with n_el uniform
// elements and open (clamped) end knots. Dimension is n_el + p.
class SplineBasis1D {
  public:
    SplineBasis1D() = default;

    SplineBasis1D(double a, double b, int degree, int n_el)
        : a_(a), b_(b), p_(degree), n_el_(n_el) {
        if (degree < 3 || degree > 8)
            throw InvalidDegree("SplineBasis1D: degree must be in [3, 8]");
        if (n_el < 1) throw OutOfRange("SplineBasis1D: need at least one element");
        if (!(b > a)) throw OutOfRange("SplineBasis1D: empty interval");
        knots_.reserve(std::size_t(n_el + 2 * degree + 1));
        for (int i = 0; i <= degree; ++i) knots_.push_back(a);
        for (int e = 1; e < n_el; ++e)
            knots_.push_back(a + (b - a) * double(e) / double(n_el));
        for (int i = 0; i <= degree; ++i) knots_.push_back(b);
    }

    double a() const { return a_; }
    double b() const { return b_; }
    int degree() const { return p_; }
    int n_el() const { return n_el_; }
    int dim() const { return n_el_ + p_; }
    const std::vector<double>& knots() const { return knots_; }

    // Element boundaries, n_el + 1 values from a to b.
    std::vector<double> breakpoints() const {
        std::vector<double> bs(std::size_t(n_el_) + 1);
        for (int e = 0; e <= n_el_; ++e)
            bs[std::size_t(e)] = a_ + (b_ - a_) * double(e) / double(n_el_);
        return bs;
    }

    // Greville abscissa of basis function i, the mean of its p interior
    // knots. Coefficients equal to these reproduce x exactly.
    double greville(int i) const {
        if (i < 0 || i >= dim()) throw OutOfRange("SplineBasis1D: basis index");
        double s = 0.0;
        for (int j = 1; j <= p_; ++j) s += knots_[std::size_t(i + j)];
        return s / double(p_);
    }

    // Knot span containing x: the unique i with U[i] <= x < U[i+1],
    // clamped so x = b lands in the last nonempty span.
    int find_span(double x) const {
        const int n = dim() - 1;
        if (x >= knots_[std::size_t(n + 1)]) return n;
        if (x <= knots_[std::size_t(p_)]) return p_;
        int lo = p_, hi = n + 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (x < knots_[std::size_t(mid)] ? hi : lo) = mid;
        }
        return lo;
    }

    // Values and derivatives up to order k of the p+1 basis functions that
    // are nonzero at x. Row d of the result holds the d-th derivatives of
    // functions (span - p) .. span. Cox-de Boor recurrence with the
    // standard inverted-triangle derivative pass.
    Eigen::MatrixXd ders(double x, int k) const {
        if (k < 0) throw OutOfRange("SplineBasis1D: negative derivative order");
        if (k > p_) throw OrderTooHigh("SplineBasis1D: derivative order exceeds degree");
        const int span = find_span(x);
        const int p = p_;
        Eigen::MatrixXd ndu(p + 1, p + 1);
        std::vector<double> left(std::size_t(p) + 1), right(std::size_t(p) + 1);
        ndu(0, 0) = 1.0;
        for (int j = 1; j <= p; ++j) {
            left[std::size_t(j)] = x - knots_[std::size_t(span + 1 - j)];
            right[std::size_t(j)] = knots_[std::size_t(span + j)] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                ndu(j, r) = right[std::size_t(r + 1)] + left[std::size_t(j - r)];
                const double temp = ndu(r, j - 1) / ndu(j, r);
                ndu(r, j) = saved + right[std::size_t(r + 1)] * temp;
                saved = left[std::size_t(j - r)] * temp;
            }
            ndu(j, j) = saved;
        }
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k + 1, p + 1);
        for (int j = 0; j <= p; ++j) out(0, j) = ndu(j, p);
        Eigen::MatrixXd a(2, p + 1);
        for (int r = 0; r <= p; ++r) {
            int s1 = 0, s2 = 1;
            a(0, 0) = 1.0;
            for (int kk = 1; kk <= k; ++kk) {
                double d = 0.0;
                const int rk = r - kk, pk = p - kk;
                if (r >= kk) {
                    a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                    d = a(s2, 0) * ndu(rk, pk);
                }
                const int j1 = (rk >= -1) ? 1 : -rk;
                const int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                    d += a(s2, j) * ndu(rk + j, pk);
                }
                if (r <= pk) {
                    a(s2, kk) = -a(s1, kk - 1) / ndu(pk + 1, r);
                    d += a(s2, kk) * ndu(r, pk);
                }
                out(kk, r) = d;
                std::swap(s1, s2);
            }
        }
        double factor = p;
        for (int kk = 1; kk <= k; ++kk) {
            out.row(kk) *= factor;
            factor *= double(p - kk);
        }
        return out;
    }

  private:
    double a_ = 0.0, b_ = 1.0;
    int p_ = 3, n_el_ = 1;
    std::vector<double> knots_;
};

// Nonzero tensor-product basis data at one point: dx(d, i) and dy(d, j)
// are d-th derivatives of the (p+1) active univariate functions, and the
// active global dof indices are index(i0 + i, j0 + j).
struct TensorBasisEval {
    int i0 = 0, j0 = 0;
    Eigen::MatrixXd dx, dy;
};

// C^{p-1} tensor-product spline space on the parametric bounding box of a
// domain. Mapped domains keep the same parametric space; the physical
// pullback happens where the bilinear form is evaluated.
class SplineSpace {
  public:
    SplineSpace(const Domain& dom, int p, int n_el) {
        const auto [lo, hi] = dom.param_bbox();
        bx_ = SplineBasis1D(lo.x(), hi.x(), p, n_el);
        by_ = SplineBasis1D(lo.y(), hi.y(), p, n_el);
        mapped_ = dom.kind() == DomainKind::Mapped;
    }

    const SplineBasis1D& basis_x() const { return bx_; }
    const SplineBasis1D& basis_y() const { return by_; }
    int degree() const { return bx_.degree(); }
    int n_el() const { return bx_.n_el(); }
    int dim() const { return bx_.dim() * by_.dim(); }
    bool mapped() const { return mapped_; }

    // Global dof index of univariate pair (i, j).
    int index(int i, int j) const { return i * by_.dim() + j; }

    // Highest derivative order servable through DerivTable.
    int max_order() const { return std::min(degree(), DerivTable::kMaxOrder); }

    TensorBasisEval basis_eval(const Eigen::Vector2d& xp, int k) const {
        TensorBasisEval ev;
        ev.i0 = bx_.find_span(xp.x()) - bx_.degree();
        ev.j0 = by_.find_span(xp.y()) - by_.degree();
        ev.dx = bx_.ders(xp.x(), k);
        ev.dy = by_.ders(xp.y(), k);
        return ev;
    }

    // Value and all parametric partials to order k of the coefficient
    // field at xp. Identity-mapped domains read these as cartesian
    // partials directly.
    DerivTable eval_field(const Eigen::VectorXd& coefs, const Eigen::Vector2d& xp,
                          int k) const {
        if (k > degree()) throw OrderTooHigh("SplineSpace: derivative order exceeds degree");
        if (coefs.size() != dim()) throw OutOfRange("SplineSpace: coefficient size mismatch");
        const TensorBasisEval ev = basis_eval(xp, k);
        DerivTable tab(k);
        const int p = degree();
        for (int i = 0; i <= p; ++i) {
            for (int j = 0; j <= p; ++j) {
                const double c = coefs[index(ev.i0 + i, ev.j0 + j)];
                if (c == 0.0) continue;
                for (int dx = 0; dx <= k; ++dx)
                    for (int dy = 0; dy + dx <= k; ++dy)
                        tab.at(dx, dy) += c * ev.dx(dx, i) * ev.dy(dy, j);
            }
        }
        return tab;
    }

  private:
    SplineBasis1D bx_, by_;
    bool mapped_ = false;
};

inline SplineSpace build_space(const Domain& dom, int p, int n_el) {
    return SplineSpace(dom, p, n_el);
}

}  // namespace sgp
