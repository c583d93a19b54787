// poly2.hpp
//
// Dense bivariate polynomials with exact differentiation and evaluation.
// Used wherever a test field must have machine-exact derivatives: piecewise
// polynomial bumps, manufactured solutions, and the symbolic side of the
// sixth-order reduction checks.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"

namespace sgp {

class Poly2 {
  public:
    // Zero polynomial.
    Poly2() : c_(Eigen::MatrixXd::Zero(1, 1)) {}

    // Coefficient matrix layout: c(i,j) multiplies x1^i x2^j.
    explicit Poly2(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {
        if (c_.rows() == 0 || c_.cols() == 0)
            throw OutOfRange("Poly2: empty coefficient matrix");
    }

    static Poly2 constant(double v) {
        Eigen::MatrixXd c(1, 1);
        c(0, 0) = v;
        return Poly2(c);
    }

    // Monomial a * x1^i x2^j.
    static Poly2 monomial(int i, int j, double a = 1.0) {
        if (i < 0 || j < 0)
            throw OutOfRange("Poly2::monomial: negative exponent");
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(i + 1, j + 1);
        c(i, j) = a;
        return Poly2(c);
    }

    // Real part of (x1 + i x2)^m, harmonic for every m >= 0.
    static Poly2 harmonic_re(int m) {
        if (m < 0) throw OutOfRange("Poly2::harmonic_re: negative power");
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m + 1, m + 1);
        double sign = 1.0;
        for (int j = 0; j <= m; j += 2) {
            c(m - j, j) = sign * detail::binomial(m, j);
            sign = -sign;
        }
        return Poly2(c);
    }

    // Imaginary part of (x1 + i x2)^m.
    static Poly2 harmonic_im(int m) {
        if (m < 0) throw OutOfRange("Poly2::harmonic_im: negative power");
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m + 1, m + 1);
        double sign = 1.0;
        for (int j = 1; j <= m; j += 2) {
            c(m - j, j) = sign * detail::binomial(m, j);
            sign = -sign;
        }
        return Poly2(c);
    }

    int deg1() const { return int(c_.rows()) - 1; }
    int deg2() const { return int(c_.cols()) - 1; }
    const Eigen::MatrixXd& coeffs() const { return c_; }

    Poly2 operator+(const Poly2& o) const {
        const int r = std::max(c_.rows(), o.c_.rows());
        const int s = std::max(c_.cols(), o.c_.cols());
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(r, s);
        c.topLeftCorner(c_.rows(), c_.cols()) = c_;
        c.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
        return Poly2(c);
    }

    Poly2 operator-(const Poly2& o) const { return *this + (o * -1.0); }

    Poly2 operator*(double a) const { return Poly2(c_ * a); }

    Poly2 operator*(const Poly2& o) const {
        Eigen::MatrixXd c =
            Eigen::MatrixXd::Zero(c_.rows() + o.c_.rows() - 1, c_.cols() + o.c_.cols() - 1);
        for (int i = 0; i < c_.rows(); ++i)
            for (int j = 0; j < c_.cols(); ++j) {
                if (c_(i, j) == 0.0) continue;
                c.block(i, j, o.c_.rows(), o.c_.cols()) += c_(i, j) * o.c_;
            }
        return Poly2(c);
    }

    Poly2 dx1() const {
        if (c_.rows() == 1) return Poly2();
        Eigen::MatrixXd c(c_.rows() - 1, c_.cols());
        for (int i = 1; i < c_.rows(); ++i) c.row(i - 1) = double(i) * c_.row(i);
        return Poly2(c);
    }

    Poly2 dx2() const {
        if (c_.cols() == 1) return Poly2();
        Eigen::MatrixXd c(c_.rows(), c_.cols() - 1);
        for (int j = 1; j < c_.cols(); ++j) c.col(j - 1) = double(j) * c_.col(j);
        return Poly2(c);
    }

    Poly2 dx(int i, int j) const {
        Poly2 p = *this;
        for (int k = 0; k < i; ++k) p = p.dx1();
        for (int k = 0; k < j; ++k) p = p.dx2();
        return p;
    }

    Poly2 laplacian() const { return dx1().dx1() + dx2().dx2(); }

    double eval(double x1, double x2) const {
        // Horner in x2 inside Horner in x1.
        double v = 0.0;
        for (int i = int(c_.rows()) - 1; i >= 0; --i) {
            double row = 0.0;
            for (int j = int(c_.cols()) - 1; j >= 0; --j) row = row * x2 + c_(i, j);
            v = v * x1 + row;
        }
        return v;
    }

    double eval(const Eigen::Vector2d& x) const { return eval(x.x(), x.y()); }

    DerivTable derivs(const Eigen::Vector2d& x, int k) const {
        DerivTable t(k);
        for (int total = 0; total <= k; ++total)
            for (int j = 0; j <= total; ++j)
                t.at(total - j, j) = dx(total - j, j).eval(x);
        return t;
    }

  private:
    Eigen::MatrixXd c_;
};

inline Poly2 operator*(double a, const Poly2& p) { return p * a; }

// Field2 adapter for a polynomial. The full derivative triangle is
// differentiated once at construction so per-point evaluation is just a
// Horner pass per entry.
class PolyField final : public Field2 {
  public:
    explicit PolyField(Poly2 p) : p_(std::move(p)) {
        for (int total = 0; total <= DerivTable::kMaxOrder; ++total)
            for (int j = 0; j <= total; ++j)
                table_[detail::tri_index(total - j, j)] = p_.dx(total - j, j);
    }
    int max_order() const override { return DerivTable::kMaxOrder; }
    DerivTable derivs(const Eigen::Vector2d& x, int k) const override {
        DerivTable t(k);
        for (int total = 0; total <= k; ++total)
            for (int j = 0; j <= total; ++j)
                t.at(total - j, j) = table_[detail::tri_index(total - j, j)].eval(x);
        return t;
    }
    const Poly2& poly() const { return p_; }

  private:
    Poly2 p_;
    std::array<Poly2, detail::tri_size(DerivTable::kMaxOrder)> table_;
};

} // namespace sgp
