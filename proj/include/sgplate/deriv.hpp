// deriv.hpp
//
// Dense table of partial derivatives of a scalar field on R^2 up to total
// order 6, plus the abstract field interface used across the library
// (material coefficients, manufactured solutions, spline solutions, test
// bumps). Storage is a flat triangle ordered by total derivative order.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "sgplate/error.hpp"

namespace sgp {

namespace detail {
// Position of the partial d^{i+j} / dx1^i dx2^j inside the flat triangle.
constexpr int tri_index(int i, int j) {
    const int k = i + j;
    return k * (k + 1) / 2 + j;
}
constexpr int tri_size(int order) { return (order + 1) * (order + 2) / 2; }

constexpr double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}
} // namespace detail

template <typename Scalar = double>
class DerivTableT {
  public:
    static constexpr int kMaxOrder = 6;

    explicit DerivTableT(int order = 0) : order_(order) {
        if (order < 0 || order > kMaxOrder)
            throw OrderTooHigh("derivative table order " + std::to_string(order) +
                               " outside supported range [0," + std::to_string(kMaxOrder) + "]");
        d_.fill(Scalar(0));
    }

    int order() const { return order_; }

    Scalar& at(int i, int j) { return d_[check(i, j)]; }
    Scalar at(int i, int j) const { return d_[check(i, j)]; }

    Scalar value() const { return d_[0]; }

    Eigen::Matrix<Scalar, 2, 1> gradient() const {
        return {at(1, 0), at(0, 1)};
    }

    Eigen::Matrix<Scalar, 2, 2> hessian() const {
        Eigen::Matrix<Scalar, 2, 2> h;
        h << at(2, 0), at(1, 1), at(1, 1), at(0, 2);
        return h;
    }

    // Third-gradient components ordered u,111 u,112 u,122 u,222.
    std::array<Scalar, 4> third() const {
        return {at(3, 0), at(2, 1), at(1, 2), at(0, 3)};
    }

    Scalar laplacian() const { return at(2, 0) + at(0, 2); }

    Scalar bilaplacian() const {
        return at(4, 0) + Scalar(2) * at(2, 2) + at(0, 4);
    }

    Scalar trilaplacian() const {
        return at(6, 0) + Scalar(3) * at(4, 2) + Scalar(3) * at(2, 4) + at(0, 6);
    }

    Eigen::Matrix<Scalar, 2, 1> grad_laplacian() const {
        return {at(3, 0) + at(1, 2), at(2, 1) + at(0, 3)};
    }

    Eigen::Matrix<Scalar, 2, 1> grad_bilaplacian() const {
        return {at(5, 0) + Scalar(2) * at(3, 2) + at(1, 4),
                at(4, 1) + Scalar(2) * at(2, 3) + at(0, 5)};
    }

    // |D^k u|^2 with every index tuple counted: the partial with j x2-slots
    // appears binom(k,j) times among the 2^k tuples.
    Scalar tensor_norm_sq(int k) const {
        Scalar s(0);
        for (int j = 0; j <= k; ++j) {
            const Scalar v = at(k - j, j);
            s += Scalar(detail::binomial(k, j)) * v * v;
        }
        return s;
    }

    // |D^k u|^2 counting each distinct partial once (norm-definition
    // convention used by the weighted Sobolev norms).
    Scalar partial_norm_sq(int k) const {
        Scalar s(0);
        for (int j = 0; j <= k; ++j) {
            const Scalar v = at(k - j, j);
            s += v * v;
        }
        return s;
    }

    DerivTableT& axpy(Scalar a, const DerivTableT& other) {
        const int n = detail::tri_size(std::min(order_, other.order_));
        for (int m = 0; m < n; ++m) d_[m] += a * other.d_[m];
        return *this;
    }

    void scale(Scalar a) {
        for (auto& v : d_) v *= a;
    }

  private:
    int check(int i, int j) const {
        if (i < 0 || j < 0 || i + j > order_)
            throw OrderTooHigh("partial (" + std::to_string(i) + "," + std::to_string(j) +
                               ") exceeds table order " + std::to_string(order_));
        return detail::tri_index(i, j);
    }

    int order_;
    std::array<Scalar, detail::tri_size(kMaxOrder)> d_;
};

using DerivTable = DerivTableT<double>;

// A scalar field on R^2 evaluable together with its partial derivatives.
class Field2 {
  public:
    virtual ~Field2() = default;

    // Largest derivative order this field can produce.
    virtual int max_order() const = 0;

    // Value and all partials up to total order k at x.
    virtual DerivTable derivs(const Eigen::Vector2d& x, int k) const = 0;

    // Annulus [a,b] outside of which the field vanishes identically, when the
    // field declares one (compactly supported test bumps do).
    virtual std::optional<std::pair<double, double>> support_annulus() const {
        return std::nullopt;
    }

    double operator()(const Eigen::Vector2d& x) const { return derivs(x, 0).value(); }
};

class ConstantField final : public Field2 {
  public:
    explicit ConstantField(double c) : c_(c) {}
    int max_order() const override { return DerivTable::kMaxOrder; }
    DerivTable derivs(const Eigen::Vector2d&, int k) const override {
        DerivTable t(k);
        t.at(0, 0) = c_;
        return t;
    }

  private:
    double c_;
};

} // namespace sgp
