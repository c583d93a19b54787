// ad.hpp
//
// Small forward-mode AD scalar carrying value, gradient and hessian in two
// variables. The constitutive coefficient formulas are rational in the Lame
// moduli, so running them on this type yields exact first and second
// coefficient derivatives without hand-derived chain rules.

#pragma once

#include <Eigen/Dense>

#include "sgplate/deriv.hpp"

namespace sgp {

struct D2Scalar {
    double v = 0.0;
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();

    D2Scalar() = default;
    D2Scalar(double value) : v(value) {}
    D2Scalar(double value, const Eigen::Vector2d& grad, const Eigen::Matrix2d& hess)
        : v(value), g(grad), h(hess) {}

    // Seed from a derivative table (order >= 2).
    static D2Scalar from_table(const DerivTable& t) {
        return {t.value(), t.gradient(), t.hessian()};
    }

    D2Scalar operator-() const { return {-v, -g, -h}; }

    friend D2Scalar operator+(const D2Scalar& a, const D2Scalar& b) {
        return {a.v + b.v, a.g + b.g, a.h + b.h};
    }
    friend D2Scalar operator-(const D2Scalar& a, const D2Scalar& b) {
        return {a.v - b.v, a.g - b.g, a.h - b.h};
    }
    friend D2Scalar operator*(const D2Scalar& a, const D2Scalar& b) {
        Eigen::Matrix2d h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
        return {a.v * b.v, a.v * b.g + b.v * a.g, h};
    }
    friend D2Scalar operator/(const D2Scalar& a, const D2Scalar& b) {
        const double inv = 1.0 / b.v;
        const double q = a.v * inv;
        const Eigen::Vector2d g = (a.g - q * b.g) * inv;
        // Differentiate g = (a' - q b') / b once more.
        const Eigen::Matrix2d h =
            (a.h - q * b.h - g * b.g.transpose() - b.g * g.transpose()) * inv;
        return {q, g, h};
    }

    friend D2Scalar operator+(double a, const D2Scalar& b) { return D2Scalar(a) + b; }
    friend D2Scalar operator+(const D2Scalar& a, double b) { return a + D2Scalar(b); }
    friend D2Scalar operator-(double a, const D2Scalar& b) { return D2Scalar(a) - b; }
    friend D2Scalar operator-(const D2Scalar& a, double b) { return a - D2Scalar(b); }
    friend D2Scalar operator*(double a, const D2Scalar& b) { return {a * b.v, a * b.g, a * b.h}; }
    friend D2Scalar operator*(const D2Scalar& a, double b) { return b * a; }
    friend D2Scalar operator/(const D2Scalar& a, double b) { return (1.0 / b) * a; }
    friend D2Scalar operator/(double a, const D2Scalar& b) { return D2Scalar(a) / b; }
};

// Access helpers so generic code can ask for the plain value of either a
// double or a D2Scalar.
inline double value_of(double x) { return x; }
inline double value_of(const D2Scalar& x) { return x.v; }

} // namespace sgp

// Allow Eigen matrices over the AD scalar (used when couple tensors are
// evaluated together with their spatial derivatives).
namespace Eigen {
template <>
struct NumTraits<sgp::D2Scalar> : NumTraits<double> {
    typedef sgp::D2Scalar Real;
    typedef sgp::D2Scalar NonInteger;
    typedef sgp::D2Scalar Nested;
    typedef sgp::D2Scalar Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 9,
        AddCost = 9,
        MulCost = 30
    };
};
} // namespace Eigen
