// material.hpp
//
// Constitutive layer of the isotropic strain-gradient plate model: scalar
// coefficient evaluation from the Lame moduli, the fourth and sixth order
// stiffness tensors, the couple-tensor maps, and an empirical strong
// convexity probe. Coefficient formulas are templated on the scalar type so
// they can run on plain doubles or on forward-AD scalars when coefficient
// derivatives are needed.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>

#include "sgplate/ad.hpp"
#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"

namespace sgp {

// Declared smoothness of the coefficient fields.
enum class SmoothnessClass { C01, C11, C21 };

// Fully symmetric third-order tensor on R^2. With indices in {0,1} the
// component depends only on how many indices equal 1, so four numbers
// determine the tensor: c[m] holds the component with m indices in the x2
// slot (u,111 u,112 u,122 u,222 for a third gradient).
template <typename Scalar>
struct Sym3T {
    std::array<Scalar, 4> c{Scalar(0), Scalar(0), Scalar(0), Scalar(0)};

    Scalar operator()(int i, int j, int k) const { return c[i + j + k]; }
    Scalar& slot(int m) { return c[m]; }
    Scalar slot(int m) const { return c[m]; }

    static Sym3T from_table(const DerivTableT<Scalar>& t) {
        Sym3T s;
        s.c = {t.at(3, 0), t.at(2, 1), t.at(1, 2), t.at(0, 3)};
        return s;
    }

    // Gradient of the trace: (div of the contracted pair), components
    // u,mm1 and u,mm2 for a third gradient.
    Eigen::Matrix<Scalar, 2, 1> trace_grad() const {
        return {c[0] + c[2], c[1] + c[3]};
    }

    // Full 8-slot contraction with another symmetric tensor.
    Scalar dot_full(const Sym3T& o) const {
        return c[0] * o.c[0] + Scalar(3) * c[1] * o.c[1] + Scalar(3) * c[2] * o.c[2] +
               c[3] * o.c[3];
    }

    Scalar norm_sq_full() const { return dot_full(*this); }
};

using Sym3 = Sym3T<double>;

// Pointwise material description. Coefficient fields are immutable and
// shared, so evaluation is safe from parallel assembly workers.
struct MaterialField {
    std::shared_ptr<const Field2> mu;
    std::shared_ptr<const Field2> lambda;
    double t = 1.0;
    double l0 = 1.0, l1 = 1.0, l2 = 1.0;
    double r0 = 1.0;
    double alpha0 = 0.0, gamma0 = 0.0; // optional declared ellipticity floors
    SmoothnessClass smoothness = SmoothnessClass::C21;
    double q9_ratio = 0.0; // Q9 = q9_ratio * b1; Q8 follows from the constraint

    static MaterialField constants(double mu_c, double lambda_c, double t, double l0, double l1,
                                   double l2, double r0 = 1.0) {
        MaterialField m;
        m.mu = std::make_shared<ConstantField>(mu_c);
        m.lambda = std::make_shared<ConstantField>(lambda_c);
        m.t = t;
        m.l0 = l0;
        m.l1 = l1;
        m.l2 = l2;
        m.r0 = r0;
        m.validate();
        return m;
    }

    void validate() const {
        if (!mu || !lambda) throw OutOfRange("MaterialField: moduli fields not set");
        if (!(t > 0)) throw OutOfRange("MaterialField: thickness must be positive");
        if (!(l0 > 0 && l1 > 0 && l2 > 0))
            throw OutOfRange("MaterialField: length scales must be positive");
        if (!(r0 > 0)) throw OutOfRange("MaterialField: reference length must be positive");
    }

    double l() const { return std::min({l0, l1, l2}); }
};

// All scalar constitutive coefficients at one point.
template <typename Scalar>
struct IsotropicCoefficientsT {
    Scalar E{}, nu{}, B{};
    Scalar a0{}, a1{}, a2{};
    Scalar b0{}, b1{};
    Scalar Q8{}, Q9{};
};

using IsotropicCoefficients = IsotropicCoefficientsT<double>;

// Core coefficient evaluation from pointwise moduli. Ellipticity must be
// checked by the caller on the value part (see the MaterialField overload).
template <typename Scalar>
IsotropicCoefficientsT<Scalar> eval_coefficients(const Scalar& mu, const Scalar& lambda, double t,
                                                 double l0, double l1, double l2,
                                                 double q9_ratio = 0.0) {
    IsotropicCoefficientsT<Scalar> c;
    c.E = mu * (2.0 * mu + 3.0 * lambda) / (mu + lambda);
    c.nu = lambda / (2.0 * (mu + lambda));
    const double t3_12 = t * t * t / 12.0;
    c.B = t3_12 * c.E / (1.0 - c.nu * c.nu);
    c.a0 = 2.0 * t * l0 * l0 * mu;
    c.a1 = (2.0 / 15.0) * t * l1 * l1 * mu;
    c.a2 = t * l2 * l2 * mu;
    c.b0 = 2.0 * t3_12 * l0 * l0 * mu;
    c.b1 = (2.0 / 5.0) * t3_12 * l1 * l1 * mu;
    c.Q9 = q9_ratio * c.b1;
    c.Q8 = 2.5 * c.b1 - 2.0 * c.Q9;
    return c;
}

inline void check_ellipticity(double mu_v, double lambda_v, const MaterialField& mat) {
    const double bulk = 2.0 * mu_v + 3.0 * lambda_v;
    if (!(mu_v > 0.0) || !(bulk > 0.0))
        throw EllipticityViolation("mu = " + std::to_string(mu_v) +
                                   ", 2 mu + 3 lambda = " + std::to_string(bulk) +
                                   " violates the ellipticity conditions");
    if (mat.alpha0 > 0.0 && mu_v < mat.alpha0)
        throw EllipticityViolation("mu below the declared floor alpha0");
    if (mat.gamma0 > 0.0 && bulk < mat.gamma0)
        throw EllipticityViolation("2 mu + 3 lambda below the declared floor gamma0");
}

inline IsotropicCoefficients eval_coefficients(const MaterialField& mat,
                                               const Eigen::Vector2d& x) {
    const double mu_v = mat.mu->derivs(x, 0).value();
    const double la_v = mat.lambda->derivs(x, 0).value();
    check_ellipticity(mu_v, la_v, mat);
    return eval_coefficients(mu_v, la_v, mat.t, mat.l0, mat.l1, mat.l2, mat.q9_ratio);
}

// Coefficients together with first and second spatial derivatives, obtained
// by running the same formulas on forward-AD scalars seeded from the moduli
// derivative tables.
inline IsotropicCoefficientsT<D2Scalar> eval_coefficients_d2(const MaterialField& mat,
                                                             const Eigen::Vector2d& x) {
    const DerivTable tmu = mat.mu->derivs(x, 2);
    const DerivTable tla = mat.lambda->derivs(x, 2);
    check_ellipticity(tmu.value(), tla.value(), mat);
    return eval_coefficients(D2Scalar::from_table(tmu), D2Scalar::from_table(tla), mat.t, mat.l0,
                             mat.l1, mat.l2, mat.q9_ratio);
}

namespace detail {
constexpr int idx4(int a, int b, int c, int d) { return ((a * 2 + b) * 2 + c) * 2 + d; }
constexpr int idx6(int i, int j, int k, int l, int m, int n) {
    return ((((i * 2 + j) * 2 + k) * 2 + l) * 2 + m) * 2 + n;
}
constexpr double kron(int a, int b) { return a == b ? 1.0 : 0.0; }
} // namespace detail

// Dense component arrays of the stiffness tensors at one point, plus the
// scalars needed by the shortcut contractions and the convexity normalizers.
template <typename Scalar>
struct StiffnessTensorsT {
    std::array<Scalar, 16> P{};
    std::array<Scalar, 16> Ph{};
    std::array<Scalar, 64> Q{};
    IsotropicCoefficientsT<Scalar> coef;
    double t = 1.0, l = 1.0;
};

using StiffnessTensors = StiffnessTensorsT<double>;

template <typename Scalar>
StiffnessTensorsT<Scalar> eval_tensors(const IsotropicCoefficientsT<Scalar>& coef, double t,
                                       double l) {
    using detail::idx4;
    using detail::idx6;
    using detail::kron;
    StiffnessTensorsT<Scalar> ten;
    ten.coef = coef;
    ten.t = t;
    ten.l = l;

    const Scalar pA = coef.B * (1.0 - coef.nu);
    const Scalar pB = coef.B * coef.nu;
    const Scalar hA = 2.0 * coef.a2 + 5.0 * coef.a1;
    const Scalar hB = coef.a0 - coef.a1 - coef.a2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    ten.P[idx4(a, b, c, d)] = pA * kron(a, c) * kron(b, d) +
                                              pB * kron(a, b) * kron(c, d);
                    ten.Ph[idx4(a, b, c, d)] = hA * kron(a, c) * kron(b, d) +
                                               hB * kron(a, b) * kron(c, d);
                }

    const Scalar q3 = (coef.b0 - 3.0 * coef.b1) / 3.0;
    const Scalar q6 = (coef.b0 - 3.0 * coef.b1) / 6.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l2 = 0; l2 < 2; ++l2)
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n) {
                            Scalar q = q3 * kron(i, j) * kron(k, n) * kron(l2, m);
                            q = q + q6 * (kron(i, k) * (kron(j, l2) * kron(m, n) +
                                                        kron(j, m) * kron(l2, n)) +
                                          kron(j, k) * (kron(i, l2) * kron(m, n) +
                                                        kron(i, m) * kron(l2, n)));
                            q = q + coef.Q8 * kron(k, n) *
                                        (kron(i, l2) * kron(j, m) + kron(i, m) * kron(j, l2));
                            q = q + coef.Q9 *
                                        (kron(j, n) * (kron(i, l2) * kron(k, m) +
                                                       kron(i, m) * kron(k, l2)) +
                                         kron(i, n) * (kron(j, l2) * kron(k, m) +
                                                       kron(j, m) * kron(k, l2)));
                            ten.Q[idx6(i, j, k, l2, m, n)] = q;
                        }
    return ten;
}

inline StiffnessTensors eval_tensors(const MaterialField& mat, const Eigen::Vector2d& x) {
    return eval_tensors(eval_coefficients(mat, x), mat.t, mat.l());
}

// Couple tensor M(u): contraction of -(P + Ph) with the hessian.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> couple_M(const StiffnessTensorsT<Scalar>& ten,
                                     const Eigen::Matrix<Scalar, 2, 2>& hessian) {
    using detail::idx4;
    Eigen::Matrix<Scalar, 2, 2> M;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Scalar s{};
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    s = s + (ten.P[idx4(a, b, c, d)] + ten.Ph[idx4(a, b, c, d)]) * hessian(c, d);
            M(a, b) = -s;
        }
    return M;
}

// Higher-order couple tensor in its reduced two-coefficient form. Agrees
// with the direct six-index contraction for every admissible Q8/Q9 split.
template <typename Scalar>
Sym3T<Scalar> couple_Mh(const StiffnessTensorsT<Scalar>& ten, const Sym3T<Scalar>& third) {
    const Scalar cA = (ten.coef.b0 - 3.0 * ten.coef.b1) / 3.0;
    const Scalar cB = 5.0 * ten.coef.b1;
    const Eigen::Matrix<Scalar, 2, 1> g = third.trace_grad();
    Sym3T<Scalar> out;
    for (int m = 0; m <= 3; ++m) {
        // Representative index tuple with m indices equal to 1 (the x2 axis).
        const int i = m >= 1 ? 1 : 0, j = m >= 2 ? 1 : 0, k = m >= 3 ? 1 : 0;
        Scalar s = cA * (detail::kron(i, j) * g(k) + detail::kron(i, k) * g(j) +
                         detail::kron(j, k) * g(i));
        s = s + cB * third.c[m];
        out.c[m] = s;
    }
    return out;
}

// Full bilinear contractions used by the energy form. Mixed components are
// counted with their tensor multiplicities.
template <typename Scalar>
Scalar p_bilinear(const StiffnessTensorsT<Scalar>& ten, const Eigen::Matrix<Scalar, 2, 2>& Hu,
                  const Eigen::Matrix<Scalar, 2, 2>& Hw) {
    const Scalar c1 = ten.coef.B * (1.0 - ten.coef.nu) + 2.0 * ten.coef.a2 + 5.0 * ten.coef.a1;
    const Scalar c2 = ten.coef.B * ten.coef.nu + ten.coef.a0 - ten.coef.a1 - ten.coef.a2;
    const Scalar frob = Hu(0, 0) * Hw(0, 0) + 2.0 * Hu(0, 1) * Hw(0, 1) + Hu(1, 1) * Hw(1, 1);
    return c1 * frob + c2 * (Hu(0, 0) + Hu(1, 1)) * (Hw(0, 0) + Hw(1, 1));
}

template <typename Scalar>
Scalar q_bilinear(const StiffnessTensorsT<Scalar>& ten, const Sym3T<Scalar>& Tu,
                  const Sym3T<Scalar>& Tw) {
    const Scalar cA = ten.coef.b0 - 3.0 * ten.coef.b1;
    const Scalar cB = 5.0 * ten.coef.b1;
    const auto gu = Tu.trace_grad();
    const auto gw = Tw.trace_grad();
    return cA * (gu(0) * gw(0) + gu(1) * gw(1)) + cB * Tu.dot_full(Tw);
}

// Direct index-loop contractions against the stored component arrays. The
// convexity probe and the invariant suite go through these so that the dense
// tensor data, not just the reduced coefficient form, is exercised.
template <typename Scalar>
Scalar p_contract_direct(const StiffnessTensorsT<Scalar>& ten,
                         const Eigen::Matrix<Scalar, 2, 2>& A,
                         const Eigen::Matrix<Scalar, 2, 2>& B) {
    using detail::idx4;
    Scalar s{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    s = s + (ten.P[idx4(a, b, c, d)] + ten.Ph[idx4(a, b, c, d)]) * A(c, d) * B(a, b);
    return s;
}

template <typename Scalar>
Scalar q_contract_direct(const StiffnessTensorsT<Scalar>& ten, const Sym3T<Scalar>& A,
                         const Sym3T<Scalar>& B) {
    using detail::idx6;
    Scalar s{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n)
                            s = s + ten.Q[idx6(i, j, k, l, m, n)] * A(l, m, n) * B(i, j, k);
    return s;
}

// Empirical strong-convexity constants: minimum Rayleigh quotients of the
// two quadratic forms over random unit-norm symmetric tensors, normalized
// by the thickness and length-scale factors of the lower bounds.
inline std::pair<double, double> convexity_probe(const StiffnessTensors& ten, int samples,
                                                 std::uint64_t seed = 12345) {
    if (samples < 1) throw OutOfRange("convexity_probe: need at least one sample");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double normP = ten.t * (ten.t * ten.t + ten.l * ten.l);
    const double normQ = ten.t * ten.t * ten.t * ten.l * ten.l;

    double xiP = std::numeric_limits<double>::infinity();
    double xiQ = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Eigen::Matrix2d A;
        const double a = gauss(rng), b = gauss(rng), c = gauss(rng);
        A << a, b, b, c;
        const double nA = A(0, 0) * A(0, 0) + 2 * A(0, 1) * A(0, 1) + A(1, 1) * A(1, 1);
        if (nA > 0) xiP = std::min(xiP, p_contract_direct(ten, A, A) / (normP * nA));

        Sym3 T;
        for (int m = 0; m <= 3; ++m) T.c[m] = gauss(rng);
        const double nT = T.norm_sq_full();
        if (nT > 0) xiQ = std::min(xiQ, q_contract_direct(ten, T, T) / (normQ * nT));
    }
    if (!(xiP > 0.0) || !(xiQ > 0.0))
        throw ConvexityViolation("empirical convexity estimate not positive: xiP = " +
                                 std::to_string(xiP) + ", xiQ = " + std::to_string(xiQ));
    return {xiP, xiQ};
}

} // namespace sgp
