#pragma once

// Fixed test function families for the inequality experiments: smooth
// compactly supported annular bumps for the weighted estimate sweeps and
// triharmonic polynomials for the doubling and three-sphere checks.

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"
#include "sgplate/poly2.hpp"

namespace sgp {

// amp ((r^2 - a^2)(b^2 - r^2))^7 Re((x1 + i x2)^m) on the annulus
// a < |x| < b and identically zero outside. The seventh power leaves six
// continuous derivatives across the support boundary, so every integrand
// of the sweeps stays continuous.
class AnnularBump final : public Field2 {
  public:
    AnnularBump(double a, double b, double amp, int m)
        : a_(a), b_(b), amp_(amp), m_(m), poly_(build(a, b, amp, m)) {}

    int max_order() const override { return DerivTable::kMaxOrder; }

    DerivTable derivs(const Eigen::Vector2d& x, int k) const override {
        const double r2 = x.squaredNorm();
        if (r2 <= a_ * a_ || r2 >= b_ * b_) return DerivTable(k);
        return poly_.derivs(x, k);
    }

    std::optional<std::pair<double, double>> support_annulus() const override {
        return std::make_pair(a_, b_);
    }

    double inner() const { return a_; }
    double outer() const { return b_; }
    double amplitude() const { return amp_; }
    int azimuthal() const { return m_; }

  private:
    static PolyField build(double a, double b, double amp, int m) {
        if (!(0.0 < a && a < b)) throw OutOfRange("AnnularBump: need 0 < a < b");
        if (m < 0) throw OutOfRange("AnnularBump: negative azimuthal index");
        const Poly2 r2 = Poly2::monomial(2, 0) + Poly2::monomial(0, 2);
        const Poly2 shell = (r2 - Poly2::constant(a * a)) * (Poly2::constant(b * b) - r2);
        Poly2 acc = Poly2::constant(amp);
        for (int i = 0; i < 7; ++i) acc = acc * shell;
        return PolyField(acc * Poly2::harmonic_re(m));
    }

    double a_, b_, amp_;
    int m_;
    PolyField poly_;
};

struct SweepMember {
    std::string name;
    AnnularBump bump;
};

// Five-member sweep battery with supports inside B_{R1}. The amplitudes
// come from a seeded generator so reruns see identical functions.
inline std::vector<SweepMember> sweep_battery(double R1, unsigned seed = 7) {
    if (!(R1 > 0.0)) throw OutOfRange("sweep_battery: R1 must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    const double shells[5][2] = {
        {0.40, 0.80}, {0.40, 0.80}, {0.30, 0.90}, {0.50, 0.70}, {0.40, 0.90}};
    const int ms[5] = {0, 2, 1, 3, 4};
    std::vector<SweepMember> out;
    out.reserve(5);
    for (int i = 0; i < 5; ++i) {
        const double a = shells[i][0] * R1, b = shells[i][1] * R1;
        out.push_back({"bump_m" + std::to_string(ms[i]) + "_" + std::to_string(i),
                       AnnularBump(a, b, amp(rng), ms[i])});
    }
    return out;
}

struct TriharmonicMember {
    std::string name;
    PolyField field;
};

// Polynomials with vanishing third Laplacian power, the profile battery
// for the doubling and three-sphere measurements. All are harmonic, which
// makes them interior solutions for any constant coefficient set.
inline std::vector<TriharmonicMember> triharmonic_battery() {
    std::vector<TriharmonicMember> out;
    out.push_back({"one", PolyField(Poly2::constant(1.0))});
    out.push_back({"x1", PolyField(Poly2::monomial(1, 0))});
    for (int m = 2; m <= 4; ++m)
        out.push_back({"re_z" + std::to_string(m), PolyField(Poly2::harmonic_re(m))});
    return out;
}

}  // namespace sgp
