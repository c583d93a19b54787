#pragma once

// Neumann boundary data for the sixth-order plate problem: the triple
// (Vhat, Mn_hat, Mnh_hat) of shear force, bending moment and high-order
// bending moment. Data live on the closed boundary as uniform arclength
// samples with trigonometric interpolation in between; analytic closures
// are kept alongside when the data were given that way. Synthesis from a
// manufactured displacement evaluates the three boundary operators with
// arclength derivatives computed spectrally.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgplate/ad.hpp"
#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"
#include "sgplate/material.hpp"
#include "sgplate/quadrature.hpp"

namespace sgp {

namespace detail {

// Forward DFT with 1/n normalization: c_k = (1/n) sum_j f_j w^{jk},
// w = exp(-2 pi i / n). Direct evaluation with a precomputed twiddle
// table indexed mod n; n is at most a few thousand here and the exact
// periodic indexing avoids rotation drift.
inline std::vector<std::complex<double>> dft_spectrum(const Eigen::VectorXd& f) {
    const int n = int(f.size());
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m)
        tw[std::size_t(m)] = std::polar(1.0, -2.0 * M_PI * double(m) / double(n));
    std::vector<std::complex<double>> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        std::size_t idx = 0;
        for (int j = 0; j < n; ++j) {
            acc += f[j] * tw[idx];
            idx += std::size_t(k);
            if (idx >= std::size_t(n)) idx -= std::size_t(n);
        }
        c[std::size_t(k)] = acc / double(n);
    }
    return c;
}

// Signed frequency of bin k for an n-point transform.
inline int signed_freq(int k, int n) { return 2 * k < n ? k : k - n; }

// Samples of the order-th arclength derivative of a periodic signal given
// by its samples over one period. The Nyquist bin keeps its cosine
// interpretation: zero for odd orders, real factor for even ones.
inline Eigen::VectorXd spectral_deriv(const Eigen::VectorXd& f, double period, int order) {
    const int n = int(f.size());
    const double omega = 2.0 * M_PI / period;
    auto c = dft_spectrum(f);
    for (int k = 0; k < n; ++k) {
        if (n % 2 == 0 && k == n / 2) {
            if (order % 2 == 1) {
                c[std::size_t(k)] = 0.0;
            } else {
                double fac = std::pow(double(n / 2) * omega, order);
                if ((order / 2) % 2 == 1) fac = -fac;
                c[std::size_t(k)] *= fac;
            }
            continue;
        }
        const double kk = signed_freq(k, n) * omega;
        c[std::size_t(k)] *= std::pow(std::complex<double>(0.0, kk), order);
    }
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m)
        tw[std::size_t(m)] = std::polar(1.0, 2.0 * M_PI * double(m) / double(n));
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) {
        std::complex<double> acc(0.0, 0.0);
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) {
            acc += c[std::size_t(k)] * tw[idx];
            idx += std::size_t(j);
            if (idx >= std::size_t(n)) idx -= std::size_t(n);
        }
        out[j] = acc.real();
    }
    return out;
}

// Trigonometric interpolation of the sample spectrum at arclength s.
inline double trig_eval(const std::vector<std::complex<double>>& c, double period, double s) {
    const int n = int(c.size());
    const double omega = 2.0 * M_PI / period;
    double val = c[0].real();
    const std::complex<double> rot = std::polar(1.0, omega * s);
    std::complex<double> e = rot;
    const int half = n / 2;
    for (int k = 1; k < (n + 1) / 2; ++k) {
        val += 2.0 * (c[std::size_t(k)] * e).real();
        e *= rot;
    }
    if (n % 2 == 0) val += c[std::size_t(half)].real() * std::cos(half * omega * s);
    return val;
}

// Pointwise ingredients of the boundary operators at a physical point:
// F = M + div Mh (values), its divergence, and the high-order couple
// values. Every x-derivative comes from one forward pass of second-order
// duals seeded with the displacement partials, so the product rule through
// the couple maps never has to be written out.
struct SynthPoint {
    Eigen::Matrix2d F = Eigen::Matrix2d::Zero();
    Eigen::Vector2d divF = Eigen::Vector2d::Zero();
    Sym3 Mh;
};

inline SynthPoint synth_point(const MaterialField& mat, const Field2& u_star,
                              const Eigen::Vector2d& x) {
    const DerivTable tu = u_star.derivs(x, 5);
    auto seed = [&](int i, int j) {
        Eigen::Matrix2d h;
        h << tu.at(i + 2, j), tu.at(i + 1, j + 1), tu.at(i + 1, j + 1), tu.at(i, j + 2);
        return D2Scalar(tu.at(i, j), Eigen::Vector2d(tu.at(i + 1, j), tu.at(i, j + 1)), h);
    };
    Eigen::Matrix<D2Scalar, 2, 2> H;
    H(0, 0) = seed(2, 0);
    H(0, 1) = seed(1, 1);
    H(1, 0) = H(0, 1);
    H(1, 1) = seed(0, 2);
    Sym3T<D2Scalar> third;
    for (int m = 0; m <= 3; ++m) third.c[std::size_t(m)] = seed(3 - m, m);

    const auto coef = eval_coefficients_d2(mat, x);
    const auto ten = eval_tensors(coef, mat.t, mat.l());
    const Eigen::Matrix<D2Scalar, 2, 2> M = couple_M(ten, H);
    const Sym3T<D2Scalar> Mh = couple_Mh(ten, third);

    SynthPoint out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.F(a, b) = M(a, b).v + Mh(a, b, 0).g(0) + Mh(a, b, 1).g(1);
    for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a) {
            s += M(a, b).g(a);
            for (int gdx = 0; gdx < 2; ++gdx) s += Mh(a, b, gdx).h(a, gdx);
        }
        out.divF(b) = s;
    }
    for (int m = 0; m <= 3; ++m) out.Mh.c[std::size_t(m)] = Mh.c[std::size_t(m)].v;
    return out;
}

}  // namespace detail

// Boundary data triple on a closed curve of given perimeter. Uniform
// arclength samples are the canonical representation; optional closures
// take precedence at evaluation time.
class NeumannData {
  public:
    NeumannData() = default;

    static NeumannData from_samples(double perimeter, Eigen::VectorXd V, Eigen::VectorXd Mn,
                                    Eigen::VectorXd Mnh) {
        if (!(perimeter > 0)) throw OutOfRange("NeumannData: perimeter must be positive");
        const auto n = V.size();
        if (n < 4 || Mn.size() != n || Mnh.size() != n)
            throw OutOfRange("NeumannData: need at least 4 samples of equal count");
        NeumannData d;
        d.P_ = perimeter;
        d.V_ = std::move(V);
        d.Mn_ = std::move(Mn);
        d.Mnh_ = std::move(Mnh);
        d.cV_ = detail::dft_spectrum(d.V_);
        d.cMn_ = detail::dft_spectrum(d.Mn_);
        d.cMnh_ = detail::dft_spectrum(d.Mnh_);
        return d;
    }

    static NeumannData from_functions(const Domain& dom, std::function<double(double)> fV,
                                      std::function<double(double)> fMn,
                                      std::function<double(double)> fMnh, int n = 1024) {
        if (n < 4) throw OutOfRange("NeumannData: need at least 4 samples");
        const double P = dom.perimeter();
        Eigen::VectorXd V(n), Mn(n), Mnh(n);
        for (int j = 0; j < n; ++j) {
            const double s = P * double(j) / double(n);
            V[j] = fV ? fV(s) : 0.0;
            Mn[j] = fMn ? fMn(s) : 0.0;
            Mnh[j] = fMnh ? fMnh(s) : 0.0;
        }
        NeumannData d = from_samples(P, std::move(V), std::move(Mn), std::move(Mnh));
        d.fV_ = std::move(fV);
        d.fMn_ = std::move(fMn);
        d.fMnh_ = std::move(fMnh);
        return d;
    }

    int samples() const { return int(V_.size()); }
    double perimeter() const { return P_; }
    double sample_s(int j) const { return P_ * double(j) / double(samples()); }

    const Eigen::VectorXd& Vhat_samples() const { return V_; }
    const Eigen::VectorXd& Mn_hat_samples() const { return Mn_; }
    const Eigen::VectorXd& Mnh_hat_samples() const { return Mnh_; }

    double Vhat(double s) const { return eval(fV_, cV_, s); }
    double Mn_hat(double s) const { return eval(fMn_, cMn_, s); }
    double Mnh_hat(double s) const { return eval(fMnh_, cMnh_, s); }

    // Magnitude used by the compatibility tolerance: the shear and moment
    // sup norms weighted by the perimeter.
    double scale() const {
        const double v = V_.size() ? V_.cwiseAbs().maxCoeff() : 0.0;
        const double m = Mn_.size() ? Mn_.cwiseAbs().maxCoeff() : 0.0;
        return std::max(v, m) * P_;
    }

    void write_csv(std::ostream& os) const {
        os << "s,Vhat,Mn_hat,Mnh_hat\n";
        char buf[128];
        for (int j = 0; j < samples(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", sample_s(j), V_[j],
                          Mn_[j], Mnh_[j]);
            os << buf;
        }
    }

    void write_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw ConfigError("NeumannData: cannot open " + path + " for writing");
        write_csv(os);
    }

    static NeumannData read_csv(std::istream& is) {
        std::string line;
        if (!std::getline(is, line) || line != "s,Vhat,Mn_hat,Mnh_hat")
            throw ConfigError("NeumannData: bad CSV header");
        std::vector<std::array<double, 4>> rows;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::array<double, 4> row{};
            const char* p = line.c_str();
            for (int c = 0; c < 4; ++c) {
                char* end = nullptr;
                row[std::size_t(c)] = std::strtod(p, &end);
                if (end == p) throw ConfigError("NeumannData: bad CSV row: " + line);
                p = end;
                if (c < 3) {
                    if (*p != ',') throw ConfigError("NeumannData: bad CSV row: " + line);
                    ++p;
                }
            }
            rows.push_back(row);
        }
        const int n = int(rows.size());
        if (n < 4) throw ConfigError("NeumannData: need at least 4 CSV rows");
        if (rows[0][0] != 0.0) throw ConfigError("NeumannData: CSV arclength must start at 0");
        const double ds = rows[1][0];
        if (!(ds > 0)) throw ConfigError("NeumannData: CSV arclength must increase");
        const double P = ds * n;
        Eigen::VectorXd V(n), Mn(n), Mnh(n);
        for (int j = 0; j < n; ++j) {
            if (std::abs(rows[std::size_t(j)][0] - ds * j) > 1e-9 * P)
                throw ConfigError("NeumannData: CSV arclength grid is not uniform");
            V[j] = rows[std::size_t(j)][1];
            Mn[j] = rows[std::size_t(j)][2];
            Mnh[j] = rows[std::size_t(j)][3];
        }
        return from_samples(P, std::move(V), std::move(Mn), std::move(Mnh));
    }

    static NeumannData read_csv_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("NeumannData: cannot open " + path);
        return read_csv(is);
    }

  private:
    double eval(const std::function<double(double)>& f,
                const std::vector<std::complex<double>>& c, double s) const {
        double sw = std::fmod(s, P_);
        if (sw < 0) sw += P_;
        if (f) return f(sw);
        if (c.empty()) throw OutOfRange("NeumannData: empty data");
        return detail::trig_eval(c, P_, sw);
    }

    double P_ = 0.0;
    Eigen::VectorXd V_, Mn_, Mnh_;
    std::vector<std::complex<double>> cV_, cMn_, cMnh_;
    std::function<double(double)> fV_, fMn_, fMnh_;
};

// Boundary data synthesized from a manufactured displacement by evaluating
// the shear, moment and high-order moment operators on the boundary. The
// pointwise parts come from dual-number evaluation of F = M + div Mh; the
// arclength derivatives are spectral on n uniform samples.
inline NeumannData synthesize(const Field2& u_star, const MaterialField& mat, const Domain& dom,
                              int n = 1024) {
    if (u_star.max_order() < 5)
        throw InsufficientSmoothness("synthesize: displacement derivatives to order 5 required");
    if (mat.smoothness != SmoothnessClass::C21)
        throw InsufficientSmoothness("synthesize: coefficient second derivatives required");
    if (n < 16) throw OutOfRange("synthesize: need at least 16 boundary samples");
    const double P = dom.perimeter();
    Eigen::VectorXd A(n), Bv(n), Cv(n), Dv(n), Ev(n), Fnn(n), Tm(n), Mnnn(n);
    for (int j = 0; j < n; ++j) {
        const BoundaryFrame fr = dom.boundary_frame(P * double(j) / double(n));
        const detail::SynthPoint sp = detail::synth_point(mat, u_star, fr.point);
        const Eigen::Vector2d& nn = fr.n;
        const Eigen::Vector2d& tt = fr.tau;
        // Frame derivatives along arclength: n' = K tau, tau' = -K n.
        const Eigen::Vector2d ns = fr.curvature * tt;
        const Eigen::Vector2d ts = -fr.curvature * nn;
        A[j] = sp.divF.dot(nn);
        Bv[j] = nn.dot(sp.F * tt);
        Fnn[j] = nn.dot(sp.F * nn);
        double mttn = 0.0, me = 0.0, md = 0.0, mtm = 0.0, mnnn = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int g = 0; g < 2; ++g) {
                    const double m = sp.Mh(a, b, g);
                    mttn += m * tt(a) * tt(b) * nn(g);
                    me += m * nn(g) * (tt(a) * nn(b) + tt(b) * nn(a));
                    md += m * nn(g) * (ts(a) * tt(b) - ns(a) * nn(b));
                    mtm += m * nn(g) * ns(a) * tt(b);
                    mnnn += m * nn(a) * nn(b) * nn(g);
                }
        Cv[j] = mttn;
        Ev[j] = me;
        Dv[j] = md;
        Tm[j] = mtm;
        Mnnn[j] = mnnn;
    }
    const Eigen::VectorXd V =
        -(A + detail::spectral_deriv(Bv, P, 1) + detail::spectral_deriv(Cv, P, 2) -
          detail::spectral_deriv(Dv, P, 1));
    const Eigen::VectorXd Mn = Fnn + detail::spectral_deriv(Ev, P, 1) - Tm;
    return NeumannData::from_samples(P, V, Mn, -Mnnn);
}

// Residuals of the three compatibility conditions: the shear must have
// zero resultant and, combined with the moment, zero resultant torque
// about both axes.
struct CompatibilityReport {
    Eigen::Vector3d residuals = Eigen::Vector3d::Zero();
    double tol = 0.0;
    bool pass = false;
};

inline CompatibilityReport compatibility_check(const NeumannData& data, const Domain& dom,
                                               int n_per_panel = 24) {
    const auto [lo, hi] = dom.param_bbox();
    const std::vector<double> bx = {lo.x(), hi.x()}, by = {lo.y(), hi.y()};
    const auto quad = boundary_quadrature(dom, bx, by, n_per_panel);
    CompatibilityReport rep;
    for (const auto& qp : quad) {
        const double V = data.Vhat(qp.frame.s);
        const double Mn = data.Mn_hat(qp.frame.s);
        rep.residuals[0] += qp.w * V;
        rep.residuals[1] += qp.w * (V * qp.frame.point.x() + Mn * qp.frame.n.x());
        rep.residuals[2] += qp.w * (V * qp.frame.point.y() + Mn * qp.frame.n.y());
    }
    rep.tol = 1e-8 * data.scale();
    rep.pass = rep.residuals.cwiseAbs().maxCoeff() <= rep.tol;
    return rep;
}

// Load functional of the weak form: -closed integral of V w + Mn dw/dn
// + Mnh d2w/dn2, with the test trace given through its cartesian
// derivative table at physical boundary points.
inline double load_functional(const NeumannData& data, const Domain& dom,
                              const std::function<DerivTable(const Eigen::Vector2d&)>& w,
                              int n_per_panel = 24, std::vector<double> bx = {},
                              std::vector<double> by = {}) {
    // Panel breaks let callers align the rule with kinks of w; by default
    // each curve piece is one panel.
    const auto [lo, hi] = dom.param_bbox();
    if (bx.empty()) bx = {lo.x(), hi.x()};
    if (by.empty()) by = {lo.y(), hi.y()};
    const auto quad = boundary_quadrature(dom, bx, by, n_per_panel);
    double acc = 0.0;
    for (const auto& qp : quad) {
        const DerivTable t = w(qp.frame.point);
        const Eigen::Vector2d& nn = qp.frame.n;
        const double wn = nn.dot(t.gradient());
        const double wnn = nn.dot(t.hessian() * nn);
        acc += qp.w * (data.Vhat(qp.frame.s) * t.value() + data.Mn_hat(qp.frame.s) * wn +
                       data.Mnh_hat(qp.frame.s) * wnn);
    }
    return -acc;
}

}  // namespace sgp
