// geometry.hpp
//
// Domain descriptions (rounded rectangle, disk, smoothly mapped rectangle),
// arclength boundary frames with curvature, the surface-derivative calculus
// relating cartesian and (s,n) derivatives on the boundary, and derivative
// arrays of the coordinate map. Boundaries are traversed counterclockwise;
// the tangent is the +pi/2 rotation of the outward normal.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "sgplate/deriv.hpp"
#include "sgplate/error.hpp"

namespace sgp {

enum class DomainKind { Rectangle, Disk, Mapped };

struct BoundaryFrame {
    Eigen::Vector2d point = Eigen::Vector2d::Zero(); // physical location
    Eigen::Vector2d param = Eigen::Vector2d::Zero(); // parametric preimage
    Eigen::Vector2d n = Eigen::Vector2d::Zero();     // unit outward normal
    Eigen::Vector2d tau = Eigen::Vector2d::Zero();   // unit tangent, tau = e3 x n
    double curvature = 0.0;
    double s = 0.0; // arclength coordinate
};

// Curvature of a graph boundary x2 = g(x1) from first and second derivative.
inline double graph_curvature(double gp, double gpp) {
    const double q = 1.0 + gp * gp;
    return gpp / (q * std::sqrt(q));
}

// Coordinate map given by two scalar component fields.
struct MapSpec {
    std::shared_ptr<const Field2> phi1;
    std::shared_ptr<const Field2> phi2;
};

// First, second and third derivative arrays of the coordinate map at a
// point: S_{kr}, R_{k alpha beta}, Z_{k alpha beta gamma}.
struct MapJacobians {
    Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
    std::array<double, 8> Rarr{};
    std::array<double, 16> Zarr{};

    double R(int k, int a, int b) const { return Rarr[(k * 2 + a) * 2 + b]; }
    double& R(int k, int a, int b) { return Rarr[(k * 2 + a) * 2 + b]; }
    double Z(int k, int a, int b, int c) const { return Zarr[((k * 2 + a) * 2 + b) * 2 + c]; }
    double& Z(int k, int a, int b, int c) { return Zarr[((k * 2 + a) * 2 + b) * 2 + c]; }
};

namespace detail {

// Convex parametric region: either a disk of radius R or a rectangle
// [-hx,hx] x [-hy,hy] with corners rounded at radius rc. Described for
// quadrature as an x-slab region with piecewise lower/upper boundaries.
struct ConvexRegion {
    bool is_disk = false;
    double R = 0.0;        // disk radius
    double hx = 0.0, hy = 0.0, rc = 0.0; // rectangle half-widths, corner radius

    double x_min() const { return is_disk ? -R : -hx; }
    double x_max() const { return is_disk ? R : hx; }

    bool inside(const Eigen::Vector2d& x) const {
        if (is_disk) return x.squaredNorm() <= R * R;
        const double dx = std::max(std::abs(x.x()) - (hx - rc), 0.0);
        const double dy = std::max(std::abs(x.y()) - (hy - rc), 0.0);
        return std::abs(x.x()) <= hx && std::abs(x.y()) <= hy && dx * dx + dy * dy <= rc * rc;
    }

    // Lower and upper boundary ordinates of the region at abscissa x
    // (x must lie strictly inside [x_min, x_max]).
    std::pair<double, double> ybounds(double x) const {
        if (is_disk) {
            const double h = std::sqrt(std::max(R * R - x * x, 0.0));
            return {-h, h};
        }
        const double ax = std::abs(x);
        if (ax <= hx - rc) return {-hy, hy};
        const double dx = ax - (hx - rc);
        const double h = std::sqrt(std::max(rc * rc - dx * dx, 0.0));
        return {-(hy - rc) - h, (hy - rc) + h};
    }

    // True when a vertical slab around abscissa x has curved (arc) pieces;
    // fills the shared substitution circle (cx, radius).
    bool arc_at(double x, double& cx, double& radius) const {
        if (is_disk) {
            cx = 0.0;
            radius = R;
            return true;
        }
        if (std::abs(x) <= hx - rc) return false;
        cx = (x > 0 ? hx - rc : -(hx - rc));
        radius = rc;
        return true;
    }

    // x-abscissas where the boundary formula changes piece, plus where the
    // boundary crosses the horizontal lines y = ylo and y = yhi.
    std::vector<double> slab_breaks(double ylo, double yhi) const {
        std::vector<double> b;
        auto add_cross = [&](double cx2, double cy, double r, double y) {
            const double d = r * r - (y - cy) * (y - cy);
            if (d > 0) {
                const double h = std::sqrt(d);
                b.push_back(cx2 - h);
                b.push_back(cx2 + h);
            }
        };
        if (is_disk) {
            b.push_back(-R);
            b.push_back(R);
            add_cross(0.0, 0.0, R, ylo);
            add_cross(0.0, 0.0, R, yhi);
        } else {
            for (double x : {-hx, -(hx - rc), hx - rc, hx}) b.push_back(x);
            for (double cx2 : {-(hx - rc), hx - rc})
                for (double cy : {-(hy - rc), hy - rc})
                    for (double y : {ylo, yhi}) add_cross(cx2, cy, rc, y);
        }
        return b;
    }

    double area_exact() const {
        if (is_disk) return M_PI * R * R;
        return 4.0 * hx * hy - (4.0 - M_PI) * rc * rc;
    }
};

// One smooth piece of the counterclockwise base boundary curve: a straight
// segment or a circular arc, parameterized by base arclength.
struct CurvePiece {
    bool is_arc = false;
    double s0 = 0.0, len = 0.0;
    // segment data
    Eigen::Vector2d start = Eigen::Vector2d::Zero();
    Eigen::Vector2d dir = Eigen::Vector2d::Zero();
    // arc data
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 1.0, phi0 = 0.0; // angle at s0, increasing CCW

    Eigen::Vector2d point(double s) const {
        if (!is_arc) return start + (s - s0) * dir;
        const double phi = phi0 + (s - s0) / radius;
        return center + radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    }
    Eigen::Vector2d tangent(double s) const {
        if (!is_arc) return dir;
        const double phi = phi0 + (s - s0) / radius;
        return {-std::sin(phi), std::cos(phi)};
    }
    double curvature() const { return is_arc ? 1.0 / radius : 0.0; }
};

inline std::vector<CurvePiece> rounded_rect_pieces(double hx, double hy, double rc) {
    std::vector<CurvePiece> ps;
    const double wx = 2 * (hx - rc), wy = 2 * (hy - rc);
    const double qa = 0.5 * M_PI * rc;
    double s = 0.0;
    auto seg = [&](Eigen::Vector2d a, Eigen::Vector2d d, double len) {
        CurvePiece p;
        p.s0 = s;
        p.len = len;
        p.start = a;
        p.dir = d;
        ps.push_back(p);
        s += len;
    };
    auto arc = [&](Eigen::Vector2d c, double phi0) {
        CurvePiece p;
        p.is_arc = true;
        p.s0 = s;
        p.len = qa;
        p.center = c;
        p.radius = rc;
        p.phi0 = phi0;
        ps.push_back(p);
        s += qa;
    };
    seg({-(hx - rc), -hy}, {1, 0}, wx);                    // bottom
    arc({hx - rc, -(hy - rc)}, -0.5 * M_PI);               // bottom-right
    seg({hx, -(hy - rc)}, {0, 1}, wy);                     // right
    arc({hx - rc, hy - rc}, 0.0);                          // top-right
    seg({hx - rc, hy}, {-1, 0}, wx);                       // top
    arc({-(hx - rc), hy - rc}, 0.5 * M_PI);                // top-left
    seg({-hx, hy - rc}, {0, -1}, wy);                      // left
    arc({-(hx - rc), -(hy - rc)}, M_PI);                   // bottom-left
    return ps;
}

inline std::vector<CurvePiece> disk_pieces(double R) {
    CurvePiece p;
    p.is_arc = true;
    p.s0 = 0.0;
    p.len = 2 * M_PI * R;
    p.center = {0, 0};
    p.radius = R;
    p.phi0 = 0.0;
    return {p};
}

} // namespace detail

class Domain {
  public:
    static Domain rectangle(double a, double b, double corner_radius = 0.0, double r0 = 1.0) {
        Domain d;
        d.kind_ = DomainKind::Rectangle;
        d.init_rect(a, b, corner_radius, r0);
        return d;
    }

    static Domain disk(double R, double r0 = 1.0) {
        if (!(R > 0)) throw OutOfRange("Domain::disk: radius must be positive");
        Domain d;
        d.kind_ = DomainKind::Disk;
        d.r0_ = check_r0(r0);
        d.region_.is_disk = true;
        d.region_.R = R;
        d.pieces_ = detail::disk_pieces(R);
        d.perimeter_ = 2 * M_PI * R;
        return d;
    }

    static Domain mapped(double a, double b, double corner_radius, MapSpec map, double r0 = 1.0) {
        Domain d;
        d.kind_ = DomainKind::Mapped;
        d.init_rect(a, b, corner_radius, r0);
        if (!map.phi1 || !map.phi2) throw OutOfRange("Domain::mapped: map components not set");
        if (map.phi1->max_order() < 3 || map.phi2->max_order() < 3)
            throw InsufficientSmoothness("Domain::mapped: map must provide third derivatives");
        d.map_ = std::move(map);
        d.calibrate_map();
        d.build_arclength_table();
        return d;
    }

    DomainKind kind() const { return kind_; }
    double r0() const { return r0_; }
    double& M0() { return M0_; }
    double& M1() { return M1_; }
    double M0() const { return M0_; }
    double M1() const { return M1_; }

    // Parametric bounding box containing the (parametric) region.
    std::pair<Eigen::Vector2d, Eigen::Vector2d> param_bbox() const {
        const double hx = region_.is_disk ? region_.R : region_.hx;
        const double hy = region_.is_disk ? region_.R : region_.hy;
        return {Eigen::Vector2d(-hx, -hy), Eigen::Vector2d(hx, hy)};
    }

    const detail::ConvexRegion& param_region() const { return region_; }
    bool param_inside(const Eigen::Vector2d& xp) const { return region_.inside(xp); }

    double perimeter() const { return perimeter_; }

    // Physical image of a parametric point (identity for unmapped kinds).
    Eigen::Vector2d to_physical(const Eigen::Vector2d& xp) const {
        if (kind_ != DomainKind::Mapped) return xp;
        return {map_.phi1->derivs(xp, 0).value(), map_.phi2->derivs(xp, 0).value()};
    }

    // Derivative arrays of the map at a parametric point. Unmapped kinds
    // yield the identity data.
    MapJacobians map_jacobians(const Eigen::Vector2d& xp) const {
        MapJacobians mj;
        if (kind_ != DomainKind::Mapped) return mj;
        const DerivTable t1 = map_.phi1->derivs(xp, 3);
        const DerivTable t2 = map_.phi2->derivs(xp, 3);
        const DerivTable* tt[2] = {&t1, &t2};
        for (int k = 0; k < 2; ++k) {
            mj.S(k, 0) = tt[k]->at(1, 0);
            mj.S(k, 1) = tt[k]->at(0, 1);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    mj.R(k, a, b) = tt[k]->at(2 - a - b, a + b);
                    for (int c = 0; c < 2; ++c)
                        mj.Z(k, a, b, c) = tt[k]->at(3 - a - b - c, a + b + c);
                }
        }
        const double det = mj.S.determinant();
        if (std::abs(det) < 1e-10 * mean_abs_det_)
            throw SingularMap("map jacobian determinant " + std::to_string(det) +
                              " below threshold at parametric point (" +
                              std::to_string(xp.x()) + ", " + std::to_string(xp.y()) + ")");
        return mj;
    }

    // Frame at physical arclength s (wrapped periodically into [0, P)).
    BoundaryFrame boundary_frame(double s) const {
        double sw = std::fmod(s, perimeter_);
        if (sw < 0) sw += perimeter_;
        if (kind_ != DomainKind::Mapped) return base_frame(sw);
        return mapped_frame_at_t(t_of_s(sw), sw);
    }

    // Frame at base-curve parameter t (base arclength); exposes the exact
    // breakpoint machinery to the boundary quadrature builder.
    BoundaryFrame frame_at_base(double t) const {
        double tw = std::fmod(t, base_length());
        if (tw < 0) tw += base_length();
        if (kind_ != DomainKind::Mapped) return base_frame(tw);
        return mapped_frame_at_t(tw, s_of_t(tw));
    }

    double base_length() const {
        return pieces_.back().s0 + pieces_.back().len;
    }

    // Physical speed |d gamma / dt| at base parameter t (1 for unmapped).
    double boundary_speed(double t) const {
        if (kind_ != DomainKind::Mapped) return 1.0;
        const detail::CurvePiece& p = piece_at(t);
        const Eigen::Vector2d xp = p.point(t);
        const Eigen::Vector2d tb = p.tangent(t);
        return (map_jacobians(xp).S * tb).norm();
    }

    const std::vector<detail::CurvePiece>& base_pieces() const { return pieces_; }

    // Region area from the closed-form expressions (parametric for mapped).
    double param_area() const { return region_.area_exact(); }

  private:
    static double check_r0(double r0) {
        if (!(r0 > 0)) throw OutOfRange("Domain: reference length must be positive");
        return r0;
    }

    void init_rect(double a, double b, double corner_radius, double r0) {
        if (!(a > 0) || !(b > 0)) throw OutOfRange("Domain: rectangle sides must be positive");
        r0_ = check_r0(r0);
        double rc = corner_radius > 0 ? corner_radius : std::min(a, b) / 8.0;
        if (rc < r0 / 10.0)
            throw OutOfRange("Domain: corner radius below r0/10; boundary too close to a corner");
        if (rc > 0.5 * std::min(a, b))
            throw OutOfRange("Domain: corner radius exceeds half the shorter side");
        region_.is_disk = false;
        region_.hx = 0.5 * a;
        region_.hy = 0.5 * b;
        region_.rc = rc;
        pieces_ = detail::rounded_rect_pieces(region_.hx, region_.hy, rc);
        perimeter_ = base_length();
    }

    const detail::CurvePiece& piece_at(double t) const {
        for (const auto& p : pieces_)
            if (t <= p.s0 + p.len + 1e-12) return p;
        return pieces_.back();
    }

    BoundaryFrame base_frame(double s) const {
        const detail::CurvePiece& p = piece_at(s);
        BoundaryFrame f;
        f.s = s;
        f.param = p.point(s);
        f.point = f.param;
        f.tau = p.tangent(s);
        f.n = {f.tau.y(), -f.tau.x()};
        f.curvature = p.curvature();
        return f;
    }

    BoundaryFrame mapped_frame_at_t(double t, double s) const {
        const detail::CurvePiece& p = piece_at(t);
        const Eigen::Vector2d xp = p.point(t);
        const Eigen::Vector2d tb = p.tangent(t);
        const MapJacobians mj = map_jacobians(xp);

        const Eigen::Vector2d g1 = mj.S * tb; // d gamma / dt
        // Base tangent turns at rate -K_base n_base along the base curve.
        const Eigen::Vector2d dtau = -p.curvature() * Eigen::Vector2d(tb.y(), -tb.x());
        Eigen::Vector2d g2; // d^2 gamma / dt^2
        for (int k = 0; k < 2; ++k) {
            double v = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) v += mj.R(k, a, b) * tb(a) * tb(b);
            v += mj.S(k, 0) * dtau(0) + mj.S(k, 1) * dtau(1);
            g2(k) = v;
        }
        const double speed = g1.norm();
        BoundaryFrame f;
        f.s = s;
        f.param = xp;
        f.point = to_physical(xp);
        f.tau = g1 / speed;
        f.n = {f.tau.y(), -f.tau.x()};
        f.curvature = (g1.x() * g2.y() - g1.y() * g2.x()) / (speed * speed * speed);
        return f;
    }

    void calibrate_map() {
        double sum = 0.0;
        int count = 0;
        bool flipped = false;
        const auto [lo, hi] = param_bbox();
        mean_abs_det_ = 1.0; // allow jacobian calls during calibration
        for (int i = 0; i <= 32; ++i)
            for (int j = 0; j <= 32; ++j) {
                Eigen::Vector2d xp(lo.x() + (hi.x() - lo.x()) * i / 32.0,
                                   lo.y() + (hi.y() - lo.y()) * j / 32.0);
                const DerivTable t1 = map_.phi1->derivs(xp, 1);
                const DerivTable t2 = map_.phi2->derivs(xp, 1);
                const double det =
                    t1.at(1, 0) * t2.at(0, 1) - t1.at(0, 1) * t2.at(1, 0);
                sum += std::abs(det);
                if (det < 0) flipped = true;
                ++count;
            }
        mean_abs_det_ = sum / count;
        if (!(mean_abs_det_ > 0))
            throw SingularMap("map jacobian vanishes on the calibration grid");
        if (flipped)
            throw SingularMap("map is orientation-reversing on part of the domain");
    }

    void build_arclength_table() {
        // Cumulative physical arclength over a fine base grid aligned with
        // the piece junctions. The speed is smooth inside each piece but has
        // derivative kinks at junctions, so no integration step may straddle
        // one; table nodes therefore include every junction parameter.
        const double L = base_length();
        const double target = L / 4096.0;
        table_t_.clear();
        table_s_.clear();
        table_t_.push_back(0.0);
        table_s_.push_back(0.0);
        // 4-point Gauss per step keeps the table error near machine level.
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                     0.6521451548625461, 0.3478548451374538};
        double acc = 0.0;
        for (const detail::CurvePiece& p : pieces_) {
            const int steps = std::max(1, int(std::lround(p.len / target)));
            for (int i = 0; i < steps; ++i) {
                const double ta = p.s0 + p.len * i / steps;
                const double tb = p.s0 + p.len * (i + 1) / steps;
                const double mid = 0.5 * (ta + tb), half = 0.5 * (tb - ta);
                double step = 0.0;
                for (int q = 0; q < 4; ++q)
                    step += gw[q] * boundary_speed(mid + half * gx[q]);
                acc += step * half;
                table_t_.push_back(tb);
                table_s_.push_back(acc);
            }
        }
        perimeter_ = acc;
    }

    double s_of_t(double t) const {
        if (kind_ != DomainKind::Mapped) return t;
        const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
        const int i = std::min<int>(std::max<int>(int(it - table_t_.begin()) - 1, 0),
                                    int(table_t_.size()) - 2);
        // One Gauss step from the table node to t.
        const double ta = table_t_[i];
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                     0.6521451548625461, 0.3478548451374538};
        const double mid = 0.5 * (ta + t), half = 0.5 * (t - ta);
        double step = 0.0;
        for (int q = 0; q < 4; ++q) step += gw[q] * boundary_speed(mid + half * gx[q]);
        return table_s_[i] + step * half;
    }

    double t_of_s(double s) const {
        if (kind_ != DomainKind::Mapped) return s;
        const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
        const int i = std::min<int>(std::max<int>(int(it - table_s_.begin()) - 1, 0),
                                    int(table_s_.size()) - 2);
        double t = table_t_[i] + (table_t_[i + 1] - table_t_[i]) *
                                     (s - table_s_[i]) /
                                     std::max(table_s_[i + 1] - table_s_[i], 1e-300);
        // Newton refinement on s(t) - s = 0 with s'(t) = speed.
        for (int iter = 0; iter < 4; ++iter) {
            const double f = s_of_t(t) - s;
            const double sp = boundary_speed(t);
            t -= f / sp;
        }
        return t;
    }

    DomainKind kind_ = DomainKind::Disk;
    double r0_ = 1.0;
    double M0_ = 0.0, M1_ = 0.0;
    detail::ConvexRegion region_;
    std::vector<detail::CurvePiece> pieces_;
    double perimeter_ = 0.0;
    MapSpec map_;
    double mean_abs_det_ = 1.0;
    std::vector<double> table_t_, table_s_;
};

// Free-function forms of the frame and jacobian queries.
inline BoundaryFrame boundary_frame(const Domain& dom, double s) {
    return dom.boundary_frame(s);
}
inline MapJacobians map_jacobians(const Domain& dom, const Eigen::Vector2d& xp) {
    return dom.map_jacobians(xp);
}

// Derivatives of a boundary trace with respect to arclength s and the
// outward normal n, from the cartesian derivative table.
struct SurfaceDerivs {
    double ws = 0.0, wn = 0.0;
    double wss = 0.0, wsn = 0.0, wnn = 0.0;
};

inline SurfaceDerivs surface_derivatives(const DerivTable& w, const BoundaryFrame& f) {
    SurfaceDerivs d;
    const Eigen::Vector2d g = w.gradient();
    const Eigen::Matrix2d H = w.hessian();
    d.ws = f.tau.dot(g);
    d.wn = f.n.dot(g);
    d.wnn = f.n.dot(H * f.n);
    d.wss = f.tau.dot(H * f.tau) - f.curvature * d.wn;
    d.wsn = f.tau.dot(H * f.n) + f.curvature * d.ws;
    return d;
}

// Reconstruction of the cartesian hessian from the surface derivatives,
// inverse of surface_derivatives on symmetric inputs.
inline Eigen::Matrix2d hessian_from_surface(const SurfaceDerivs& d, const BoundaryFrame& f) {
    const Eigen::Vector2d& t = f.tau;
    const Eigen::Vector2d& n = f.n;
    // dn/ds = K tau, dtau/ds = -K n.
    const Eigen::Vector2d n_s = f.curvature * t;
    const Eigen::Vector2d tau_s = -f.curvature * n;
    Eigen::Matrix2d H;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            H(a, b) = d.wss * t(a) * t(b) + d.wnn * n(a) * n(b) +
                      d.wsn * (t(a) * n(b) + t(b) * n(a)) +
                      d.ws * (t(a) * tau_s(b) - n(a) * n_s(b)) + d.wn * t(a) * n_s(b);
    return H;
}

inline Eigen::Vector2d gradient_from_surface(const SurfaceDerivs& d, const BoundaryFrame& f) {
    return d.wn * f.n + d.ws * f.tau;
}

} // namespace sgp
