// quadrature.hpp
//
// Quadrature rules over the domain and its boundary, aligned with a tensor
// grid of spline breakpoints. Interior cells receive tensor Gauss rules;
// cells cut by the curved boundary are integrated by a vertical-slab scan
// with a trigonometric substitution on arc pieces, so the integrand stays
// smooth on every panel. Boundary rules use Gauss panels split exactly at
// knot-line crossings and curve-piece junctions.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sgplate/gauss.hpp"
#include "sgplate/geometry.hpp"

namespace sgp {

struct CellQuadPoint {
    Eigen::Vector2d xp; // parametric point (spline evaluation)
    Eigen::Vector2d x;  // physical point
    double w;           // physical weight
};

struct CellRule {
    int ix = 0, iy = 0;
    bool cut = false;
    std::vector<CellQuadPoint> pts;
};

struct BoundaryQuadPoint {
    BoundaryFrame frame;
    double w; // physical arclength weight
};

namespace detail {

inline double dist_outside_core(double lo, double hi, double core_lo, double core_hi) {
    return std::max({core_lo - hi, lo - core_hi, 0.0});
}

// Minimum and maximum distance classification of a cell against the region.
enum class CellClass { Empty, Full, Cut };

inline CellClass classify_cell(const ConvexRegion& reg, double xlo, double xhi, double ylo,
                               double yhi) {
    if (reg.is_disk) {
        const double gx = dist_outside_core(xlo, xhi, 0.0, 0.0);
        const double gy = dist_outside_core(ylo, yhi, 0.0, 0.0);
        if (gx * gx + gy * gy >= reg.R * reg.R) return CellClass::Empty;
        double worst = 0.0;
        for (double cx : {xlo, xhi})
            for (double cy : {ylo, yhi}) worst = std::max(worst, cx * cx + cy * cy);
        return worst <= reg.R * reg.R ? CellClass::Full : CellClass::Cut;
    }
    const double cx_lo = -(reg.hx - reg.rc), cx_hi = reg.hx - reg.rc;
    const double cy_lo = -(reg.hy - reg.rc), cy_hi = reg.hy - reg.rc;
    const double gx = dist_outside_core(xlo, xhi, cx_lo, cx_hi);
    const double gy = dist_outside_core(ylo, yhi, cy_lo, cy_hi);
    if (gx * gx + gy * gy >= reg.rc * reg.rc) return CellClass::Empty;
    bool all_in = true;
    for (double px : {xlo, xhi})
        for (double py : {ylo, yhi}) {
            const double dx = std::max({cx_lo - px, px - cx_hi, 0.0});
            const double dy = std::max({cy_lo - py, py - cy_hi, 0.0});
            if (dx * dx + dy * dy > reg.rc * reg.rc) all_in = false;
        }
    return all_in ? CellClass::Full : CellClass::Cut;
}

} // namespace detail

// Quadrature rules for every nonempty cell of the breakpoint grid. Cells
// with empty intersection are omitted entirely.
inline std::vector<CellRule> domain_cell_rules(const Domain& dom, const std::vector<double>& bx,
                                               const std::vector<double>& by, int n1d) {
    if (n1d < 1 || n1d > 40) throw OutOfRange("domain_cell_rules: points per direction");
    const detail::ConvexRegion& reg = dom.param_region();
    const bool mapped = dom.kind() == DomainKind::Mapped;
    const QuadRule1 g1 = gauss_legendre(n1d);
    const QuadRule1 g_in = gauss_legendre(n1d + 2);
    const QuadRule1 g_out = gauss_legendre(n1d + 8);

    auto push_point = [&](CellRule& rule, double px, double py, double w) {
        CellQuadPoint q;
        q.xp = {px, py};
        if (mapped) {
            q.x = dom.to_physical(q.xp);
            q.w = w * std::abs(dom.map_jacobians(q.xp).S.determinant());
        } else {
            q.x = q.xp;
            q.w = w;
        }
        rule.pts.push_back(q);
    };

    std::vector<CellRule> rules;
    for (std::size_t i = 0; i + 1 < bx.size(); ++i)
        for (std::size_t j = 0; j + 1 < by.size(); ++j) {
            const double xlo = bx[i], xhi = bx[i + 1];
            const double ylo = by[j], yhi = by[j + 1];
            const detail::CellClass cls = detail::classify_cell(reg, xlo, xhi, ylo, yhi);
            if (cls == detail::CellClass::Empty) continue;

            CellRule rule;
            rule.ix = int(i);
            rule.iy = int(j);

            if (cls == detail::CellClass::Full) {
                const double mx = 0.5 * (xlo + xhi), hx = 0.5 * (xhi - xlo);
                const double my = 0.5 * (ylo + yhi), hy = 0.5 * (yhi - ylo);
                for (int a = 0; a < n1d; ++a)
                    for (int b = 0; b < n1d; ++b)
                        push_point(rule, mx + hx * g1.x[a], my + hy * g1.x[b],
                                   hx * hy * g1.w[a] * g1.w[b]);
            } else {
                rule.cut = true;
                // Slab breakpoints: cell edges, boundary-piece transitions,
                // and crossings of the boundary with the cell's y-lines.
                std::vector<double> breaks = reg.slab_breaks(ylo, yhi);
                breaks.push_back(xlo);
                breaks.push_back(xhi);
                const double sx_lo = std::max(xlo, reg.x_min());
                const double sx_hi = std::min(xhi, reg.x_max());
                std::vector<double> bs;
                for (double v : breaks)
                    if (v > sx_lo - 1e-14 && v < sx_hi + 1e-14)
                        bs.push_back(std::clamp(v, sx_lo, sx_hi));
                bs.push_back(sx_lo);
                bs.push_back(sx_hi);
                std::sort(bs.begin(), bs.end());
                bs.erase(std::unique(bs.begin(), bs.end(),
                                     [](double a, double b) { return b - a < 1e-13; }),
                         bs.end());

                for (std::size_t k = 0; k + 1 < bs.size(); ++k) {
                    const double xa = bs[k], xb = bs[k + 1];
                    if (xb - xa < 1e-13) continue;
                    const double xm = 0.5 * (xa + xb);
                    const auto [rlo_m, rhi_m] = reg.ybounds(xm);
                    if (std::min(yhi, rhi_m) - std::max(ylo, rlo_m) < 1e-14) continue;

                    // Within a slab the active bound formula never switches
                    // (crossings are breakpoints), so the pointwise min/max
                    // picks one smooth branch; tangency slabs are handled
                    // correctly because the curve bound stays active there.
                    double cx = 0.0, cr = 0.0;
                    const bool use_arc = reg.arc_at(xm, cx, cr);

                    auto column = [&](double xq, double wq) {
                        const auto [qlo, qhi] = reg.ybounds(xq);
                        const double lo = std::max(ylo, qlo);
                        const double hi = std::min(yhi, qhi);
                        if (hi - lo <= 0) return;
                        const double my = 0.5 * (lo + hi), hy = 0.5 * (hi - lo);
                        for (int b = 0; b < int(g_in.x.size()); ++b)
                            push_point(rule, xq, my + hy * g_in.x[b], wq * hy * g_in.w[b]);
                    };

                    if (use_arc) {
                        // Substitute x = cx + cr cos(t); the slab endpoints
                        // map to decreasing t, and the sin factor removes
                        // the square-root behavior at tangency.
                        const double ta =
                            std::acos(std::clamp((xb - cx) / cr, -1.0, 1.0));
                        const double tb = std::acos(std::clamp((xa - cx) / cr, -1.0, 1.0));
                        const double mt = 0.5 * (ta + tb), ht = 0.5 * (tb - ta);
                        for (int a = 0; a < int(g_out.x.size()); ++a) {
                            const double t = mt + ht * g_out.x[a];
                            const double xq = cx + cr * std::cos(t);
                            const double wq = ht * g_out.w[a] * cr * std::sin(t);
                            column(xq, wq);
                        }
                    } else {
                        const double mx = 0.5 * (xa + xb), hx = 0.5 * (xb - xa);
                        for (int a = 0; a < int(g_out.x.size()); ++a)
                            column(mx + hx * g_out.x[a], hx * g_out.w[a]);
                    }
                }
            }
            if (!rule.pts.empty()) rules.push_back(std::move(rule));
        }
    return rules;
}

namespace detail {

// Base-curve parameters where the boundary crosses any grid line, plus the
// piece junctions. All crossings are solved in closed form.
inline std::vector<double> boundary_breakparams(const Domain& dom, const std::vector<double>& bx,
                                                const std::vector<double>& by) {
    const double L = dom.base_length();
    std::vector<double> ts;
    for (const CurvePiece& p : dom.base_pieces()) {
        ts.push_back(p.s0);
        if (!p.is_arc) {
            auto add_line = [&](double coord, double start, double dir) {
                if (std::abs(dir) < 1e-15) return;
                const double t = p.s0 + (coord - start) / dir;
                if (t > p.s0 + 1e-13 && t < p.s0 + p.len - 1e-13) ts.push_back(t);
            };
            for (double v : bx) add_line(v, p.start.x(), p.dir.x());
            for (double v : by) add_line(v, p.start.y(), p.dir.y());
        } else {
            const double phi1 = p.phi0 + p.len / p.radius;
            auto add_phi = [&](double phi) {
                // Shift phi by whole turns into [phi0, phi1].
                double q = phi;
                while (q < p.phi0 - 1e-13) q += 2 * M_PI;
                while (q > p.phi0 + 2 * M_PI) q -= 2 * M_PI;
                for (double cand : {q, q - 2 * M_PI}) {
                    if (cand > p.phi0 + 1e-13 && cand < phi1 - 1e-13)
                        ts.push_back(p.s0 + (cand - p.phi0) * p.radius);
                }
            };
            for (double v : bx) {
                const double c = (v - p.center.x()) / p.radius;
                if (std::abs(c) < 1.0) {
                    add_phi(std::acos(c));
                    add_phi(-std::acos(c));
                }
            }
            for (double v : by) {
                const double c = (v - p.center.y()) / p.radius;
                if (std::abs(c) < 1.0) {
                    add_phi(std::asin(c));
                    add_phi(M_PI - std::asin(c));
                }
            }
        }
    }
    for (double& t : ts) t = std::clamp(t, 0.0, L);
    ts.push_back(0.0);
    ts.push_back(L);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return b - a < 1e-12; }),
             ts.end());
    return ts;
}

} // namespace detail

// Boundary quadrature with panels split at knot-line crossings and piece
// junctions. Node weights carry the physical arclength measure.
inline std::vector<BoundaryQuadPoint> boundary_quadrature(const Domain& dom,
                                                          const std::vector<double>& bx,
                                                          const std::vector<double>& by,
                                                          int n_per_panel) {
    if (n_per_panel < 1 || n_per_panel > 40)
        throw OutOfRange("boundary_quadrature: points per panel");
    const std::vector<double> ts = detail::boundary_breakparams(dom, bx, by);
    const QuadRule1 g = gauss_legendre(n_per_panel);
    std::vector<BoundaryQuadPoint> nodes;
    nodes.reserve((ts.size() - 1) * g.x.size());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double ta = ts[k], tb = ts[k + 1];
        if (tb - ta < 1e-12) continue;
        const double mt = 0.5 * (ta + tb), ht = 0.5 * (tb - ta);
        for (int a = 0; a < int(g.x.size()); ++a) {
            const double t = mt + ht * g.x[a];
            BoundaryQuadPoint q;
            q.frame = dom.frame_at_base(t);
            q.w = ht * g.w[a] * dom.boundary_speed(t);
            nodes.push_back(q);
        }
    }
    return nodes;
}

// Plain integral of the constant 1 over the domain through the cell rules
// (area check helper).
inline double domain_area(const Domain& dom, const std::vector<double>& bx,
                          const std::vector<double>& by, int n1d) {
    double a = 0.0;
    for (const CellRule& c : domain_cell_rules(dom, bx, by, n1d))
        for (const CellQuadPoint& q : c.pts) a += q.w;
    return a;
}

} // namespace sgp
