#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bivexp/matpath.hpp"
#include "bivexp/sphere.hpp"

namespace bivexp {

enum class SolutionKind {
    standard,   ///< finite at every node
    projective  ///< passes through infinity at one or more nodes
};

inline const char* to_string(SolutionKind k) {
    return k == SolutionKind::standard ? "standard" : "projective";
}

/// A sphere-valued path sampled on a grid: the value of a Riccati solution at
/// every node, with infinity as a first-class value. Classification is read
/// off the trajectory itself (the sampled singular curve is not a reliable
/// witness, the trajectory is).
struct SphereTrajectory {
    explicit SphereTrajectory(Grid g) : grid(g) {}

    Grid grid;
    std::vector<SpherePoint> points;
    std::vector<int> infinity_nodes;
    std::vector<double> chordal_steps;  ///< step[i] = dist(p[i-1], p[i]); step[0] = 0
    SolutionKind classification = SolutionKind::standard;
    double max_chordal_step = 0.0;
    SpherePoint y0;
    double tol = 0.0;
    double f_small_fraction = 0.0;  ///< fraction of nodes with |f| <= 1e-12 (diagnostic)

    SpherePoint at(int i) const { return points[static_cast<size_t>(i)]; }
    SpherePoint at_zero() const { return points[static_cast<size_t>(grid.zero_index())]; }
};

namespace detail {

inline SphereTrajectory trajectory_from_matrix(const MatPath& m, SpherePoint y0,
                                               double tol) {
    SphereTrajectory traj(m.grid);
    traj.y0 = y0;
    traj.tol = tol;
    const int n = m.grid.n_nodes();
    traj.points.reserve(static_cast<size_t>(n));
    traj.chordal_steps.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const SpherePoint p = mobius_apply(m.at(i), y0);
        if (p.is_infinity()) traj.infinity_nodes.push_back(i);
        traj.points.push_back(p);
        if (i > 0) {
            const double step = chordal_distance(traj.points[static_cast<size_t>(i - 1)],
                                                 traj.points[static_cast<size_t>(i)]);
            traj.chordal_steps[static_cast<size_t>(i)] = step;
            traj.max_chordal_step = std::max(traj.max_chordal_step, step);
        }
    }
    traj.classification = traj.infinity_nodes.empty() ? SolutionKind::standard
                                                      : SolutionKind::projective;
    return traj;
}

}  // namespace detail

/// Solves y' = f y^2 + g y + h, y(0) = y0 by applying the Mobius path of the
/// solution matrix to y0 at every node. Nodes where the quotient passes
/// through infinity are flagged and make the trajectory projective.
inline SphereTrajectory riccati_solve(const CoeffTriple& coeffs, SpherePoint y0,
                                      double tol, double det_tol = -1.0) {
    const MatPath m = solution_matrix(coeffs, tol, det_tol);
    SphereTrajectory traj = detail::trajectory_from_matrix(m, y0, tol);
    int small = 0;
    for (int i = 0; i < coeffs.f.size(); ++i)
        if (std::abs(coeffs.f[i]) <= 1e-12) ++small;
    traj.f_small_fraction = static_cast<double>(small) / coeffs.f.size();
    return traj;
}

/// Closed form for the case h = gamma^2 f e^{2Pg}:
///
///   y = gamma e^{Pg} tan( gamma P(e^{Pg} f) + atan(y0 / gamma) ).
///
/// Tangent poles map to infinity under the near-pole policy. When
/// y0 = +-(i gamma), the arctangent argument sits on the branch singularity
/// and the solution degenerates to the exact ray y = y0 e^{Pg}.
inline SphereTrajectory abel_closed_form(const GridFunction& f, const GridFunction& g,
                                         Complex gamma, Complex y0) {
    require_same_grid(f, g, "abel_closed_form");
    if (gamma == Complex(0.0))
        throw std::invalid_argument("abel_closed_form: gamma must be nonzero");
    const Grid& grid = f.grid();
    const int n = grid.n_nodes();
    const GridFunction pg = primitive(g);

    std::vector<Complex> scaled(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) scaled[static_cast<size_t>(i)] = std::exp(pg[i]) * f[i];
    std::vector<Complex> pf(static_cast<size_t>(n));
    detail::cumtrapz_anchored(grid, scaled, pf);

    SphereTrajectory traj(grid);
    traj.y0 = SpherePoint(y0);
    traj.points.reserve(static_cast<size_t>(n));
    traj.chordal_steps.assign(static_cast<size_t>(n), 0.0);

    const Complex ratio = y0 / gamma;
    const bool degenerate = std::abs(Complex(1.0) + ratio * ratio) <
                            1e-14 * (1.0 + std::norm(ratio));
    const Complex phase = degenerate ? Complex(0.0) : std::atan(ratio);

    for (int i = 0; i < n; ++i) {
        SpherePoint p;
        if (degenerate) {
            p = SpherePoint(y0 * std::exp(pg[i]));
        } else {
            const Complex w = gamma * pf[static_cast<size_t>(i)] + phase;
            const Complex s = std::sin(w);
            const Complex c = std::cos(w);
            const double as = std::abs(s);
            const double ac = std::abs(c);
            if (ac <= kPoleEps * (as + ac)) {
                p = SpherePoint::infinity();
            } else {
                p = SpherePoint(gamma * std::exp(pg[i]) * (s / c));
            }
        }
        if (p.is_infinity()) traj.infinity_nodes.push_back(i);
        traj.points.push_back(p);
        if (i > 0) {
            const double step = chordal_distance(traj.points[static_cast<size_t>(i - 1)],
                                                 traj.points[static_cast<size_t>(i)]);
            traj.chordal_steps[static_cast<size_t>(i)] = step;
            traj.max_chordal_step = std::max(traj.max_chordal_step, step);
        }
    }
    traj.classification = traj.infinity_nodes.empty() ? SolutionKind::standard
                                                      : SolutionKind::projective;
    return traj;
}

/// Nodewise cross ratio (y4 - y1)(y3 - y2) / ((y4 - y2)(y3 - y1)) of four
/// trajectories on one grid. Infinity is handled by the algebraic limit rule
/// (inf - a)/(inf - b) := 1: each infinite value cancels its numerator factor
/// against its denominator factor. With constants (0, inf, 1, z) in slots
/// 1..4 the result is z.
inline GridFunction cross_ratio(const SphereTrajectory& t1, const SphereTrajectory& t2,
                                const SphereTrajectory& t3, const SphereTrajectory& t4) {
    const SphereTrajectory* ts[4] = {&t1, &t2, &t3, &t4};
    for (int k = 1; k < 4; ++k)
        if (ts[k]->grid != ts[0]->grid)
            throw std::invalid_argument("cross_ratio: trajectories on different grids");
    const int z = ts[0]->grid.zero_index();
    for (int p = 0; p < 4; ++p)
        for (int q = p + 1; q < 4; ++q)
            if (ts[p]->points[static_cast<size_t>(z)] == ts[q]->points[static_cast<size_t>(z)])
                throw std::invalid_argument(
                    "cross_ratio: trajectories " + std::to_string(p + 1) + " and " +
                    std::to_string(q + 1) + " coincide at node 0");

    const int n = ts[0]->grid.n_nodes();
    std::vector<Complex> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SpherePoint& y1 = t1.points[static_cast<size_t>(i)];
        const SpherePoint& y2 = t2.points[static_cast<size_t>(i)];
        const SpherePoint& y3 = t3.points[static_cast<size_t>(i)];
        const SpherePoint& y4 = t4.points[static_cast<size_t>(i)];
        // Factors: n1 = y4-y1, n2 = y3-y2, d1 = y4-y2, d2 = y3-y1. A point at
        // infinity appears in exactly one numerator and one denominator
        // factor; that pair contributes 1.
        Complex num(1.0), den(1.0);
        const bool i1 = y1.is_infinity(), i2 = y2.is_infinity();
        const bool i3 = y3.is_infinity(), i4 = y4.is_infinity();
        if (!i4 && !i1) num *= y4.value() - y1.value();
        if (!i3 && !i2) num *= y3.value() - y2.value();
        if (!i4 && !i2) den *= y4.value() - y2.value();
        if (!i3 && !i1) den *= y3.value() - y1.value();
        out[static_cast<size_t>(i)] = num / den;
    }
    return GridFunction(ts[0]->grid, std::move(out));
}

/// Conjugacy transport of coefficients: forms m1 = [[g/2, h], [-f, -g/2]]
/// nodewise, conjugates m2 = J m1 J^{-1}, and reads the new triple off m2.
/// Solutions of the conjugated equation are phi_J of the originals.
inline CoeffTriple conjugate_coeffs(const Mat2& J, const CoeffTriple& coeffs) {
    if (J.det() == Complex(0.0))
        throw std::invalid_argument("conjugate_coeffs: singular J");
    const Mat2 Jinv = J.inverse();
    const Grid& grid = coeffs.grid();
    const int n = grid.n_nodes();
    std::vector<Complex> fv(static_cast<size_t>(n)), gv(static_cast<size_t>(n)),
        hv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Mat2 m1{0.5 * coeffs.g[i], coeffs.h[i], -coeffs.f[i], -0.5 * coeffs.g[i]};
        const Mat2 m2 = J * m1 * Jinv;
        // m2 is traceless up to rounding; g is read symmetrically.
        fv[static_cast<size_t>(i)] = -m2.c;
        gv[static_cast<size_t>(i)] = m2.a - m2.d;
        hv[static_cast<size_t>(i)] = m2.b;
    }
    return CoeffTriple(GridFunction(grid, std::move(fv)),
                       GridFunction(grid, std::move(gv)),
                       GridFunction(grid, std::move(hv)));
}

}  // namespace bivexp
