#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

#include "bivexp/grid.hpp"
#include "bivexp/mat2.hpp"
#include "bivexp/series.hpp"

namespace bivexp {

/// Coefficient triple (f, g, h) of the Riccati equation y' = f y^2 + g y + h,
/// sampled on one shared grid.
struct CoeffTriple {
    GridFunction f;
    GridFunction g;
    GridFunction h;

    CoeffTriple(GridFunction f_, GridFunction g_, GridFunction h_)
        : f(std::move(f_)), g(std::move(g_)), h(std::move(h_)) {
        require_same_grid(f, g, "CoeffTriple");
        require_same_grid(f, h, "CoeffTriple");
    }

    const Grid& grid() const { return f.grid(); }
};

/// Grid-indexed path of 2x2 matrices M(x). Paths produced by solution_matrix
/// satisfy M(0) = I exactly and det M = 1 within det_tol at every node;
/// trace-lifted paths carry unimodular = false and skip the det check.
struct MatPath {
    Grid grid;
    GridFunction a, b, c, d;
    bool unimodular = true;
    double det_tol = 0.0;           ///< tolerance the det invariant was checked at
    double max_det_residual = 0.0;  ///< max |det - 1| observed (unimodular paths)

    Mat2 at(int i) const { return Mat2{a[i], b[i], c[i], d[i]}; }

    GridFunction det() const {
        std::vector<Complex> v(static_cast<size_t>(a.size()));
        for (int i = 0; i < a.size(); ++i)
            v[static_cast<size_t>(i)] = a[i] * d[i] - b[i] * c[i];
        return GridFunction(grid, std::move(v));
    }
};

/// The solution matrix psi(f,g,h): with F = -e^{Pg} f and H = e^{-Pg} h,
///
///   M = [ e^{Pg/2} C_{F,H}   e^{Pg/2} S_{H,F} ]
///       [ e^{-Pg/2} S_{F,H}  e^{-Pg/2} C_{H,F} ]
///
/// solves M' = [[g/2, h], [-f, -g/2]] M with M(0) = I and det M = 1.
/// The two series runs use swapped argument orders; their ladders differ
/// structurally from the first term on, so no work is shared between them.
///
/// det_tol < 0 selects the default 100 * tol. A det residual beyond det_tol
/// aborts with the worst node reported; that signals the grid is too coarse
/// for the requested tolerance.
inline MatPath solution_matrix(const GridFunction& f, const GridFunction& g,
                               const GridFunction& h, double tol,
                               double det_tol = -1.0) {
    require_same_grid(f, g, "solution_matrix");
    require_same_grid(f, h, "solution_matrix");
    if (!(tol > 0.0)) throw std::invalid_argument("solution_matrix: tol must be > 0");
    if (det_tol < 0.0) det_tol = 100.0 * tol;

    const Grid& grid = f.grid();
    const GridFunction pg = primitive(g);
    const int n = grid.n_nodes();

    std::vector<Complex> fv(static_cast<size_t>(n)), hv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex e = std::exp(pg[i]);
        fv[static_cast<size_t>(i)] = -e * f[i];
        hv[static_cast<size_t>(i)] = h[i] / e;
    }
    const GridFunction F(grid, std::move(fv));
    const GridFunction H(grid, std::move(hv));

    const BivexpResult fh = bivexp(F, H, tol);
    const BivexpResult hf = bivexp(H, F, tol);

    std::vector<Complex> av(static_cast<size_t>(n)), bv(static_cast<size_t>(n)),
        cv(static_cast<size_t>(n)), dv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex eh = std::exp(0.5 * pg[i]);
        av[static_cast<size_t>(i)] = eh * fh.C[i];
        bv[static_cast<size_t>(i)] = eh * hf.S[i];
        cv[static_cast<size_t>(i)] = fh.S[i] / eh;
        dv[static_cast<size_t>(i)] = hf.C[i] / eh;
    }

    MatPath m{grid, GridFunction(grid, std::move(av)), GridFunction(grid, std::move(bv)),
              GridFunction(grid, std::move(cv)), GridFunction(grid, std::move(dv)),
              true, det_tol, 0.0};

    double worst = 0.0;
    int worst_node = 0;
    for (int i = 0; i < n; ++i) {
        const double r = std::abs(m.a[i] * m.d[i] - m.b[i] * m.c[i] - Complex(1.0));
        if (r > worst) {
            worst = r;
            worst_node = i;
        }
    }
    m.max_det_residual = worst;
    if (worst > det_tol) {
        char msg[256];
        std::snprintf(msg, sizeof(msg),
                      "solution_matrix: det residual %.3g at node %d (x = %g) "
                      "exceeds det_tol %.3g; refine the grid or relax the tolerance",
                      worst, worst_node, grid.node(worst_node), det_tol);
        throw std::runtime_error(msg);
    }
    return m;
}

inline MatPath solution_matrix(const CoeffTriple& coeffs, double tol,
                               double det_tol = -1.0) {
    return solution_matrix(coeffs.f, coeffs.g, coeffs.h, tol, det_tol);
}

/// Lifts a traceless solve to an arbitrary coefficient matrix: given M with
/// M' = m M and a trace function, N = e^{P(trace)/2} M solves N' = n N for
/// n = m + (trace/2) I. det N = e^{P trace}, so the result is returned with
/// the unimodular flag cleared and no det check.
inline MatPath trace_lift(const MatPath& m, const GridFunction& trace) {
    if (m.grid != trace.grid())
        throw std::invalid_argument("trace_lift: trace on a different grid");
    const GridFunction pt = primitive(trace);
    const int n = m.grid.n_nodes();
    std::vector<Complex> av(static_cast<size_t>(n)), bv(static_cast<size_t>(n)),
        cv(static_cast<size_t>(n)), dv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex e = std::exp(0.5 * pt[i]);
        av[static_cast<size_t>(i)] = e * m.a[i];
        bv[static_cast<size_t>(i)] = e * m.b[i];
        cv[static_cast<size_t>(i)] = e * m.c[i];
        dv[static_cast<size_t>(i)] = e * m.d[i];
    }
    return MatPath{m.grid, GridFunction(m.grid, std::move(av)),
                   GridFunction(m.grid, std::move(bv)),
                   GridFunction(m.grid, std::move(cv)),
                   GridFunction(m.grid, std::move(dv)), false, 0.0, 0.0};
}

/// Recovers the Riccati coefficients from an identity-anchored unimodular
/// path: f = c d' - c' d, g = 2(a' d - b' c), h = a b' - a' b, with entrywise
/// second-order finite differences standing in for the exact derivatives.
inline CoeffTriple coeffs_from_matrix(const MatPath& m) {
    const GridFunction ap = fd_derivative(m.a);
    const GridFunction bp = fd_derivative(m.b);
    const GridFunction cp = fd_derivative(m.c);
    const GridFunction dp = fd_derivative(m.d);
    const int n = m.grid.n_nodes();
    std::vector<Complex> fv(static_cast<size_t>(n)), gv(static_cast<size_t>(n)),
        hv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        fv[static_cast<size_t>(i)] = m.c[i] * dp[i] - cp[i] * m.d[i];
        gv[static_cast<size_t>(i)] = 2.0 * (ap[i] * m.d[i] - bp[i] * m.c[i]);
        hv[static_cast<size_t>(i)] = m.a[i] * bp[i] - ap[i] * m.b[i];
    }
    return CoeffTriple(GridFunction(m.grid, std::move(fv)),
                       GridFunction(m.grid, std::move(gv)),
                       GridFunction(m.grid, std::move(hv)));
}

}  // namespace bivexp
