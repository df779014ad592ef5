#pragma once

#include <utility>

#include "bivexp/series.hpp"

namespace bivexp {

struct LinearSolution {
    GridFunction y;
    GridFunction y_prime;
};

/// General solution of y'' + alpha y' + beta y = 0 with y(0) = y0 and
/// y'(0) = yp0: with f = -beta e^{P alpha} and g = e^{-P alpha},
///
///   y  = y0 C_{f,g} + yp0 S_{g,f}
///   y' = y0 g S_{f,g} + yp0 g C_{g,f}
///
/// The derivative comes from the series differential identities rather than
/// numerical differentiation, so it is exact at the series level. One bivexp
/// run per argument ordering serves both basis solutions.
inline LinearSolution linear_solve(const GridFunction& alpha, const GridFunction& beta,
                                   Complex y0, Complex yp0, double tol) {
    require_same_grid(alpha, beta, "linear_solve");
    const Grid& grid = alpha.grid();
    const int n = grid.n_nodes();
    const GridFunction pa = primitive(alpha);

    std::vector<Complex> fv(static_cast<size_t>(n)), gv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex e = std::exp(pa[i]);
        fv[static_cast<size_t>(i)] = -beta[i] * e;
        gv[static_cast<size_t>(i)] = 1.0 / e;
    }
    const GridFunction f(grid, std::move(fv));
    const GridFunction g(grid, std::move(gv));

    const BivexpResult fg = bivexp(f, g, tol);
    const BivexpResult gf = bivexp(g, f, tol);

    std::vector<Complex> yv(static_cast<size_t>(n)), ypv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        yv[static_cast<size_t>(i)] = y0 * fg.C[i] + yp0 * gf.S[i];
        ypv[static_cast<size_t>(i)] = g[i] * (y0 * fg.S[i] + yp0 * gf.C[i]);
    }
    return LinearSolution{GridFunction(grid, std::move(yv)),
                          GridFunction(grid, std::move(ypv))};
}

/// Defect of a candidate solution pair: fd(y') + alpha y' + beta y.
inline GridFunction linear_residual(const GridFunction& alpha, const GridFunction& beta,
                                    const GridFunction& y, const GridFunction& y_prime) {
    require_same_grid(alpha, beta, "linear_residual");
    require_same_grid(alpha, y, "linear_residual");
    require_same_grid(alpha, y_prime, "linear_residual");
    const GridFunction ypp = fd_derivative(y_prime);
    const int n = alpha.grid().n_nodes();
    std::vector<Complex> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = ypp[i] + alpha[i] * y_prime[i] + beta[i] * y[i];
    return GridFunction(alpha.grid(), std::move(out));
}

}  // namespace bivexp
