#pragma once

#include "bivexp/linear2.hpp"

namespace bivexp {

/// Solves -y'' + q y = lambda y with y(0) = y0, y'(0) = yp0 by delegating to
/// the second-order solver with alpha = 0, beta = lambda - q; equivalently
/// y = y0 C_{q-lambda,1} + yp0 S_{1,q-lambda}.
inline LinearSolution schrodinger_solve(const GridFunction& q, Complex lambda,
                                        Complex y0, Complex yp0, double tol) {
    const Grid& grid = q.grid();
    const int n = grid.n_nodes();
    std::vector<Complex> beta(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) beta[static_cast<size_t>(i)] = lambda - q[i];
    return linear_solve(GridFunction::zero(grid), GridFunction(grid, std::move(beta)),
                        y0, yp0, tol);
}

}  // namespace bivexp
