#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bivexp/riccati.hpp"

namespace bivexp {

/// Finite differences are meaningless across a pole, so reconstruction skips
/// this many nodes on each side of every infinity crossing.
inline constexpr int kMiuraPoleBuffer = 3;

struct MiuraScanEntry {
    double y0;
    SolutionKind classification;
};

/// Result of inverting alpha |-> alpha^2 + alpha' for a given q: the
/// pre-image trajectory, its reconstruction q ~ alpha^2 + alpha' on the nodes
/// where it is defined (interior, finite, and outside the pole buffer), and
/// optionally a classification scan over initial values.
struct MiuraResult {
    SphereTrajectory alpha;
    GridFunction q_reconstructed;           ///< zero where recon_valid is 0
    std::vector<std::uint8_t> recon_valid;  ///< one flag per node
    std::vector<MiuraScanEntry> singular_scan;
};

namespace detail {

inline void require_real(const GridFunction& q, const char* who) {
    for (int i = 0; i < q.size(); ++i)
        if (std::abs(q[i].imag()) > 1e-12)
            throw std::invalid_argument(std::string(who) +
                                        ": q must be real valued (node " +
                                        std::to_string(i) + " has imaginary part)");
}

inline SphereTrajectory miura_trajectory(const GridFunction& q, double y0, double tol) {
    const Grid& grid = q.grid();
    const CoeffTriple coeffs(GridFunction::constant(grid, Complex(-1.0)),
                             GridFunction::zero(grid), q);
    return riccati_solve(coeffs, SpherePoint(Complex(y0, 0.0)), tol);
}

}  // namespace detail

/// Inverts the Miura transform through the Riccati equation y' = q - y^2:
/// alpha is the trajectory from y(0) = y0, and q_reconstructed = alpha^2 +
/// alpha' wherever a central difference can be formed away from poles.
inline MiuraResult miura_invert(const GridFunction& q, double y0, double tol) {
    detail::require_real(q, "miura_invert");
    const Grid& grid = q.grid();
    const int n = grid.n_nodes();
    SphereTrajectory alpha = detail::miura_trajectory(q, y0, tol);

    std::vector<std::uint8_t> finite(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        finite[static_cast<size_t>(i)] = alpha.points[static_cast<size_t>(i)].is_infinity() ? 0 : 1;

    std::vector<std::uint8_t> valid(static_cast<size_t>(n), 0);
    for (int i = 1; i + 1 < n; ++i) {
        bool ok = true;
        for (int k = std::max(0, i - kMiuraPoleBuffer);
             k <= std::min(n - 1, i + kMiuraPoleBuffer) && ok; ++k)
            ok = finite[static_cast<size_t>(k)] != 0;
        valid[static_cast<size_t>(i)] = ok ? 1 : 0;
    }

    const double h = grid.spacing();
    std::vector<Complex> recon(static_cast<size_t>(n), Complex(0.0));
    for (int i = 1; i + 1 < n; ++i) {
        if (!valid[static_cast<size_t>(i)]) continue;
        const Complex am = alpha.points[static_cast<size_t>(i - 1)].value();
        const Complex a0 = alpha.points[static_cast<size_t>(i)].value();
        const Complex ap = alpha.points[static_cast<size_t>(i + 1)].value();
        recon[static_cast<size_t>(i)] = a0 * a0 + (ap - am) / (2.0 * h);
    }

    return MiuraResult{std::move(alpha), GridFunction(grid, std::move(recon)),
                       std::move(valid), {}};
}

/// Classifies the trajectory for each initial value sample. For real q the
/// standard initial values form a connected interval, so the standard entries
/// are expected to be contiguous in sample order.
inline std::vector<MiuraScanEntry> miura_singular_scan(const GridFunction& q,
                                                       std::span<const double> y0_samples,
                                                       double tol) {
    detail::require_real(q, "miura_singular_scan");
    std::vector<MiuraScanEntry> out;
    out.reserve(y0_samples.size());
    for (double y0 : y0_samples)
        out.push_back(MiuraScanEntry{
            y0, detail::miura_trajectory(q, y0, tol).classification});
    return out;
}

/// True when the standard-classified entries form one contiguous block in
/// sample order (vacuously true when none are standard).
inline bool scan_contiguous(const std::vector<MiuraScanEntry>& scan) {
    int first = -1, last = -1;
    for (int i = 0; i < static_cast<int>(scan.size()); ++i) {
        if (scan[static_cast<size_t>(i)].classification == SolutionKind::standard) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return true;
    for (int i = first; i <= last; ++i)
        if (scan[static_cast<size_t>(i)].classification != SolutionKind::standard)
            return false;
    return true;
}

/// Bisects on y0 between a standard and a projective initial value to refine
/// the boundary of the standard interval. Returns the midpoint after the
/// requested number of steps.
inline double refine_standard_boundary(const GridFunction& q, double y0_standard,
                                       double y0_projective, double tol,
                                       int steps = 20) {
    detail::require_real(q, "refine_standard_boundary");
    double lo = y0_standard, hi = y0_projective;
    for (int s = 0; s < steps; ++s) {
        const double mid = 0.5 * (lo + hi);
        if (detail::miura_trajectory(q, mid, tol).classification == SolutionKind::standard)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace bivexp
