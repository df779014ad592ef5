#pragma once

#include <cmath>
#include <vector>

#include "bivexp/series.hpp"

namespace bivexp {

// Gamma function values embedded as 30-digit literals (cross-checked in the
// test suite against a Lanczos evaluation).
inline constexpr double kGamma13 = 2.67893853470774763365569294097;  // Gamma(1/3)
inline constexpr double kGamma23 = 1.35411793942640041694528802815;  // Gamma(2/3)

struct AiryValues {
    double x;
    Complex Ai, Bi, u1, u2;
};

/// Airy functions on a grid, built from the two series bases of u'' = x u:
/// u1 = C_{x,1} (u1(0)=1, u1'(0)=0) and u2 = S_{1,x} (u2(0)=0, u2'(0)=1),
/// combined with the classical values at the origin:
///
///   Ai = u1 / (3^{2/3} Gamma(2/3)) - u2 / (3^{1/3} Gamma(1/3))
///   Bi = u1 / (3^{1/6} Gamma(2/3)) + 3^{1/6} u2 / Gamma(1/3)
///
/// Derivatives come from the series identities: u1' = S_{x,1}, u2' = C_{1,x}.
struct AiryTable {
    Grid grid;
    GridFunction u1, u2, u1_prime, u2_prime;
    GridFunction Ai, Bi, Ai_prime, Bi_prime;
    int terms_used = 0;
    double tail_bound = 0.0;

    std::vector<AiryValues> rows() const {
        std::vector<AiryValues> out;
        out.reserve(static_cast<size_t>(grid.n_nodes()));
        for (int i = 0; i < grid.n_nodes(); ++i)
            out.push_back(AiryValues{grid.node(i), Ai[i], Bi[i], u1[i], u2[i]});
        return out;
    }
};

inline AiryTable airy(const Grid& grid, double tol) {
    const GridFunction fx = sample(std::function<Complex(double)>(
                                       [](double x) { return Complex(x, 0.0); }),
                                   grid);
    const GridFunction one = GridFunction::constant(grid, Complex(1.0));

    const BivexpResult x1 = bivexp(fx, one, tol);   // C_{x,1}, S_{x,1}
    const BivexpResult ox = bivexp(one, fx, tol);   // C_{1,x}, S_{1,x}

    const double c_ai1 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * kGamma23);
    const double c_ai2 = 1.0 / (std::pow(3.0, 1.0 / 3.0) * kGamma13);
    const double c_bi1 = 1.0 / (std::pow(3.0, 1.0 / 6.0) * kGamma23);
    const double c_bi2 = std::pow(3.0, 1.0 / 6.0) / kGamma13;

    const int n = grid.n_nodes();
    std::vector<Complex> ai(static_cast<size_t>(n)), bi(static_cast<size_t>(n)),
        aip(static_cast<size_t>(n)), bip(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex u1 = x1.C[i];
        const Complex u2 = ox.S[i];
        const Complex u1p = x1.S[i];
        const Complex u2p = ox.C[i];
        ai[static_cast<size_t>(i)] = c_ai1 * u1 - c_ai2 * u2;
        bi[static_cast<size_t>(i)] = c_bi1 * u1 + c_bi2 * u2;
        aip[static_cast<size_t>(i)] = c_ai1 * u1p - c_ai2 * u2p;
        bip[static_cast<size_t>(i)] = c_bi1 * u1p + c_bi2 * u2p;
    }

    return AiryTable{grid,
                     x1.C,
                     ox.S,
                     x1.S,
                     ox.C,
                     GridFunction(grid, std::move(ai)),
                     GridFunction(grid, std::move(bi)),
                     GridFunction(grid, std::move(aip)),
                     GridFunction(grid, std::move(bip)),
                     std::max(x1.terms_used, ox.terms_used),
                     std::max(x1.tail_bound, ox.tail_bound)};
}

}  // namespace bivexp
