#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bivexp/grid.hpp"

namespace bivexp {

inline constexpr int kDefaultTermCap = 400;

/// Output of the bivariate exponential operator: E = C + S together with the
/// number of series terms summed and the certified bound on the discarded
/// tail. E(0) = C(0) = 1 and S(0) = 0 hold exactly by construction.
struct BivexpResult {
    GridFunction E;
    GridFunction C;
    GridFunction S;
    int terms_used = 0;      ///< J: terms A_1..A_J entered the sum
    double tail_bound = 0.0; ///< e^t t^{J+1}/(J+1)!, valid at every node
    double t_bound = 0.0;    ///< t = max over nodes of |P(|f|+|g|)|

    /// Retained second sign run E_{-f,-g}; present only in two-run mode.
    std::optional<GridFunction> e_minus;
};

enum class BivexpMode {
    parity,  ///< C sums even-index terms, S odd-index terms (single ladder)
    two_run  ///< C, S assembled from the ladders for (f,g) and (-f,-g)
};

namespace detail {

/// Kahan-compensated accumulator array for one running sum per node.
class CompensatedSum {
public:
    explicit CompensatedSum(size_t n, Complex init = Complex(0.0))
        : sum_(n, init), comp_(n, Complex(0.0)) {}

    void add(std::span<const Complex> term) {
        for (size_t i = 0; i < sum_.size(); ++i) {
            const Complex y = term[i] - comp_[i];
            const Complex t = sum_[i] + y;
            comp_[i] = (t - sum_[i]) - y;
            sum_[i] = t;
        }
    }

    std::vector<Complex> take() && { return std::move(sum_); }

private:
    std::vector<Complex> sum_;
    std::vector<Complex> comp_;
};

/// Smallest J with e^t t^{J+1}/(J+1)! < tol, evaluated in log space.
/// Throws when J would exceed the cap: the series is entire, but summing
/// enormous alternating terms in double precision loses all accuracy, so the
/// caller must refine the interval instead.
inline int choose_term_count(double t, double tol, int cap) {
    if (!(tol > 0.0)) throw std::invalid_argument("bivexp: tol must be > 0");
    if (t == 0.0) return 0;
    const double log_tol = std::log(tol);
    for (int J = 0; J <= cap; ++J) {
        const double log_tail = t + (J + 1) * std::log(t) - std::lgamma(J + 2.0);
        if (log_tail < log_tol) return J;
    }
    throw std::runtime_error(
        "bivexp: term count exceeds cap " + std::to_string(cap) +
        " (t = " + std::to_string(t) +
        "); refine the interval or split the domain");
}

inline double max_primitive_abs_sum(const GridFunction& f, const GridFunction& g) {
    const Grid& grid = f.grid();
    std::vector<Complex> abssum(static_cast<size_t>(grid.n_nodes()));
    for (int i = 0; i < grid.n_nodes(); ++i)
        abssum[static_cast<size_t>(i)] = Complex(std::abs(f[i]) + std::abs(g[i]), 0.0);
    std::vector<Complex> p(abssum.size());
    cumtrapz_anchored(grid, abssum, p);
    double t = 0.0;
    for (const Complex& z : p) t = std::max(t, std::abs(z.real()));
    return t;
}

}  // namespace detail

/// The iterated-integral terms A_1..A_J of the bivariate exponential ladder:
/// A_0 = 1, B_j = f A_{j-1} for odd j and g A_{j-1} for even j, A_j = P(B_j).
/// The oriented primitive carries the sign convention on the negative axis.
inline std::vector<GridFunction> series_terms(const GridFunction& f,
                                              const GridFunction& g, int J) {
    require_same_grid(f, g, "series_terms");
    if (J < 1) throw std::invalid_argument("series_terms: J must be >= 1");
    const Grid& grid = f.grid();
    const size_t n = static_cast<size_t>(grid.n_nodes());
    std::vector<GridFunction> terms;
    terms.reserve(static_cast<size_t>(J));
    std::vector<Complex> prev(n, Complex(1.0));  // A_0
    std::vector<Complex> b(n), a(n);
    for (int j = 1; j <= J; ++j) {
        const GridFunction& w = (j % 2 == 1) ? f : g;
        for (size_t i = 0; i < n; ++i) b[i] = w[static_cast<int>(i)] * prev[i];
        detail::cumtrapz_anchored(grid, b, a);
        terms.emplace_back(grid, a);
        prev = a;
    }
    return terms;
}

/// The bivariate exponential operator: E = 1 + sum of A_j, truncated at the
/// smallest J whose certified tail bound e^t t^{J+1}/(J+1)! falls below tol,
/// with t = max over nodes of |P(|f|+|g|)|. C and S are the even/odd parts.
///
/// Per-node sums use compensated accumulation in ascending j. The two-run
/// mode additionally evaluates the ladder for (-f,-g) and assembles C and S
/// from the half-sum and half-difference; it exists as a cross-check of the
/// parity split and retains E_{-f,-g} in the result.
inline BivexpResult bivexp(const GridFunction& f, const GridFunction& g,
                           double tol, BivexpMode mode = BivexpMode::parity,
                           int term_cap = kDefaultTermCap) {
    require_same_grid(f, g, "bivexp");
    const Grid& grid = f.grid();
    const size_t n = static_cast<size_t>(grid.n_nodes());

    const double t = detail::max_primitive_abs_sum(f, g);
    const int J = detail::choose_term_count(t, tol, term_cap);
    const double tail =
        (t == 0.0) ? 0.0
                   : std::exp(t + (J + 1) * std::log(t) - std::lgamma(J + 2.0));

    std::vector<Complex> prev(n, Complex(1.0));
    std::vector<Complex> b(n), a(n);

    if (mode == BivexpMode::parity) {
        detail::CompensatedSum c_sum(n, Complex(1.0));  // even terms, A_0 included
        detail::CompensatedSum s_sum(n, Complex(0.0));  // odd terms
        for (int j = 1; j <= J; ++j) {
            const GridFunction& w = (j % 2 == 1) ? f : g;
            for (size_t i = 0; i < n; ++i) b[i] = w[static_cast<int>(i)] * prev[i];
            detail::cumtrapz_anchored(grid, b, a);
            if (j % 2 == 1)
                s_sum.add(a);
            else
                c_sum.add(a);
            std::swap(prev, a);
        }
        std::vector<Complex> c_vals = std::move(c_sum).take();
        std::vector<Complex> s_vals = std::move(s_sum).take();
        std::vector<Complex> e_vals(n);
        for (size_t i = 0; i < n; ++i) e_vals[i] = c_vals[i] + s_vals[i];
        return BivexpResult{GridFunction(grid, std::move(e_vals)),
                            GridFunction(grid, std::move(c_vals)),
                            GridFunction(grid, std::move(s_vals)),
                            J, tail, t, std::nullopt};
    }

    // Two-run mode: ladder for (f,g), then for (-f,-g). The second ladder's
    // terms are (-1)^j A_j, so it reuses the same recurrence with negated
    // inputs rather than exploiting the sign pattern.
    auto run_ladder = [&](double sign) {
        detail::CompensatedSum e_sum(n, Complex(1.0));
        std::fill(prev.begin(), prev.end(), Complex(1.0));
        for (int j = 1; j <= J; ++j) {
            const GridFunction& w = (j % 2 == 1) ? f : g;
            for (size_t i = 0; i < n; ++i)
                b[i] = sign * w[static_cast<int>(i)] * prev[i];
            detail::cumtrapz_anchored(grid, b, a);
            e_sum.add(a);
            std::swap(prev, a);
        }
        return std::move(e_sum).take();
    };
    std::vector<Complex> e_plus = run_ladder(1.0);
    std::vector<Complex> e_minus = run_ladder(-1.0);
    std::vector<Complex> c_vals(n), s_vals(n);
    for (size_t i = 0; i < n; ++i) {
        c_vals[i] = 0.5 * (e_plus[i] + e_minus[i]);
        s_vals[i] = 0.5 * (e_plus[i] - e_minus[i]);
    }
    return BivexpResult{GridFunction(grid, std::move(e_plus)),
                        GridFunction(grid, std::move(c_vals)),
                        GridFunction(grid, std::move(s_vals)),
                        J, tail, t,
                        GridFunction(grid, std::move(e_minus))};
}

/// Reassembles (C, S) from the retained sign pair: C = (E_{f,g}+E_{-f,-g})/2,
/// S = (E_{f,g}-E_{-f,-g})/2. Requires a result produced in two-run mode.
inline std::pair<GridFunction, GridFunction> parity_split(const BivexpResult& r) {
    if (!r.e_minus.has_value())
        throw std::invalid_argument(
            "parity_split: result does not retain the (-f,-g) run; "
            "use BivexpMode::two_run");
    const GridFunction& ep = r.E;
    const GridFunction& em = *r.e_minus;
    std::vector<Complex> c_vals(static_cast<size_t>(ep.size()));
    std::vector<Complex> s_vals(static_cast<size_t>(ep.size()));
    for (int i = 0; i < ep.size(); ++i) {
        c_vals[static_cast<size_t>(i)] = 0.5 * (ep[i] + em[i]);
        s_vals[static_cast<size_t>(i)] = 0.5 * (ep[i] - em[i]);
    }
    return {GridFunction(ep.grid(), std::move(c_vals)),
            GridFunction(ep.grid(), std::move(s_vals))};
}

}  // namespace bivexp
