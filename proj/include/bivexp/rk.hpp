#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bivexp/matpath.hpp"
#include "bivexp/riccati.hpp"

namespace bivexp {

/// Options for the adaptive Runge-Kutta oracle. The oracle is deliberately
/// independent of the series machinery: it consumes the same node samples
/// (linearly interpolated) so that discrepancies are attributable to the
/// solver, not the data.
struct OracleOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    bool dense_output = false;    ///< retain accepted-step samples in the trace
    double escape_radius = 1e8;   ///< |y| beyond this stops with a blowup report

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("OracleOptions: tolerances must be > 0");
    }
};

struct BlowupEvent {
    double x = 0.0;
    int direction = 0;  ///< +1 forward from 0, -1 backward
};

struct RkScalarResult {
    GridFunction y;                       ///< zero at uncovered nodes
    std::vector<std::uint8_t> covered;    ///< one flag per node
    std::vector<BlowupEvent> blowups;
    bool step_underflow = false;
    std::vector<std::pair<double, Complex>> trace;  ///< accepted steps (dense_output)
};

struct RkLinearResult {
    GridFunction y;
    GridFunction y_prime;
    bool step_underflow = false;
};

struct RkMatrixResult {
    MatPath path;
    bool step_underflow = false;
};

namespace detail {

/// Piecewise-linear evaluation of grid samples, clamped to the grid range.
class CoeffInterp {
public:
    explicit CoeffInterp(const GridFunction& f) : f_(&f) {}

    Complex operator()(double x) const {
        const Grid& g = f_->grid();
        double u = x / g.spacing() + g.zero_index();
        if (u <= 0.0) return (*f_)[0];
        if (u >= g.n_cells()) return (*f_)[g.n_cells()];
        const int i = static_cast<int>(u);
        const double w = u - i;
        return (1.0 - w) * (*f_)[i] + w * (*f_)[i + 1];
    }

private:
    const GridFunction* f_;
};

// Dormand-Prince 5(4) pair.
inline constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double kDpB5[7] = {35.0 / 384,      0.0,         500.0 / 1113,
                                    125.0 / 192,     -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double kDpB4[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695,
                                    393.0 / 640,     -92097.0 / 339200,
                                    187.0 / 2100,    1.0 / 40};

template <size_t N>
using State = std::array<Complex, N>;

/// One embedded 5(4) step from (x, y) with signed step h. Returns the scaled
/// error norm; y_out receives the 5th-order value.
template <size_t N, class Rhs>
double dp_step(const Rhs& rhs, double x, const State<N>& y, double h,
               State<N>& y_out, const OracleOptions& opts) {
    State<N> k[7];
    State<N> stage;
    rhs(x, y, k[0]);
    for (int s = 1; s < 7; ++s) {
        for (size_t i = 0; i < N; ++i) {
            Complex acc = y[i];
            for (int j = 0; j < s; ++j) acc += h * kDpA[s][j] * k[j][i];
            stage[i] = acc;
        }
        rhs(x + kDpC[s] * h, stage, k[s]);
    }
    State<N> y4;
    for (size_t i = 0; i < N; ++i) {
        Complex acc5 = y[i], acc4 = y[i];
        for (int s = 0; s < 7; ++s) {
            acc5 += h * kDpB5[s] * k[s][i];
            acc4 += h * kDpB4[s] * k[s][i];
        }
        y_out[i] = acc5;
        y4[i] = acc4;
    }
    double err2 = 0.0;
    for (size_t i = 0; i < N; ++i) {
        const double sc = opts.abs_tol +
                          opts.rel_tol * std::max(std::abs(y[i]), std::abs(y_out[i]));
        const double e = std::abs(y_out[i] - y4[i]) / sc;
        err2 += e * e;
    }
    return std::sqrt(err2 / N);
}

enum class MarchOutcome { completed, stopped, step_underflow };

/// Integrates from x = 0 toward each node in one direction, clamping steps to
/// land exactly on nodes. on_accept(x, y) runs after every accepted internal
/// step and on_node(i, y) at every reached node; either may stop the march
/// (escape). stop_x receives the position where the march ended early.
template <size_t N, class Rhs, class OnAccept, class OnNode>
MarchOutcome march(const Rhs& rhs, const Grid& grid, const State<N>& y_at_zero,
                   int direction, const OracleOptions& opts, OnAccept&& on_accept,
                   OnNode&& on_node, double* stop_x) {
    const int z = grid.zero_index();
    const int last = direction > 0 ? grid.n_cells() : 0;
    if ((direction > 0 && z >= last) || (direction < 0 && z <= last))
        return MarchOutcome::completed;

    State<N> y = y_at_zero;
    double x = 0.0;
    double h = direction * std::min(grid.spacing(), opts.max_step);

    for (int node = z + direction; direction > 0 ? node <= last : node >= last;
         node += direction) {
        const double target = grid.node(node);
        while (direction * (target - x) > 0.0) {
            double step = h;
            if (direction * (x + step - target) > 0.0) step = target - x;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) {
                if (stop_x) *stop_x = x;
                return MarchOutcome::step_underflow;
            }
            State<N> y_new;
            const double err = dp_step<N>(rhs, x, y, step, y_new, opts);
            if (err <= 1.0) {
                x += step;
                y = y_new;
                const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h = direction * std::min({std::abs(h) * std::clamp(grow, 0.2, 5.0),
                                          opts.max_step, grid.spacing() * 16.0});
                if (!on_accept(x, y)) {
                    if (stop_x) *stop_x = x;
                    return MarchOutcome::stopped;
                }
            } else {
                const double shrink = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                h = direction * std::abs(step) * shrink;
            }
        }
        if (!on_node(node, y)) {
            if (stop_x) *stop_x = x;
            return MarchOutcome::stopped;
        }
    }
    return MarchOutcome::completed;
}

}  // namespace detail

/// Adaptive RK integration of y' = f y^2 + g y + h in both directions from 0,
/// with coefficients linearly interpolated between grid samples. The march in
/// a direction stops with a blowup report once |y| exceeds the escape radius;
/// the series engine, not the oracle, owns continuation through poles.
inline RkScalarResult rk_riccati(const CoeffTriple& coeffs, Complex y0,
                                 const OracleOptions& opts) {
    opts.validate();
    if (!is_finite(y0)) throw std::invalid_argument("rk_riccati: y0 must be finite");
    const Grid& grid = coeffs.grid();
    const int n = grid.n_nodes();

    detail::CoeffInterp fi(coeffs.f), gi(coeffs.g), hi(coeffs.h);
    auto rhs = [&](double x, const detail::State<1>& y, detail::State<1>& dy) {
        dy[0] = fi(x) * y[0] * y[0] + gi(x) * y[0] + hi(x);
    };

    std::vector<Complex> vals(static_cast<size_t>(n), Complex(0.0));
    std::vector<std::uint8_t> covered(static_cast<size_t>(n), 0);
    RkScalarResult out{GridFunction::zero(grid), {}, {}, false, {}};

    const int z = grid.zero_index();
    vals[static_cast<size_t>(z)] = y0;
    covered[static_cast<size_t>(z)] = 1;
    if (opts.dense_output) out.trace.emplace_back(0.0, y0);

    for (int direction : {+1, -1}) {
        bool blew = false;
        double blow_x = 0.0;
        double last_mag = std::abs(y0);
        auto on_accept = [&](double x, const detail::State<1>& y) {
            last_mag = std::abs(y[0]);
            if (opts.dense_output) out.trace.emplace_back(x, y[0]);
            if (last_mag > opts.escape_radius) {
                blew = true;
                blow_x = x;
                return false;
            }
            return true;
        };
        auto on_node = [&](int node, const detail::State<1>& y) {
            vals[static_cast<size_t>(node)] = y[0];
            covered[static_cast<size_t>(node)] = 1;
            return true;
        };
        double stop_x = 0.0;
        const auto outcome = detail::march<1>(rhs, grid, {y0}, direction, opts,
                                              on_accept, on_node, &stop_x);
        if (outcome == detail::MarchOutcome::step_underflow) {
            out.step_underflow = true;
            // Step underflow with |y| already enormous is the blowup
            // asymptote; report it as such.
            if (last_mag > 0.01 * opts.escape_radius) {
                blew = true;
                blow_x = stop_x;
            }
        }
        if (blew) out.blowups.push_back(BlowupEvent{blow_x, direction});
    }

    out.y = GridFunction(grid, std::move(vals));
    out.covered = std::move(covered);
    return out;
}

/// First-order system form of y'' + alpha y' + beta y = 0.
inline RkLinearResult rk_linear2(const GridFunction& alpha, const GridFunction& beta,
                                 Complex y0, Complex yp0, const OracleOptions& opts) {
    opts.validate();
    require_same_grid(alpha, beta, "rk_linear2");
    const Grid& grid = alpha.grid();
    const int n = grid.n_nodes();

    detail::CoeffInterp ai(alpha), bi(beta);
    auto rhs = [&](double x, const detail::State<2>& y, detail::State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -ai(x) * y[1] - bi(x) * y[0];
    };

    std::vector<Complex> yv(static_cast<size_t>(n), Complex(0.0));
    std::vector<Complex> ypv(static_cast<size_t>(n), Complex(0.0));
    const int z = grid.zero_index();
    yv[static_cast<size_t>(z)] = y0;
    ypv[static_cast<size_t>(z)] = yp0;

    bool underflow = false;
    for (int direction : {+1, -1}) {
        auto on_accept = [](double, const detail::State<2>&) { return true; };
        auto on_node = [&](int node, const detail::State<2>& y) {
            yv[static_cast<size_t>(node)] = y[0];
            ypv[static_cast<size_t>(node)] = y[1];
            return true;
        };
        if (detail::march<2>(rhs, grid, {y0, yp0}, direction, opts, on_accept, on_node,
                             nullptr) == detail::MarchOutcome::step_underflow)
            underflow = true;
    }
    return RkLinearResult{GridFunction(grid, std::move(yv)),
                          GridFunction(grid, std::move(ypv)), underflow};
}

/// Integrates the 4-component system M' = [[g/2, h], [-f, -g/2]] M, M(0) = I.
/// The returned path's det residual is recorded but not enforced.
inline RkMatrixResult rk_matrix(const CoeffTriple& coeffs, const OracleOptions& opts) {
    opts.validate();
    const Grid& grid = coeffs.grid();
    const int n = grid.n_nodes();

    detail::CoeffInterp fi(coeffs.f), gi(coeffs.g), hi(coeffs.h);
    auto rhs = [&](double x, const detail::State<4>& m, detail::State<4>& dm) {
        const Complex f = fi(x), g2 = 0.5 * gi(x), h = hi(x);
        dm[0] = g2 * m[0] + h * m[2];   // a' = g/2 a + h c
        dm[1] = g2 * m[1] + h * m[3];   // b' = g/2 b + h d
        dm[2] = -f * m[0] - g2 * m[2];  // c' = -f a - g/2 c
        dm[3] = -f * m[1] - g2 * m[3];  // d' = -f b - g/2 d
    };

    std::vector<Complex> av(static_cast<size_t>(n), Complex(0.0)),
        bv(static_cast<size_t>(n), Complex(0.0)), cv(static_cast<size_t>(n), Complex(0.0)),
        dv(static_cast<size_t>(n), Complex(0.0));
    const int z = grid.zero_index();
    av[static_cast<size_t>(z)] = 1.0;
    dv[static_cast<size_t>(z)] = 1.0;

    bool underflow = false;
    const detail::State<4> ident{Complex(1.0), Complex(0.0), Complex(0.0), Complex(1.0)};
    for (int direction : {+1, -1}) {
        auto on_accept = [](double, const detail::State<4>&) { return true; };
        auto on_node = [&](int node, const detail::State<4>& m) {
            av[static_cast<size_t>(node)] = m[0];
            bv[static_cast<size_t>(node)] = m[1];
            cv[static_cast<size_t>(node)] = m[2];
            dv[static_cast<size_t>(node)] = m[3];
            return true;
        };
        if (detail::march<4>(rhs, grid, ident, direction, opts, on_accept, on_node,
                             nullptr) == detail::MarchOutcome::step_underflow)
            underflow = true;
    }

    MatPath path{grid, GridFunction(grid, std::move(av)), GridFunction(grid, std::move(bv)),
                 GridFunction(grid, std::move(cv)), GridFunction(grid, std::move(dv)),
                 true, 0.0, 0.0};
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst,
                         std::abs(path.a[i] * path.d[i] - path.b[i] * path.c[i] - Complex(1.0)));
    path.max_det_residual = worst;
    return RkMatrixResult{std::move(path), underflow};
}

enum class CompareVerdict {
    agreement,      ///< no oracle blowup and gap within tolerance
    expected_pole,  ///< oracle blew up next to a series infinity crossing
    mismatch
};

inline const char* to_string(CompareVerdict v) {
    switch (v) {
        case CompareVerdict::agreement: return "agreement";
        case CompareVerdict::expected_pole: return "expected-pole";
        default: return "mismatch";
    }
}

struct OracleComparison {
    double max_chordal_gap = 0.0;
    int worst_node = -1;
    double worst_x = 0.0;
    int compared_nodes = 0;
    bool oracle_blowup = false;
    std::vector<BlowupEvent> blowups;
    int series_infinity_count = 0;
    CompareVerdict verdict = CompareVerdict::agreement;
};

/// Compares a series trajectory against the RK oracle on the nodes the oracle
/// covered. An oracle blowup adjacent to a series infinity crossing is the
/// projective continuation working as intended and is classified
/// expected-pole, not error.
inline OracleComparison compare_riccati(const SphereTrajectory& series,
                                        const RkScalarResult& oracle,
                                        double gap_tol) {
    if (series.grid != oracle.y.grid())
        throw std::invalid_argument("compare_riccati: grids differ");
    OracleComparison cmp;
    const Grid& grid = series.grid;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        if (!oracle.covered[static_cast<size_t>(i)]) continue;
        ++cmp.compared_nodes;
        const double gap = chordal_distance(series.points[static_cast<size_t>(i)],
                                            SpherePoint(oracle.y[i]));
        if (gap > cmp.max_chordal_gap) {
            cmp.max_chordal_gap = gap;
            cmp.worst_node = i;
            cmp.worst_x = grid.node(i);
        }
    }
    cmp.oracle_blowup = !oracle.blowups.empty();
    cmp.blowups = oracle.blowups;
    cmp.series_infinity_count = static_cast<int>(series.infinity_nodes.size());

    const bool gap_ok = cmp.max_chordal_gap <= gap_tol;
    if (!cmp.oracle_blowup) {
        cmp.verdict = gap_ok ? CompareVerdict::agreement : CompareVerdict::mismatch;
        return cmp;
    }
    const double window = std::max(5.0 * grid.spacing(),
                                   0.02 * (grid.x_hi() - grid.x_lo()));
    bool all_near_pole = cmp.series_infinity_count > 0;
    for (const BlowupEvent& ev : oracle.blowups) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int node : series.infinity_nodes)
            nearest = std::min(nearest, std::abs(grid.node(node) - ev.x));
        all_near_pole = all_near_pole && nearest <= window;
    }
    cmp.verdict = (gap_ok && all_near_pole) ? CompareVerdict::expected_pole
                                            : CompareVerdict::mismatch;
    return cmp;
}

}  // namespace bivexp
