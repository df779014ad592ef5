#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bivexp {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Uniform grid on [x_lo, x_hi] with n_cells + 1 nodes and the origin pinned
/// to a node. Every primitive and series operator in this library is anchored
/// at x = 0, so the anchor is enforced structurally at construction.
class Grid {
public:
    /// Builds the grid, validating that 0 falls on a node (x_lo and x_hi must
    /// be integer multiples of the spacing, up to rounding slack).
    static Grid over(double x_lo, double x_hi, int n_cells) {
        if (!(n_cells >= 1))
            throw std::invalid_argument("Grid: n_cells must be >= 1");
        if (!std::isfinite(x_lo) || !std::isfinite(x_hi) || !(x_lo < x_hi))
            throw std::invalid_argument("Grid: need finite x_lo < x_hi");
        if (!(x_lo <= 0.0 && 0.0 <= x_hi))
            throw std::invalid_argument("Grid: interval must contain 0");
        const double h = (x_hi - x_lo) / n_cells;
        const double k_real = -x_lo / h;
        const long long k = std::llround(k_real);
        if (std::abs(k_real - k) > 1e-6)
            throw std::invalid_argument(
                "Grid: 0 is not a node of [" + std::to_string(x_lo) + ", " +
                std::to_string(x_hi) + "] with " + std::to_string(n_cells) +
                " cells");
        return Grid(h, n_cells, static_cast<int>(k));
    }

    double spacing() const { return h_; }
    int n_cells() const { return n_cells_; }
    int n_nodes() const { return n_cells_ + 1; }
    int zero_index() const { return zero_index_; }
    double x_lo() const { return node(0); }
    double x_hi() const { return node(n_cells_); }

    /// Node coordinate; node(zero_index()) is exactly 0.
    double node(int i) const { return (i - zero_index_) * h_; }

    bool operator==(const Grid& o) const {
        return h_ == o.h_ && n_cells_ == o.n_cells_ && zero_index_ == o.zero_index_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    Grid(double h, int n_cells, int zero_index)
        : h_(h), n_cells_(n_cells), zero_index_(zero_index) {}

    double h_;
    int n_cells_;
    int zero_index_;
};

/// Complex-valued function sampled at the nodes of a Grid. Values are
/// immutable after construction; all operations below are pure.
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<Complex> values)
        : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.n_nodes())
            throw std::invalid_argument("GridFunction: values size " +
                                        std::to_string(values_.size()) +
                                        " does not match node count " +
                                        std::to_string(grid_.n_nodes()));
    }

    static GridFunction zero(const Grid& g) {
        return GridFunction(g, std::vector<Complex>(g.n_nodes(), Complex(0.0)));
    }
    static GridFunction constant(const Grid& g, Complex c) {
        return GridFunction(g, std::vector<Complex>(g.n_nodes(), c));
    }

    const Grid& grid() const { return grid_; }
    std::span<const Complex> values() const { return values_; }
    int size() const { return static_cast<int>(values_.size()); }
    Complex operator[](int i) const { return values_[static_cast<size_t>(i)]; }
    Complex at_zero() const { return values_[static_cast<size_t>(grid_.zero_index())]; }

private:
    Grid grid_;
    std::vector<Complex> values_;
};

inline void require_same_grid(const GridFunction& a, const GridFunction& b,
                              const char* op) {
    if (a.grid() != b.grid())
        throw std::invalid_argument(std::string(op) + ": operands on different grids");
}

/// Samples a pointwise function at every node, rejecting non-finite values.
inline GridFunction sample(const std::function<Complex(double)>& f, const Grid& g) {
    std::vector<Complex> v(static_cast<size_t>(g.n_nodes()));
    for (int i = 0; i < g.n_nodes(); ++i) {
        const Complex z = f(g.node(i));
        if (!is_finite(z))
            throw std::invalid_argument("sample: non-finite value at node " +
                                        std::to_string(i) + " (x = " +
                                        std::to_string(g.node(i)) + ")");
        v[static_cast<size_t>(i)] = z;
    }
    return GridFunction(g, std::move(v));
}

inline GridFunction sample(const std::function<double(double)>& f, const Grid& g) {
    return sample(std::function<Complex(double)>(
                      [&f](double x) { return Complex(f(x), 0.0); }),
                  g);
}

namespace detail {

/// Composite-trapezoid cumulative integral anchored at the zero node: the
/// oriented integral from 0 to each node (negative direction carries the
/// sign of a single integral from 0).
inline void cumtrapz_anchored(const Grid& g, std::span<const Complex> v,
                              std::span<Complex> out) {
    const double h2 = 0.5 * g.spacing();
    const int z = g.zero_index();
    const int n = g.n_nodes();
    out[static_cast<size_t>(z)] = Complex(0.0);
    for (int i = z + 1; i < n; ++i)
        out[static_cast<size_t>(i)] =
            out[static_cast<size_t>(i - 1)] +
            h2 * (v[static_cast<size_t>(i - 1)] + v[static_cast<size_t>(i)]);
    for (int i = z - 1; i >= 0; --i)
        out[static_cast<size_t>(i)] =
            out[static_cast<size_t>(i + 1)] -
            h2 * (v[static_cast<size_t>(i)] + v[static_cast<size_t>(i + 1)]);
}

}  // namespace detail

/// The primitive operator P: cumulative trapezoid integral with Pf(0) = 0.
inline GridFunction primitive(const GridFunction& f) {
    std::vector<Complex> out(static_cast<size_t>(f.size()));
    detail::cumtrapz_anchored(f.grid(), f.values(), out);
    return GridFunction(f.grid(), std::move(out));
}

/// Second-order finite differences: central stencils at interior nodes,
/// one-sided three-point stencils at the two endpoints.
inline GridFunction fd_derivative(const GridFunction& f) {
    const int n = f.size();
    if (n < 3)
        throw std::invalid_argument("fd_derivative: grid needs at least 3 nodes");
    const double h = f.grid().spacing();
    auto v = f.values();
    std::vector<Complex> out(static_cast<size_t>(n));
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i)
        out[static_cast<size_t>(i)] =
            (v[static_cast<size_t>(i + 1)] - v[static_cast<size_t>(i - 1)]) / (2.0 * h);
    out[static_cast<size_t>(n - 1)] =
        (3.0 * v[static_cast<size_t>(n - 1)] - 4.0 * v[static_cast<size_t>(n - 2)] +
         v[static_cast<size_t>(n - 3)]) / (2.0 * h);
    return GridFunction(f.grid(), std::move(out));
}

inline GridFunction add(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b, "add");
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = a[i] + b[i];
    return GridFunction(a.grid(), std::move(out));
}

inline GridFunction sub(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b, "sub");
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = a[i] - b[i];
    return GridFunction(a.grid(), std::move(out));
}

inline GridFunction mul(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b, "mul");
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = a[i] * b[i];
    return GridFunction(a.grid(), std::move(out));
}

inline GridFunction scale(const GridFunction& a, Complex s) {
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = s * a[i];
    return GridFunction(a.grid(), std::move(out));
}

inline GridFunction negate(const GridFunction& a) {
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = -a[i];
    return GridFunction(a.grid(), std::move(out));
}

/// Nodewise |f|, stored in the real part.
inline GridFunction abs_of(const GridFunction& a) {
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i)
        out[static_cast<size_t>(i)] = Complex(std::abs(a[i]), 0.0);
    return GridFunction(a.grid(), std::move(out));
}

/// Nodewise e^{f}.
inline GridFunction exp_of(const GridFunction& a) {
    std::vector<Complex> out(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) out[static_cast<size_t>(i)] = std::exp(a[i]);
    return GridFunction(a.grid(), std::move(out));
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) { return add(a, b); }
inline GridFunction operator-(const GridFunction& a, const GridFunction& b) { return sub(a, b); }
inline GridFunction operator*(const GridFunction& a, const GridFunction& b) { return mul(a, b); }
inline GridFunction operator*(Complex s, const GridFunction& a) { return scale(a, s); }
inline GridFunction operator*(double s, const GridFunction& a) { return scale(a, Complex(s, 0.0)); }
inline GridFunction operator-(const GridFunction& a) { return negate(a); }

inline double max_abs(const GridFunction& f) {
    double m = 0.0;
    for (int i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

/// max |a - b| over all nodes.
inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b, "max_abs_diff");
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace bivexp
