#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bivexp/mat2.hpp"
#include "bivexp/matpath.hpp"

namespace bivexp {

/// Relative near-pole threshold for Mobius evaluation: a quotient whose
/// denominator satisfies |den| <= eps (|num| + |den|) is mapped to infinity.
/// The test is scale invariant, so it behaves identically for large |z|.
inline constexpr double kPoleEps = 1e-13;

/// A point of the Riemann sphere: either a finite complex number or the
/// distinguished point at infinity.
class SpherePoint {
public:
    SpherePoint() : v_(0.0), inf_(false) {}
    SpherePoint(Complex z) : v_(z), inf_(false) {
        if (!is_finite(z))
            throw std::invalid_argument("SpherePoint: finite value required (use infinity())");
    }
    SpherePoint(double x) : SpherePoint(Complex(x, 0.0)) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinity() const { return inf_; }

    Complex value() const {
        if (inf_) throw std::logic_error("SpherePoint::value: point is infinity");
        return v_;
    }

    bool operator==(const SpherePoint& o) const {
        return inf_ == o.inf_ && (inf_ || v_ == o.v_);
    }

private:
    Complex v_;
    bool inf_;
};

/// The isometry z -> 1/z (0 and infinity swap).
inline SpherePoint reciprocal(const SpherePoint& p) {
    if (p.is_infinity()) return SpherePoint(Complex(0.0));
    const Complex z = p.value();
    if (z == Complex(0.0)) return SpherePoint::infinity();
    return SpherePoint(1.0 / z);
}

/// A point on the unit sphere in R^3.
struct EmbeddedPoint {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;

    double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
};

/// Stereographic embedding: z -> (2 Re z, 2 Im z, |z|^2 - 1)/(|z|^2 + 1),
/// with infinity at the north pole (0,0,1). For |z| > 1 the value is computed
/// through w = 1/z, which is an exact algebraic identity and avoids overflow.
inline EmbeddedPoint stereographic(const SpherePoint& p) {
    if (p.is_infinity()) return EmbeddedPoint{0.0, 0.0, 1.0};
    const Complex z = p.value();
    if (std::max(std::abs(z.real()), std::abs(z.imag())) <= 1.0) {
        const double n = std::norm(z);
        const double den = n + 1.0;
        return EmbeddedPoint{2.0 * z.real() / den, 2.0 * z.imag() / den,
                             (n - 1.0) / den};
    }
    const Complex w = 1.0 / z;
    const double n = std::norm(w);
    const double den = n + 1.0;
    return EmbeddedPoint{2.0 * w.real() / den, -2.0 * w.imag() / den,
                         (1.0 - n) / den};
}

/// Chordal metric on the sphere: the Euclidean distance of the stereographic
/// embeddings, 2|z1 - z2| / sqrt((1+|z1|^2)(1+|z2|^2)) for finite pairs and
/// 2 / sqrt(1+|z|^2) against infinity.
inline double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
    if (p.is_infinity() && q.is_infinity()) return 0.0;
    if (p.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(q.value()));
    if (q.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(p.value()));
    const Complex z1 = p.value();
    const Complex z2 = q.value();
    return 2.0 * std::abs(z1 - z2) /
           std::sqrt((1.0 + std::norm(z1)) * (1.0 + std::norm(z2)));
}

/// The Mobius action phi_M(z) = (a z + b)/(c z + d) on the sphere. Values
/// whose denominator underflows the relative near-pole threshold map to
/// infinity; z = infinity maps to a/c. For |z| > 1 the quotient is evaluated
/// through w = 1/z to stay scale safe.
inline SpherePoint mobius_apply(const Mat2& m, const SpherePoint& p,
                                double pole_eps = kPoleEps) {
    if (m.det() == Complex(0.0))
        throw std::invalid_argument("mobius_apply: singular matrix");
    Complex num, den;
    if (p.is_infinity()) {
        num = m.a;
        den = m.c;
    } else {
        const Complex z = p.value();
        if (std::max(std::abs(z.real()), std::abs(z.imag())) <= 1.0) {
            num = m.a * z + m.b;
            den = m.c * z + m.d;
        } else {
            const Complex w = 1.0 / z;
            num = m.a + m.b * w;
            den = m.c + m.d * w;
        }
    }
    const double an = std::abs(num);
    const double ad = std::abs(den);
    if (ad <= pole_eps * (an + ad)) return SpherePoint::infinity();
    return SpherePoint(num / den);
}

/// Matrix product; the composition law phi_{m1 m2} = phi_{m1} o phi_{m2}.
inline Mat2 mobius_compose(const Mat2& m1, const Mat2& m2) {
    if (m1.det() == Complex(0.0) || m2.det() == Complex(0.0))
        throw std::invalid_argument("mobius_compose: singular matrix");
    return m1 * m2;
}

inline Mat2 mobius_inverse(const Mat2& m) { return m.inverse(); }

/// Nodewise sample of the singular curve -d(x)/c(x) of a matrix path. Nodes
/// where |c| does not exceed the zero threshold are recorded as gaps.
struct SingularCurveSample {
    std::vector<int> nodes;        ///< node indices with |c| above threshold
    std::vector<double> xs;        ///< node coordinates, parallel to values
    std::vector<Complex> values;   ///< -d/c at those nodes
    std::vector<int> gap_nodes;    ///< nodes with c at or below the threshold
};

inline SingularCurveSample singular_curve(const MatPath& m, double zero_threshold) {
    SingularCurveSample out;
    for (int i = 0; i < m.grid.n_nodes(); ++i) {
        if (std::abs(m.c[i]) > zero_threshold) {
            out.nodes.push_back(i);
            out.xs.push_back(m.grid.node(i));
            out.values.push_back(-m.d[i] / m.c[i]);
        } else {
            out.gap_nodes.push_back(i);
        }
    }
    return out;
}

}  // namespace bivexp
