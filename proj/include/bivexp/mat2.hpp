#pragma once

#include <complex>
#include <stdexcept>

#include "bivexp/grid.hpp"

namespace bivexp {

/// 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2 identity() { return Mat2{}; }

    Complex det() const { return a * d - b * c; }

    Mat2 operator*(const Mat2& o) const {
        return Mat2{a * o.a + b * o.c, a * o.b + b * o.d,
                    c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Mat2 operator*(Complex s) const { return Mat2{s * a, s * b, s * c, s * d}; }
    Mat2 operator+(const Mat2& o) const { return Mat2{a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return Mat2{a - o.a, b - o.b, c - o.c, d - o.d}; }

    /// Adjugate over determinant. Rejects singular matrices.
    Mat2 inverse() const {
        const Complex dt = det();
        if (dt == Complex(0.0))
            throw std::invalid_argument("Mat2::inverse: singular matrix");
        return Mat2{d / dt, -b / dt, -c / dt, a / dt};
    }

    Complex trace() const { return a + d; }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }

}  // namespace bivexp
