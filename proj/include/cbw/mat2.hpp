// 2x2 complex matrix algebra for lossless two-path optics.
//
// Row/column index 0 is the upper path, 1 the lower path. Matrices act on
// path-amplitude vectors from the left. Everything here is a value type;
// nothing mutates shared state, so all of it is safe to use concurrently.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace cbw {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Row-major 2x2 complex matrix.
struct Mat2 {
    std::array<Complex, 4> e{};

    static Mat2 identity() { return Mat2{{Complex{1.0}, Complex{}, Complex{}, Complex{1.0}}}; }

    Complex& at(int r, int c) { return e[2 * r + c]; }
    Complex at(int r, int c) const { return e[2 * r + c]; }

    Mat2 operator*(const Mat2& o) const {
        return Mat2{{e[0] * o.e[0] + e[1] * o.e[2], e[0] * o.e[1] + e[1] * o.e[3],
                     e[2] * o.e[0] + e[3] * o.e[2], e[2] * o.e[1] + e[3] * o.e[3]}};
    }
    Mat2 operator+(const Mat2& o) const {
        return Mat2{{e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]}};
    }
    Mat2 operator-(const Mat2& o) const {
        return Mat2{{e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2], e[3] - o.e[3]}};
    }
    Mat2 operator*(Complex s) const { return Mat2{{s * e[0], s * e[1], s * e[2], s * e[3]}}; }

    Mat2 adjoint() const {
        return Mat2{{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
    }
    Complex det() const { return e[0] * e[3] - e[1] * e[2]; }
    Complex trace() const { return e[0] + e[3]; }

    bool all_finite() const {
        return is_finite(e[0]) && is_finite(e[1]) && is_finite(e[2]) && is_finite(e[3]);
    }

    bool operator==(const Mat2&) const = default;
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }

inline double max_abs(const Mat2& m) {
    double r = 0.0;
    for (const Complex& z : m.e) r = std::max(r, std::abs(z));
    return r;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) { return max_abs(a - b); }

// Standard physics convention for the Pauli matrices.
inline Mat2 pauli_x() { return Mat2{{Complex{}, Complex{1.0}, Complex{1.0}, Complex{}}}; }
inline Mat2 pauli_y() { return Mat2{{Complex{}, Complex{0.0, -1.0}, Complex{0.0, 1.0}, Complex{}}}; }
inline Mat2 pauli_z() { return Mat2{{Complex{1.0}, Complex{}, Complex{}, Complex{-1.0}}}; }

inline bool is_unitary(const Mat2& u, double tol) {
    if (!u.all_finite()) return false;
    if (max_abs_diff(u.adjoint() * u, Mat2::identity()) >= tol) return false;
    return std::abs(std::abs(u.det()) - 1.0) < tol;
}

// Result of a global-phase comparison: a =?= e^{i phase} * b.
struct PhaseMatch {
    bool equal = false;
    double phase = 0.0;     // alpha minimizing |a - e^{i alpha} b|, radians in (-pi, pi]
    double residual = 0.0;  // max-norm of a - e^{i alpha} b
};

inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// The candidate alpha is read off the largest-modulus entry of b; for unitary
// b that entry has modulus >= 1/sqrt(2), so the extraction is well conditioned.
inline PhaseMatch equal_up_to_global_phase(const Mat2& a, const Mat2& b, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("equal_up_to_global_phase: tol must be > 0");
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < 4; ++i) {
        double m = std::abs(b.e[i]);
        if (m > best) { best = m; imax = i; }
    }
    if (best < 1e-300) throw std::invalid_argument("equal_up_to_global_phase: all-zero reference matrix");
    double alpha = 0.0;
    if (std::abs(a.e[imax]) > 0.0) alpha = std::arg(a.e[imax]) - std::arg(b.e[imax]);
    alpha = wrap_angle(alpha);
    const Complex phase = std::polar(1.0, alpha);
    PhaseMatch out;
    out.phase = alpha;
    out.residual = max_abs_diff(a, phase * b);
    out.equal = out.residual < tol;
    return out;
}

// Two-path field amplitudes; component 0 = upper path, 1 = lower path.
struct PathState {
    std::array<Complex, 2> amplitudes{};

    double norm_sq() const {
        return std::norm(amplitudes[0]) + std::norm(amplitudes[1]);
    }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline PathState apply(const Mat2& u, const PathState& s) {
    return PathState{{u.e[0] * s.amplitudes[0] + u.e[1] * s.amplitudes[1],
                      u.e[2] * s.amplitudes[0] + u.e[3] * s.amplitudes[1]}};
}

}  // namespace cbw
