#pragma once

// Planar linear algebra and forward-mode differentiation types.
//
// Vec2T / Mat2T are tiny fixed-size containers templated on the scalar so the
// same field code runs on plain doubles, first-order duals and second-order
// jets. Dual carries a value and its gradient with respect to (x1, x2); Jet2
// additionally carries the (symmetric) Hessian.

#include <cmath>
#include <cstddef>

namespace randers {

template <class T>
struct Vec2T {
    T v[2]{};

    constexpr Vec2T() = default;
    constexpr Vec2T(T a, T b) : v{a, b} {}

    constexpr T& operator[](std::size_t i) { return v[i]; }
    constexpr const T& operator[](std::size_t i) const { return v[i]; }
};

template <class T>
struct Mat2T {
    T m[2][2]{};

    constexpr Mat2T() = default;
    constexpr Mat2T(T a11, T a12, T a21, T a22) : m{{a11, a12}, {a21, a22}} {}

    constexpr T& operator()(std::size_t i, std::size_t j) { return m[i][j]; }
    constexpr const T& operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
};

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;

// ---------------------------------------------------------------------------
// Vec2 / Mat2 arithmetic on doubles
// ---------------------------------------------------------------------------

constexpr Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
constexpr Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
constexpr Vec2 operator-(const Vec2& a) { return {-a[0], -a[1]}; }
constexpr Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
constexpr Vec2 operator*(const Vec2& a, double s) { return {s * a[0], s * a[1]}; }
constexpr Vec2 operator/(const Vec2& a, double s) { return {a[0] / s, a[1] / s}; }
constexpr bool operator==(const Vec2& a, const Vec2& b) { return a[0] == b[0] && a[1] == b[1]; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
constexpr double norm_squared(const Vec2& a) { return dot(a, a); }
// Counter-clockwise rotation by a right angle.
constexpr Vec2 perp(const Vec2& a) { return {-a[1], a[0]}; }

constexpr Vec2 operator*(const Mat2& a, const Vec2& x) {
    return {a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]};
}
constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a(0, 0) + b(0, 0), a(0, 1) + b(0, 1), a(1, 0) + b(1, 0), a(1, 1) + b(1, 1)};
}
constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a(0, 0) - b(0, 0), a(0, 1) - b(0, 1), a(1, 0) - b(1, 0), a(1, 1) - b(1, 1)};
}
constexpr Mat2 operator*(double s, const Mat2& a) {
    return {s * a(0, 0), s * a(0, 1), s * a(1, 0), s * a(1, 1)};
}
constexpr double quadratic_form(const Mat2& a, const Vec2& x) { return dot(x, a * x); }
constexpr double determinant(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }
constexpr Mat2 identity2() { return {1.0, 0.0, 0.0, 1.0}; }

inline Mat2 inverse(const Mat2& a) {
    const double det = determinant(a);
    return {a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det};
}

// Eigenvalues of the symmetric part, ascending.
inline Vec2 symmetric_eigenvalues(const Mat2& a) {
    const double p = 0.5 * (a(0, 0) + a(1, 1));
    const double q = 0.5 * (a(0, 0) - a(1, 1));
    const double off = 0.5 * (a(0, 1) + a(1, 0));
    const double rad = std::hypot(q, off);
    return {p - rad, p + rad};
}

// ---------------------------------------------------------------------------
// Dual: value plus gradient in (x1, x2)
// ---------------------------------------------------------------------------

struct Dual {
    double val = 0.0;
    Vec2 grad{};

    constexpr Dual() = default;
    constexpr Dual(double v) : val(v) {}  // NOLINT: constants promote implicitly
    constexpr Dual(double v, Vec2 g) : val(v), grad(g) {}

    static constexpr Dual variable(double v, std::size_t index) {
        Dual d(v);
        d.grad[index] = 1.0;
        return d;
    }
};

constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.val + b.val, a.grad + b.grad}; }
constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.val - b.val, a.grad - b.grad}; }
constexpr Dual operator-(const Dual& a) { return {-a.val, -a.grad}; }
constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.val * b.val, b.val * a.grad + a.val * b.grad};
}
constexpr Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.val;
    return {a.val * inv, inv * a.grad - (a.val * inv * inv) * b.grad};
}

// Apply a scalar function given f(u) and f'(u).
constexpr Dual chain(const Dual& a, double f, double df) { return {f, df * a.grad}; }

inline Dual sqrt(const Dual& a) {
    const double s = std::sqrt(a.val);
    // The gradient of a square root at zero is taken as zero (subgradient of |x|).
    return chain(a, s, s > 0.0 ? 0.5 / s : 0.0);
}
inline Dual exp(const Dual& a) {
    const double e = std::exp(a.val);
    return chain(a, e, e);
}
inline Dual log(const Dual& a) { return chain(a, std::log(a.val), 1.0 / a.val); }
inline Dual sin(const Dual& a) { return chain(a, std::sin(a.val), std::cos(a.val)); }
inline Dual cos(const Dual& a) { return chain(a, std::cos(a.val), -std::sin(a.val)); }
inline Dual pow(const Dual& a, const Dual& b) {
    if (b.grad[0] == 0.0 && b.grad[1] == 0.0) {
        const double k = b.val;
        const double f = std::pow(a.val, k);
        const double df = k == 0.0 ? 0.0 : k * std::pow(a.val, k - 1.0);
        return chain(a, f, df);
    }
    return exp(b * log(a));
}

// ---------------------------------------------------------------------------
// Jet2: value, gradient and Hessian in (x1, x2)
// ---------------------------------------------------------------------------

struct Jet2 {
    double val = 0.0;
    Vec2 grad{};
    Mat2 hess{};

    constexpr Jet2() = default;
    constexpr Jet2(double v) : val(v) {}  // NOLINT
    constexpr Jet2(double v, Vec2 g, Mat2 h) : val(v), grad(g), hess(h) {}

    static constexpr Jet2 variable(double v, std::size_t index) {
        Jet2 j(v);
        j.grad[index] = 1.0;
        return j;
    }

    constexpr Dual first_order() const { return {val, grad}; }
};

constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
    return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.val + b.val, a.grad + b.grad, a.hess + b.hess};
}
constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.val - b.val, a.grad - b.grad, a.hess - b.hess};
}
constexpr Jet2 operator-(const Jet2& a) { return {-a.val, -a.grad, -1.0 * a.hess}; }
constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.val * b.val, b.val * a.grad + a.val * b.grad,
            b.val * a.hess + a.val * b.hess + outer(a.grad, b.grad) + outer(b.grad, a.grad)};
}

// f(u) with f', f'' applied through the chain rule.
constexpr Jet2 chain(const Jet2& a, double f, double df, double ddf) {
    return {f, df * a.grad, df * a.hess + ddf * outer(a.grad, a.grad)};
}

constexpr Jet2 reciprocal(const Jet2& a) {
    const double inv = 1.0 / a.val;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
constexpr Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

inline Jet2 sqrt(const Jet2& a) {
    const double s = std::sqrt(a.val);
    if (s > 0.0) return chain(a, s, 0.5 / s, -0.25 / (s * a.val));
    return Jet2(s);
}
inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.val);
    return chain(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return chain(a, std::log(a.val), 1.0 / a.val, -1.0 / (a.val * a.val)); }
inline Jet2 sin(const Jet2& a) {
    return chain(a, std::sin(a.val), std::cos(a.val), -std::sin(a.val));
}
inline Jet2 cos(const Jet2& a) {
    return chain(a, std::cos(a.val), -std::sin(a.val), -std::cos(a.val));
}
inline Jet2 pow(const Jet2& a, const Jet2& b) {
    const bool constant_exponent = b.grad[0] == 0.0 && b.grad[1] == 0.0 &&
                                   b.hess(0, 0) == 0.0 && b.hess(0, 1) == 0.0 &&
                                   b.hess(1, 1) == 0.0;
    if (constant_exponent) {
        const double k = b.val;
        const double f = std::pow(a.val, k);
        const double df = k == 0.0 ? 0.0 : k * std::pow(a.val, k - 1.0);
        const double ddf = (k == 0.0 || k == 1.0) ? 0.0 : k * (k - 1.0) * std::pow(a.val, k - 2.0);
        return chain(a, f, df, ddf);
    }
    return exp(b * log(a));
}

using DualVec2 = Vec2T<Dual>;
using DualMat2 = Mat2T<Dual>;

}  // namespace randers
