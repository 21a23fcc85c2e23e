#pragma once

#include <cmath>

#include "poholab/vec.hpp"

namespace poholab {

/// Second-order 1D jet: value, first and second derivative with respect to a
/// single scalar parameter. Used to evaluate radial constructions and their
/// exact Laplacians without finite differences.
struct Jet1 {
    double v = 0.0;   // value
    double d = 0.0;   // d/dr
    double dd = 0.0;  // d2/dr2

    static Jet1 variable(double r) { return {r, 1.0, 0.0}; }
    static Jet1 constant(double c) { return {c, 0.0, 0.0}; }
};

inline Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet1 operator-(const Jet1& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet1 operator+(const Jet1& a, double c) { return {a.v + c, a.d, a.dd}; }
inline Jet1 operator+(double c, const Jet1& a) { return a + c; }
inline Jet1 operator-(const Jet1& a, double c) { return {a.v - c, a.d, a.dd}; }
inline Jet1 operator-(double c, const Jet1& a) { return {c - a.v, -a.d, -a.dd}; }
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet1 operator*(const Jet1& a, double c) { return {a.v * c, a.d * c, a.dd * c}; }
inline Jet1 operator*(double c, const Jet1& a) { return a * c; }

/// Composition f(g) given f's value and first two derivatives at g.v.
inline Jet1 compose(double f, double fp, double fpp, const Jet1& g) {
    return {f, fp * g.d, fpp * g.d * g.d + fp * g.dd};
}

inline Jet1 inv(const Jet1& a) {
    const double iv = 1.0 / a.v;
    return compose(iv, -iv * iv, 2.0 * iv * iv * iv, a);
}
inline Jet1 operator/(const Jet1& a, const Jet1& b) { return a * inv(b); }
inline Jet1 operator/(const Jet1& a, double c) { return a * (1.0 / c); }
inline Jet1 operator/(double c, const Jet1& a) { return inv(a) * c; }

inline Jet1 sqrt(const Jet1& a) {
    const double s = std::sqrt(a.v);
    return compose(s, 0.5 / s, -0.25 / (s * a.v), a);
}
inline Jet1 log(const Jet1& a) { return compose(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v), a); }
inline Jet1 atan(const Jet1& a) {
    const double d = 1.0 + a.v * a.v;
    return compose(std::atan(a.v), 1.0 / d, -2.0 * a.v / (d * d), a);
}
inline Jet1 pow_int(const Jet1& a, int n) {
    Jet1 r = Jet1::constant(1.0);
    Jet1 base = a;
    int m = n < 0 ? -n : n;
    while (m > 0) {
        if (m & 1) r = r * base;
        base = base * base;
        m >>= 1;
    }
    return n < 0 ? inv(r) : r;
}
inline Jet1 pow(const Jet1& a, double p) {
    const double f = std::pow(a.v, p);
    return compose(f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v), a);
}

/// Analyst-Laplacian of a radial jet: Delta u = -(u'' + 2 u'/r).
inline double radial_laplacian(const Jet1& u, double r) { return -(u.dd + 2.0 * u.d / r); }

/// Differential scalar on R^3: value, gradient and analyst Laplacian
/// (Delta = -sum of second derivatives). Products and chain rules follow the
/// analyst sign: Delta(ab) = a Delta b + b Delta a - 2 grad a . grad b,
/// Delta f(a) = f'(a) Delta a - f''(a) |grad a|^2.
struct Jet3 {
    double v = 0.0;
    Vec3 g{};
    double lap = 0.0;  // analyst Laplacian

    static Jet3 constant(double c) { return {c, {0, 0, 0}, 0.0}; }
    /// Linear coordinate function <x - base, e_k> has unit gradient, zero Laplacian.
    static Jet3 linear(double value, const Vec3& gradient) { return {value, gradient, 0.0}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) { return {a.v + b.v, a.g + b.g, a.lap + b.lap}; }
inline Jet3 operator-(const Jet3& a, const Jet3& b) { return {a.v - b.v, a.g - b.g, a.lap - b.lap}; }
inline Jet3 operator-(const Jet3& a) { return {-a.v, -a.g, -a.lap}; }
inline Jet3 operator+(const Jet3& a, double c) { return {a.v + c, a.g, a.lap}; }
inline Jet3 operator+(double c, const Jet3& a) { return a + c; }
inline Jet3 operator-(const Jet3& a, double c) { return {a.v - c, a.g, a.lap}; }
inline Jet3 operator-(double c, const Jet3& a) { return {c - a.v, -a.g, -a.lap}; }
inline Jet3 operator*(const Jet3& a, double c) { return {a.v * c, a.g * c, a.lap * c}; }
inline Jet3 operator*(double c, const Jet3& a) { return a * c; }
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
    return {a.v * b.v, a.g * b.v + b.g * a.v, a.v * b.lap + b.v * a.lap - 2.0 * dot(a.g, b.g)};
}

/// Chain rule through a scalar profile given as a 1D jet at a.v.
inline Jet3 compose(const Jet1& f, const Jet3& a) {
    return {f.v, f.d * a.g, f.d * a.lap - f.dd * norm2(a.g)};
}

inline Jet3 inv(const Jet3& a) { return compose(inv(Jet1::variable(a.v)), a); }
inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * inv(b); }
inline Jet3 operator/(const Jet3& a, double c) { return a * (1.0 / c); }

inline Jet3 pow_int(const Jet3& a, int n) { return compose(pow_int(Jet1::variable(a.v), n), a); }

/// Distance jet |x - c| for x != c: gradient is the unit vector, analyst
/// Laplacian is -2/rho.
inline Jet3 distance_jet(const Vec3& x, const Vec3& c) {
    const Vec3 d = x - c;
    const double rho = norm(d);
    return {rho, d / rho, -2.0 / rho};
}

}  // namespace poholab
