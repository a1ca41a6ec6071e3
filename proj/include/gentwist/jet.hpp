#pragma once

#include <cmath>

#include "gentwist/types.hpp"

namespace gentwist {

// Second-order forward-mode jet: value, gradient and symmetric Hessian with
// respect to the chart coordinates.  Arithmetic propagates derivatives exactly;
// no finite differencing is involved.
struct Jet2 {
    double v = 0.0;
    Vec g;
    Mat h;

    Jet2() = default;
    Jet2(double value, int dim) : v(value), g(Vec::Zero(dim)), h(Mat::Zero(dim, dim)) {}
    Jet2(double value, Vec grad, Mat hess) : v(value), g(std::move(grad)), h(std::move(hess)) {}

    int dim() const { return static_cast<int>(g.size()); }

    static Jet2 constant(double value, int dim) { return Jet2(value, dim); }
    static Jet2 coordinate(double value, int index, int dim) {
        Jet2 j(value, dim);
        j.g(index) = 1.0;
        return j;
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return Jet2(a.v + b.v, a.g + b.g, a.h + b.h); }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return Jet2(a.v - b.v, a.g - b.g, a.h - b.h); }
inline Jet2 operator-(const Jet2& a) { return Jet2(-a.v, -a.g, -a.h); }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    // (fg)'' = f'' g + f' g'^T + g' f'^T + f g''
    return Jet2(a.v * b.v, a.v * b.g + b.v * a.g,
                a.h * b.v + a.g * b.g.transpose() + b.g * a.g.transpose() + a.v * b.h);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw DomainError("jet division by zero");
    const double w = a.v / b.v;
    Vec wg = (a.g - w * b.g) / b.v;
    Mat wh = (a.h - w * b.h - wg * b.g.transpose() - b.g * wg.transpose()) / b.v;
    return Jet2(w, std::move(wg), std::move(wh));
}

inline Jet2 operator*(double s, const Jet2& a) { return Jet2(s * a.v, s * a.g, s * a.h); }
inline Jet2 operator+(const Jet2& a, double s) { return Jet2(a.v + s, a.g, a.h); }

// Lift of a C^2 scalar function through a jet: f(u), f'(u), f''(u).
inline Jet2 chain(const Jet2& u, double f, double df, double d2f) {
    return Jet2(f, df * u.g, df * u.h + d2f * (u.g * u.g.transpose()));
}

inline Jet2 sin(const Jet2& u) { return chain(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline Jet2 cos(const Jet2& u) { return chain(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
inline Jet2 exp(const Jet2& u) { const double e = std::exp(u.v); return chain(u, e, e, e); }
inline Jet2 atan(const Jet2& u) {
    const double d = 1.0 / (1.0 + u.v * u.v);
    return chain(u, std::atan(u.v), d, -2.0 * u.v * d * d);
}

inline Jet2 log(const Jet2& u) {
    if (u.v <= 0.0) throw DomainError("log of non-positive value " + std::to_string(u.v));
    return chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}

inline Jet2 sqrt(const Jet2& u) {
    if (u.v < 0.0) throw DomainError("sqrt of negative value " + std::to_string(u.v));
    if (u.v == 0.0) throw DomainError("sqrt jet undefined at zero");
    const double r = std::sqrt(u.v);
    return chain(u, r, 0.5 / r, -0.25 / (r * u.v));
}

// u^r for a constant exponent.  Integer exponents are valid on all of R,
// real exponents require u > 0.
inline Jet2 pow(const Jet2& u, double r) {
    const bool integral = (r == std::floor(r)) && std::abs(r) < 1e9;
    if (!integral && u.v <= 0.0)
        throw DomainError("pow with non-integer exponent needs positive base, got " + std::to_string(u.v));
    const double f = std::pow(u.v, r);
    const double df = (r == 0.0) ? 0.0 : r * std::pow(u.v, r - 1.0);
    const double d2f = (r == 0.0 || r == 1.0) ? 0.0 : r * (r - 1.0) * std::pow(u.v, r - 2.0);
    return chain(u, f, df, d2f);
}

}  // namespace gentwist
