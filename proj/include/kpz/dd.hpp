#pragma once
// Minimal double-double arithmetic (Dekker/Knuth error-free transforms with
// FMA products). Only what the oscillatory Hartman-Watson integral needs:
// +, -, *, / by double, exp, sin on a reduced range, cosh/sinh.
//
// The point of this type: the theta integrand cancels by up to ~e^{pi^2/4t}
// across panels, so the accumulation and the integrand itself are carried at
// ~31 significant digits to keep the *absolute* error of the sum near
// envelope * 1e-32 instead of envelope * 1e-16.

#include <cmath>

namespace kpz {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    dd() = default;
    explicit dd(double h) : hi(h), lo(0.0) {}
    dd(double h, double l) : hi(h), lo(l) {}
};

namespace detail {

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline dd operator+(dd a, dd b) {
    dd s = detail::two_sum(a.hi, b.hi);
    dd t = detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator+(dd a, double b) {
    dd s = detail::two_sum(a.hi, b);
    s.lo += a.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + dd{-b.hi, -b.lo}; }
inline dd operator-(dd a, double b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) {
    dd p = detail::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, double b) {
    double q1 = a.hi / b;
    dd p = detail::two_prod(q1, b);
    dd s = detail::two_sum(a.hi, -p.hi);
    double e = s.lo + a.lo - p.lo;
    double q2 = (s.hi + e) / b;
    return detail::quick_two_sum(q1, q2);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * q1;
    double q2 = r.hi / b.hi;
    r = r - b * q2;
    double q3 = r.hi / b.hi;
    dd q = detail::quick_two_sum(q1, q2);
    return q + q3;
}

inline dd dd_sqr(dd a) {
    dd p = detail::two_prod(a.hi, a.hi);
    p.lo += 2.0 * a.hi * a.lo;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd dd_ldexp(dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

inline double to_double(dd a) { return a.hi + a.lo; }

// e^a; |relative error| ~ 1e-31 over the double exponent range.
inline dd dd_exp(dd a) {
    static const dd LN2{6.931471805599452862e-01, 2.319046813846299558e-17};
    if (a.hi <= -709.0) return dd{0.0};
    if (a.hi >= 709.0) return dd{std::exp(a.hi)};  // overflows to inf, caller guards

    double m = std::floor(a.hi / LN2.hi + 0.5);
    dd r = dd_ldexp(a - LN2 * m, -9);  // r = (a - m ln2) / 512

    // Taylor for e^r - 1 with |r| <= ln2/1024
    dd p = dd_sqr(r);
    dd s = r + dd_ldexp(p, -1);
    p = p * r;
    double fact = 6.0;
    dd t = p / fact;
    int k = 4;
    while (std::abs(t.hi) > 1e-35 && k <= 16) {
        s = s + t;
        p = p * r;
        fact *= k++;
        t = p / fact;
    }
    s = s + t;

    // unscale: (1+s)^512 - 1 by repeated squaring of the "minus one" form
    for (int i = 0; i < 9; ++i) s = dd_ldexp(s, 1) + dd_sqr(s);
    s = s + 1.0;
    return dd_ldexp(s, static_cast<int>(m));
}

// sin(a) for |a| <= pi + eps (caller reduces); Taylor after folding into
// |x| <= pi/2 via sin(pi - x) = sin(x).
inline dd dd_sin(dd a) {
    static const dd PI{3.141592653589793116e+00, 1.224646799147353207e-16};
    static const double HALF_PI = 1.5707963267948966;
    dd x = a;
    if (x.hi > HALF_PI) x = PI - x;
    else if (x.hi < -HALF_PI) x = -PI - x;

    dd x2 = dd_sqr(x);
    dd term = x;
    dd s = x;
    for (int k = 1; k <= 20; ++k) {
        term = term * x2 / static_cast<double>(2 * k * (2 * k + 1));
        term = -term;
        s = s + term;
        if (std::abs(term.hi) < 1e-35 * (std::abs(s.hi) + 1e-300)) break;
    }
    return s;
}

}  // namespace kpz
