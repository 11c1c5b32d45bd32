#pragma once
// Hartman-Watson density theta(xi, t), normalized by the Laplace relation
// int_0^inf e^{-lambda^2 t} theta(xi, t) dt = I_lambda(xi).
//
// Evaluated by the explicit oscillatory integral
//   theta(xi,t) = xi / sqrt(pi^3 t) * e^{pi^2/(4t)}
//                 * int_0^inf e^{-y^2/(4t)} e^{-xi cosh y} sinh(y) sin(pi y / (2t)) dy
// carried entirely in double-double arithmetic: the prefactor amplifies the
// cancelling integral by e^{pi^2/(4t)}, which costs ~21 digits at the floor
// t = 0.05. The quadrature nodes themselves are carried in double-double too;
// the sum is so finely cancelled that the ~1e-16 rounding of an ordinary
// double node, multiplied by the integrand slope ~ (pi/2t) * envelope, would
// dominate everything else. Below the floor the true value is smaller than
// the evaluation noise and the routine refuses to evaluate.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "kpz/common.hpp"
#include "kpz/dd.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

inline constexpr double THETA_T_FLOOR = 0.05;

namespace hw_detail {

struct GaussRuleDD {
    std::vector<dd> x;
    std::vector<dd> w;
};

// Double-double Gauss-Legendre rule: Newton-refine the double nodes with the
// Legendre recurrence evaluated in dd.
inline const GaussRuleDD& gauss_legendre_dd(int n) {
    static std::map<int, GaussRuleDD> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const GaussRule& seed = gauss_legendre(n);
    GaussRuleDD r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        dd x{seed.x[i]};
        dd dp{0.0};
        for (int iter = 0; iter < 4; ++iter) {
            dd p0{1.0}, p1 = x;
            for (int k = 2; k <= n; ++k) {
                dd p2 = (x * p1 * static_cast<double>(2 * k - 1) -
                         p0 * static_cast<double>(k - 1)) /
                        static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = (x * p1 - p0) * static_cast<double>(n) / (dd_sqr(x) - 1.0);
            dd dx = p1 / dp;
            x = x - dx;
            if (std::abs(dx.hi) < 1e-30) break;
        }
        r.x[i] = x;
        r.w[i] = dd{2.0} / ((dd{1.0} - dd_sqr(x)) * dd_sqr(dp));
    }
    return cache.emplace(n, std::move(r)).first->second;
}

struct ThetaNodes {
    // per quadrature node: cosh(y) and w * sinh(y) * sin(pi y/(2t)), with the
    // Gaussian exponent -y^2/(4t) kept separate in dd
    std::vector<dd> cosh_y;
    std::vector<dd> pre;
    std::vector<dd> gauss_exp;
    double pref_log;  // log of xi-independent part of the prefactor
};

inline ThetaNodes build_nodes(double t) {
    static const dd TWO_PI{6.283185307179586232e+00, 2.449293598294706414e-16};
    ThetaNodes nd;
    const double ymax = std::sqrt(M_PI * M_PI + 4.0 * t * 45.0);
    const double period = 4.0 * t;
    int panels = static_cast<int>(6.0 * ymax / period);
    if (panels < 12) panels = 12;
    if (panels > 6000) panels = 6000;

    const GaussRuleDD& gr = gauss_legendre_dd(32);
    const size_t n = static_cast<size_t>(panels) * 32;
    nd.cosh_y.resize(n);
    nd.pre.resize(n);
    nd.gauss_exp.resize(n);
    const double four_t = 4.0 * t;
    const dd h = dd{ymax} / static_cast<double>(panels);
    const dd half = dd_ldexp(h, -1);
    for (int p = 0; p < panels; ++p) {
        const dd mid = h * (p + 0.5);
        for (int j = 0; j < 32; ++j) {
            const size_t i = static_cast<size_t>(p) * 32 + j;
            const dd y = mid + half * gr.x[j];
            const dd w = half * gr.w[j];
            dd ey = dd_exp(y);
            dd emy = dd_exp(-y);
            nd.cosh_y[i] = dd_ldexp(ey + emy, -1);
            dd sinh_y = dd_ldexp(ey - emy, -1);
            // sin(pi y/(2t)) = sin(2 pi frac(y/(4t))), reduced exactly in dd
            dd m = y / four_t;
            double k = std::nearbyint(m.hi);
            dd arg = TWO_PI * (m - k);
            nd.pre[i] = sinh_y * dd_sin(arg) * w;
            nd.gauss_exp[i] = -dd_sqr(y) / four_t;
        }
    }
    nd.pref_log = -0.5 * std::log(M_PI * M_PI * M_PI * t) + M_PI * M_PI / (4.0 * t);
    return nd;
}

inline double eval(const ThetaNodes& nd, double xi) {
    dd acc{0.0};
    for (size_t i = 0; i < nd.cosh_y.size(); ++i) {
        dd ex = nd.gauss_exp[i] - nd.cosh_y[i] * xi;
        if (ex.hi < -746.0) continue;
        acc = acc + dd_exp(ex) * nd.pre[i];
    }
    return xi * std::exp(nd.pref_log) * to_double(acc);
}

}  // namespace hw_detail

// At the floor t = 0.05 the evaluation noise is ~1e-13 absolute (the node
// rounding at ~1e-32, amplified by e^{pi^2/(4t)}); true values below that
// level come back as noise and are clamped at zero from below.
inline double hartman_watson_theta(double xi, double t) {
    require(xi > 0.0, "theta: xi must be positive");
    require(t > 0.0, "theta: t must be positive");
    if (t < THETA_T_FLOOR)
        throw AccuracyError("theta: t below evaluation floor 0.05");
    return std::max(0.0, hw_detail::eval(hw_detail::build_nodes(t), xi));
}

// Shared-node evaluation across many xi at one t (used by the kernel routes).
inline std::vector<double> hartman_watson_theta_row(const std::vector<double>& xis, double t) {
    require(t > 0.0, "theta: t must be positive");
    if (t < THETA_T_FLOOR)
        throw AccuracyError("theta: t below evaluation floor 0.05");
    hw_detail::ThetaNodes nd = hw_detail::build_nodes(t);
    std::vector<double> out(xis.size());
    for (size_t j = 0; j < xis.size(); ++j) {
        require(xis[j] > 0.0, "theta: xi must be positive");
        out[j] = std::max(0.0, hw_detail::eval(nd, xis[j]));
    }
    return out;
}

}  // namespace kpz
