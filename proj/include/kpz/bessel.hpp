#pragma once
// Modified Bessel K for real and imaginary order.
//
// Imaginary order is evaluated in the scaled form S(u,x) = e^{pi u/2} K_{iu}(x),
// which stays O(1) for large u where K_{iu} itself underflows. Two routes:
//  - power series of I_{iu} (u >= x/2): the result is extracted from the
//    imaginary part after rotating by (x/2)^{iu};
//  - rotated saddle contour (u < x/2): a single oscillatory integral with a
//    monotone envelope and bounded phase derivative, so a fixed panel budget
//    proportional to the total phase suffices.
// The certified range for downstream spectral integrals is |u| <= 200.
// Inner loops are allocation free; these run millions of times per basis build.

#include <cmath>
#include <complex>
#include <vector>

#include "kpz/common.hpp"
#include "kpz/gamma.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

inline constexpr double BESSEL_U_CAP = 200.0;

// K_nu(x) for real nu via the cosh integral; the truncation point solves
// x cosh(w) ~ x + 45 + |nu| w so the dropped tail is below e^{-45} relative.
inline double bessel_k_real(double nu, double x) {
    require(x > 0.0, "bessel_k_real: x must be positive");
    const double na = std::abs(nu);
    double w = 1.0;
    for (int i = 0; i < 100; ++i) {
        double arg = (45.0 + na * w + x) / x;
        if (arg > 1e290) arg = 1e290;
        double wn = std::acosh(arg);
        if (std::abs(wn - w) < 1e-12) { w = wn; break; }
        w = wn;
    }
    int panels = static_cast<int>(w * 3.0);
    if (panels < 8) panels = 8;
    if (panels > 300) panels = 300;
    const GaussRule& gr = gauss_legendre(32);
    const double h = w / panels, half = 0.5 * h;
    double j = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < 32; ++i) {
            const double s = mid + half * gr.x[i];
            j += half * gr.w[i] * std::exp(-x * (std::cosh(s) - 1.0)) * std::cosh(nu * s);
        }
    }
    return std::exp(-x) * j;
}

namespace bessel_detail {

// Reciprocal factors 1/(k (k+iu)) shared across x for one u.
struct SeriesTab {
    double u = -1.0;
    std::complex<double> t0;
    std::vector<std::complex<double>> rk;
    void reset(double u_) {
        u = u_;
        t0 = std::exp(-lgamma_complex(std::complex<double>(1.0, u)) - M_PI * u / 2.0);
        rk.clear();
    }
    std::complex<double> factor(int k) {
        while (static_cast<int>(rk.size()) < k)
            rk.push_back(1.0 / (static_cast<double>(rk.size() + 1) *
                                std::complex<double>(rk.size() + 1.0, u)));
        return rk[k - 1];
    }
};

inline double S_series(SeriesTab& tab, double x) {
    const double q = x * x / 4.0;
    std::complex<double> term = tab.t0;
    std::complex<double> sum = term;
    for (int k = 1; k <= 800; ++k) {
        term *= q * tab.factor(k);
        sum += term;
        if (std::abs(term) <= 1e-19 * std::abs(sum) + 1e-300) break;
    }
    std::complex<double> ihat =
        std::exp(std::complex<double>(0.0, tab.u * std::log(x / 2.0))) * sum;
    return -2.0 * M_PI * ihat.imag() / (-std::expm1(-2.0 * M_PI * tab.u));
}

inline double S_contour(double u, double x) {
    const double e = std::sqrt((x - u) * (x + u));
    const double smax = std::acosh(1.0 + 48.0 / e);
    const double phase = std::abs(u * (std::sinh(smax) - smax));
    int panels = static_cast<int>(phase / 3.0 + 8.0);
    if (panels > 400) panels = 400;
    const GaussRule& gr = gauss_legendre(32);
    const double h = smax / panels, half = 0.5 * h;
    double j = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < 32; ++i) {
            const double s = mid + half * gr.x[i];
            j += half * gr.w[i] * std::exp(-e * (std::cosh(s) - 1.0)) *
                 std::cos(u * (s - std::sinh(s)));
        }
    }
    return std::exp(u * std::acos(u / x) - e) * j;
}

}  // namespace bessel_detail

// Scaled imaginary-order K: S(u, x) = e^{pi u/2} K_{iu}(x), even in u.
inline double bessel_k_scaled_imag(double u, double x) {
    require(x > 0.0, "bessel_k_scaled_imag: x must be positive");
    u = std::abs(u);
    if (u > BESSEL_U_CAP)
        throw AccuracyError("bessel_k_scaled_imag: |u| above certified cap 200");
    if (u < 1e-13) return bessel_k_real(0.0, x);
    if (u >= 0.5 * x) {
        bessel_detail::SeriesTab tab;
        tab.reset(u);
        return bessel_detail::S_series(tab, x);
    }
    return bessel_detail::S_contour(u, x);
}

// Fills out[i] = S(u, x[i]) for one u, reusing the series factor table.
inline void bessel_k_scaled_imag_row(double u, const std::vector<double>& x, double* out) {
    u = std::abs(u);
    if (u > BESSEL_U_CAP)
        throw AccuracyError("bessel_k_scaled_imag_row: |u| above certified cap 200");
    bessel_detail::SeriesTab tab;
    bool have_tab = false;
    for (size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0, "bessel_k_scaled_imag_row: x must be positive");
        if (u < 1e-13) {
            out[i] = bessel_k_real(0.0, x[i]);
        } else if (u >= 0.5 * x[i]) {
            if (!have_tab) { tab.reset(u); have_tab = true; }
            out[i] = bessel_detail::S_series(tab, x[i]);
        } else {
            out[i] = bessel_detail::S_contour(u, x[i]);
        }
    }
}

inline KernelValue bessel_k(BesselOrder order, double x, const QuadratureSpec& = {}) {
    KernelValue kv;
    if (order.kind == BesselOrder::real_order) {
        kv.value = bessel_k_real(order.value, x);
        kv.method = "cosh_integral";
        kv.est_error = std::abs(kv.value) * 1e-12;
    } else {
        const double u = std::abs(order.value);
        const double s = bessel_k_scaled_imag(u, x);
        kv.value = s * std::exp(-M_PI * u / 2.0);
        kv.method = u >= 0.5 * x ? "series" : "rotated_contour";
        kv.est_error = std::abs(kv.value) * 1e-12;
    }
    return kv;
}

}  // namespace kpz
