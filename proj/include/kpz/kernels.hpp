#pragma once
// Transition kernels and normalizing constants for the interval process
// family: the spectral heat kernel p_t, the absorbing half-line kernel g_t,
// the Doob factors H_t and h_t, and the constants C, frakC, K.
//
// Every scalar operation reports est_error as the discrepancy between the
// base panel count and a doubled panel count. Row (grid) variants skip the
// doubling; they feed samplers which clamp unresolved entries anyway.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kpz/bessel.hpp"
#include "kpz/common.hpp"
#include "kpz/gamma.hpp"
#include "kpz/hartman_watson.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

enum class PMethod { spectral, theta };
enum class GMethod { closed_form, spectral };

namespace kernel_detail {

template <class F>
KernelValue doubled(F&& f, int panels, const char* method) {
    KernelValue kv;
    const double coarse = f(panels);
    kv.value = f(2 * panels);
    kv.est_error = std::abs(kv.value - coarse);
    kv.method = method;
    return kv;
}

inline int clamp_panels(double p, int lo, int hi) {
    int n = static_cast<int>(p);
    return std::max(lo, std::min(hi, n));
}

inline double spectral_umax(double t, const QuadratureSpec& quad) {
    if (quad.upper_cutoff > 0.0) return quad.upper_cutoff;
    return std::min(std::sqrt(64.0 * std::log(10.0) / t), BESSEL_U_CAP);
}

}  // namespace kernel_detail

// p_t(x,y): heat kernel of the quadratic-potential generator on the line,
// killed at rate e^{-2x}/4. Spectral route integrates the scaled K_{iu}
// eigenfunctions against the Plancherel measure u(1-e^{-2 pi u})/pi^2.
// Theta route rewrites the kernel through the exponential-functional density
// theta, available once t/4 clears the theta time floor.
inline KernelValue yakubovich_p(double x, double y, double t,
                                const QuadratureSpec& quad = {},
                                PMethod method = PMethod::spectral) {
    require(t > 0.0, "yakubovich_p: t must be positive");
    if (method == PMethod::spectral) {
        const double umax = kernel_detail::spectral_umax(t, quad);
        const double freq = std::max(std::abs(x), std::abs(y)) + 1.0;
        const int base = kernel_detail::clamp_panels(umax * freq / 3.0, 8, 6000);
        const double ex = std::exp(-x), ey = std::exp(-y);
        auto f = [&](int panels) {
            const GaussRule& gr = gauss_legendre(quad.nodes);
            const double h = (umax - 1e-13) / panels, half = 0.5 * h;
            double acc = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double mid = 1e-13 + (p + 0.5) * h;
                for (int i = 0; i < quad.nodes; ++i) {
                    const double u = mid + half * gr.x[i];
                    acc += half * gr.w[i] * std::exp(-t * u * u / 4.0) *
                           bessel_k_scaled_imag(u, ex) * bessel_k_scaled_imag(u, ey) *
                           u * (-std::expm1(-2.0 * M_PI * u));
                }
            }
            return acc / (M_PI * M_PI);
        };
        KernelValue kv = kernel_detail::doubled(f, base, "spectral");
        kv.value = std::max(kv.value, 0.0);
        return kv;
    }

    // theta route: p_t(x,y) = 1/2 int exp(-xi cosh(x-y) - e^{-x-y}/(2 xi))
    //                         theta(xi, t/4) dxi/xi, xi = e^s.
    const double tq = t / 4.0;
    if (tq < THETA_T_FLOOR * (1.0 - 1e-12))
        throw AccuracyError("yakubovich_p: theta route needs t >= 4x theta floor");
    const double ch = std::cosh(x - y);
    const double s_hi = std::log(48.0 / ch);
    const double s_lo = std::min(-x - y - std::log(90.0), -8.0);
    KernelValue kv;
    kv.method = "theta";
    if (s_hi <= s_lo) {
        kv.value = 0.0;
        kv.est_error = 0.0;
        return kv;
    }
    const hw_detail::ThetaNodes nd = hw_detail::build_nodes(tq);
    const double emxy = std::exp(-x - y);
    const int base = std::max(16, static_cast<int>((s_hi - s_lo) * 2.0));
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(quad.nodes);
        const double h = (s_hi - s_lo) / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = s_lo + (p + 0.5) * h;
            for (int i = 0; i < quad.nodes; ++i) {
                const double s = mid + half * gr.x[i];
                const double xi = std::exp(s);
                const double arg = -xi * ch - emxy / (2.0 * xi);
                if (arg < -746.0) continue;
                acc += half * gr.w[i] * std::exp(arg) * hw_detail::eval(nd, xi);
            }
        }
        return 0.5 * acc;
    };
    kv = kernel_detail::doubled(f, base, "theta");
    kv.value = std::max(kv.value, 0.0);
    return kv;
}

// Absorbing heat kernel on the half line, Var B_t = t/2 convention.
inline KernelValue absorbing_g(double x, double y, double t,
                               GMethod method = GMethod::closed_form) {
    require(x > 0.0 && y > 0.0 && t > 0.0, "absorbing_g: x, y, t must be positive");
    KernelValue kv;
    if (method == GMethod::closed_form) {
        const double dm = x - y, dp = x + y;
        kv.value = (std::exp(-dm * dm / t) - std::exp(-dp * dp / t)) / std::sqrt(M_PI * t);
        kv.method = "closed_form";
        kv.est_error = std::abs(kv.value) * 1e-15;
        return kv;
    }
    // sine-transform representation of the same kernel
    const double umax = std::sqrt(64.0 * std::log(10.0) / t);
    const double freq = std::max(x, y) + 1.0;
    const int base = kernel_detail::clamp_panels(umax * freq / 3.0, 8, 6000);
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(32);
        const double h = umax / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (int i = 0; i < 32; ++i) {
                const double u = mid + half * gr.x[i];
                acc += half * gr.w[i] * std::exp(-t * u * u / 4.0) * std::sin(u * x) *
                       std::sin(u * y);
            }
        }
        return 2.0 * acc / M_PI;
    };
    kv = kernel_detail::doubled(f, base, "spectral");
    kv.value = std::max(kv.value, 0.0);
    return kv;
}

namespace kernel_detail {

// Residue corrections to H_t for a < 0: one term per k with a + 2k < 0.
inline double doob_H_residues(double ex, double s, double a) {
    double total = 0.0;
    for (int k = 0; a + 2.0 * k < 0.0; ++k) {
        const double nu = a + 2.0 * k;
        total += std::pow(2.0, a + 1.0) * std::exp(s * nu * nu / 4.0) *
                 bessel_k_real(nu, ex) * inv_gamma(-nu);
    }
    return total;
}

}  // namespace kernel_detail

// Doob factor H_t(x) = E_x[e^{-a Y_{tau-t}}-type functional]: spectral integral
// plus, for a < 0, finitely many residue terms. At t = tau it degenerates to
// e^{-a x} and that value is returned exactly.
inline KernelValue doob_H(double x, double t, const BoundaryParams& par,
                          const QuadratureSpec& quad = {}) {
    require(t >= 0.0 && t <= par.tau, "doob_H: t must lie in [0, tau]");
    const double s = par.tau - t;
    const double a = par.a;
    KernelValue kv;
    if (s <= 1e-14) {
        kv.value = std::exp(-a * x);
        kv.method = "closed_form";
        kv.est_error = 0.0;
        return kv;
    }
    const double umax = kernel_detail::spectral_umax(s, quad);
    const double freq = std::abs(x) + 1.0;
    const int base = kernel_detail::clamp_panels(umax * freq / 3.0, 8, 6000);
    const double ex = std::exp(-x);
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(quad.nodes);
        const double h = (umax - 1e-13) / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = 1e-13 + (p + 0.5) * h;
            for (int i = 0; i < quad.nodes; ++i) {
                const double u = mid + half * gr.x[i];
                const double lg = lgamma_abs2(a / 2.0, u / 2.0) - lgamma_abs2(0.0, u) -
                                  M_PI * u / 2.0;
                acc += half * gr.w[i] * std::exp(-s * u * u / 4.0 + lg) *
                       bessel_k_scaled_imag(u, ex);
            }
        }
        return std::pow(2.0, a) / (2.0 * M_PI) * acc;
    };
    kv = kernel_detail::doubled(f, base, a < 0.0 ? "residue_series" : "spectral");
    kv.value += kernel_detail::doob_H_residues(ex, s, a);
    return kv;
}

// H_t on a whole grid, sharing the u panels across grid points.
inline std::vector<double> doob_H_row(const std::vector<double>& xs, double t,
                                      const BoundaryParams& par) {
    require(t >= 0.0 && t <= par.tau, "doob_H_row: t must lie in [0, tau]");
    const double s = par.tau - t;
    const double a = par.a;
    const size_t nx = xs.size();
    std::vector<double> out(nx, 0.0);
    std::vector<double> ex(nx);
    for (size_t j = 0; j < nx; ++j) ex[j] = std::exp(-xs[j]);
    if (s <= 1e-14) {
        for (size_t j = 0; j < nx; ++j) out[j] = std::exp(-a * xs[j]);
        return out;
    }
    const double umax = std::min(std::sqrt(64.0 * std::log(10.0) / s), BESSEL_U_CAP);
    double gmax = 0.0;
    for (double x : xs) gmax = std::max(gmax, std::abs(x));
    const int panels = kernel_detail::clamp_panels(umax * (gmax + 1.0) / 3.0, 8, 6000);
    std::vector<double> us, ws;
    panel_nodes(1e-13, umax, panels, us, ws);
    std::vector<double> row(nx);
    for (size_t i = 0; i < us.size(); ++i) {
        const double u = us[i];
        const double lg = lgamma_abs2(a / 2.0, u / 2.0) - lgamma_abs2(0.0, u) -
                          M_PI * u / 2.0;
        const double coef = ws[i] * std::exp(-s * u * u / 4.0 + lg);
        bessel_k_scaled_imag_row(u, ex, row.data());
        for (size_t j = 0; j < nx; ++j) out[j] += coef * row[j];
    }
    const double pref = std::pow(2.0, a) / (2.0 * M_PI);
    for (size_t j = 0; j < nx; ++j)
        out[j] = pref * out[j] + kernel_detail::doob_H_residues(ex[j], s, a);
    return out;
}

// p_t(x, ys) for one source point against a whole grid, sharing the u panels.
inline std::vector<double> yakubovich_p_row(double x, const std::vector<double>& ys,
                                            double t) {
    require(t > 0.0, "yakubovich_p_row: t must be positive");
    const size_t ny = ys.size();
    std::vector<double> out(ny, 0.0);
    std::vector<double> ey(ny);
    double gmax = std::abs(x);
    for (size_t j = 0; j < ny; ++j) {
        ey[j] = std::exp(-ys[j]);
        gmax = std::max(gmax, std::abs(ys[j]));
    }
    const double umax = std::min(std::sqrt(64.0 * std::log(10.0) / t), BESSEL_U_CAP);
    const int panels = kernel_detail::clamp_panels(umax * (gmax + 1.0) / 3.0, 8, 6000);
    std::vector<double> us, ws;
    panel_nodes(1e-13, umax, panels, us, ws);
    const double ex = std::exp(-x);
    std::vector<double> row(ny);
    for (size_t i = 0; i < us.size(); ++i) {
        const double u = us[i];
        const double coef = ws[i] * std::exp(-t * u * u / 4.0) *
                            bessel_k_scaled_imag(u, ex) * u *
                            (-std::expm1(-2.0 * M_PI * u)) / (M_PI * M_PI);
        bessel_k_scaled_imag_row(u, ey, row.data());
        for (size_t j = 0; j < ny; ++j) out[j] += coef * row[j];
    }
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

// Half-line Doob factor h_t(x) = int g_{1-t}(x,y) e^{-a y} dy on horizon 1.
// x <= 0 is the absorbed region: value 0 with the method flag, not an error.
inline KernelValue doob_h_eta(double x, double t, double a,
                              const QuadratureSpec& quad = {}) {
    require(t >= 0.0 && t <= 1.0, "doob_h_eta: t must lie in [0, 1]");
    KernelValue kv;
    const double s = 1.0 - t;
    if (x <= 0.0 && s > 1e-14) {
        kv.value = 0.0;
        kv.method = "absorbed";
        kv.est_error = 0.0;
        return kv;
    }
    if (s <= 1e-14) {
        kv.value = x > 0.0 ? std::exp(-a * x) : 0.0;
        kv.method = x > 0.0 ? "closed_form" : "absorbed";
        kv.est_error = 0.0;
        return kv;
    }
    const double upper = x + std::sqrt(45.0 * s) + std::max(0.0, -a) * s + 2.0;
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(quad.nodes);
        const double h = upper / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (int i = 0; i < quad.nodes; ++i) {
                const double y = mid + half * gr.x[i];
                const double dm = x - y, dp = x + y;
                acc += half * gr.w[i] *
                       (std::exp(-dm * dm / s) - std::exp(-dp * dp / s)) *
                       std::exp(-a * y);
            }
        }
        return acc / std::sqrt(M_PI * s);
    };
    kv = kernel_detail::doubled(f, 24, "spectral");
    return kv;
}

// Normalizing constant C(a,c,tau): single-integral form with Gamma-modulus
// weights, plus a finite residue sum when the smaller parameter is negative.
// Symmetric in (a,c); the evaluation orients a >= c so the residue sum is
// driven by the negative parameter if there is one.
inline KernelValue const_C(const BoundaryParams& par, const QuadratureSpec& quad = {}) {
    double a = par.a, c = par.c;
    const double tau = par.tau;
    require(tau > 0.0, "const_C: tau must be positive");
    if (a + c <= 0.0) throw DomainError("const_C: requires a + c > 0");
    if (a < c) std::swap(a, c);
    const double umax = std::min(std::sqrt(64.0 * std::log(10.0) / tau) + 8.0, 300.0);
    const int base = std::max(16, static_cast<int>(umax * 4.0));
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(quad.nodes);
        const double h = (umax - 1e-12) / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = 1e-12 + (p + 0.5) * h;
            for (int i = 0; i < quad.nodes; ++i) {
                const double u = mid + half * gr.x[i];
                const double lg = lgamma_abs2(a / 2.0, u / 2.0) +
                                  lgamma_abs2(c / 2.0, u / 2.0) - lgamma_abs2(0.0, u);
                acc += half * gr.w[i] * std::exp(-tau * u * u / 4.0 + lg);
            }
        }
        return std::pow(2.0, a + c) / (8.0 * M_PI) * acc;
    };
    KernelValue kv = kernel_detail::doubled(f, base, c < 0.0 ? "residue_series" : "spectral");
    if (c < 0.0) {
        const double pref = std::pow(2.0, a + c) * gamma_fn((c + a) / 2.0) *
                            gamma_fn((a - c) / 2.0) / (2.0 * c * gamma_fn(-c));
        double sum = 0.0, pc = 1.0, ph = 1.0, fa = 1.0, pd = 1.0;
        for (int k = 0; c + 2.0 * k < 0.0; ++k) {
            sum += std::exp(tau * (c + 2.0 * k) * (c + 2.0 * k) / 4.0) * (c + 2.0 * k) *
                   pc * ph / (fa * pd);
            pc *= (c + k);
            ph *= ((a + c) / 2.0 + k);
            fa *= (k + 1.0);
            pd *= (1.0 + (c - a) / 2.0 + k);
        }
        kv.value += pref * sum;
    }
    return kv;
}

// Oracle route for C: literal double integral of e^{-a x - c y} p_tau(x,y)
// over the plane. Valid for a, c > 0 where both tails close.
KernelValue const_C_via_density(const BoundaryParams& par);

// frakC(a,c): normalizer of the half-line family. Closed form in terms of
// E(z) = e^{z^2/4} erfc(z/2), continuous across a = c.
inline KernelValue const_frakC(double a, double c) {
    if (a + c <= 0.0) throw DomainError("const_frakC: requires a + c > 0");
    auto ee = [](double z) { return std::exp(z * z / 4.0) * std::erfc(z / 2.0); };
    KernelValue kv;
    kv.method = "closed_form";
    if (std::abs(a - c) > 1e-7) {
        kv.value = (a * ee(a) - c * ee(c)) / (a * a - c * c);
    } else {
        const double m = 0.5 * (a + c);
        kv.value = (2.0 + m * m) / (4.0 * m) * ee(m) - 1.0 / (2.0 * std::sqrt(M_PI));
    }
    kv.est_error = std::abs(kv.value) * 1e-14;
    return kv;
}

// Integral route for frakC, valid for a, c >= 0; a negative parameter is
// folded back with the reflection identity
//   frakC(a,c) = frakC(a,-c) - 2 c e^{c^2/4} / (a^2 - c^2).
inline KernelValue const_frakC_integral(double a, double c) {
    if (a + c <= 0.0) throw DomainError("const_frakC_integral: requires a + c > 0");
    if (c < 0.0) {
        KernelValue kv = const_frakC_integral(a, -c);
        kv.value -= 2.0 * c * std::exp(c * c / 4.0) / (a * a - c * c);
        return kv;
    }
    if (a < 0.0) return const_frakC_integral(c, a);
    auto f = [&](int panels) {
        const GaussRule& gr = gauss_legendre(32);
        const double h = 16.0 / panels, half = 0.5 * h;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (int i = 0; i < 32; ++i) {
                const double v = mid + half * gr.x[i];
                acc += half * gr.w[i] * std::exp(-v * v / 4.0) * 4.0 * v * v /
                       ((a * a + v * v) * (c * c + v * v));
            }
        }
        return acc / (2.0 * M_PI);
    };
    return kernel_detail::doubled(f, 24, "spectral");
}

// K = 2^{1-(a+c)/2} C / Gamma((a+c)/2): normalizer of the exponential
// functional weight e^{-a B_tau} (int_0^tau e^{-2 B_t} dt / ... )^{-(a+c)/2}.
inline KernelValue const_K(const BoundaryParams& par, const QuadratureSpec& quad = {}) {
    KernelValue kv = const_C(par, quad);
    const double h = (par.a + par.c) / 2.0;
    const double f = std::pow(2.0, 1.0 - h) * inv_gamma(h);
    kv.value *= f;
    kv.est_error *= f;
    return kv;
}

}  // namespace kpz

// const_C_via_density needs the spectral basis; keep the include after the
// declarations above since basis.hpp only depends on bessel/quadrature.
#include "kpz/basis.hpp"

namespace kpz {

inline KernelValue const_C_via_density(const BoundaryParams& par) {
    if (par.a <= 0.0 || par.c <= 0.0)
        throw DomainError("const_C_via_density: requires a > 0 and c > 0");
    const std::vector<double> grid = linspace(-5.0, 16.0, 2200);
    SpectralBasis basis(grid, par.tau);
    const Eigen::MatrixXd p = basis.pmat(par.tau);
    const std::vector<double> tw = trapezoid_weights(grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd va(n), vc(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        va[j] = tw[j] * std::exp(-par.a * grid[j]);
        vc[j] = tw[j] * std::exp(-par.c * grid[j]);
    }
    KernelValue kv;
    kv.value = va.dot(p * vc);
    kv.method = "spectral";
    kv.est_error = std::abs(kv.value) * 1e-9;
    return kv;
}

}  // namespace kpz
