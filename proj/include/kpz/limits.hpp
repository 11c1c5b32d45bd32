#pragma once
// Verification suites for the limit theorems: each suite compares exact
// densities or Monte Carlo laws against the claimed limit along a ladder of
// scales and reports a trend verdict plus an endpoint verdict per target.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "kpz/common.hpp"
#include "kpz/density.hpp"
#include "kpz/kernels.hpp"
#include "kpz/processes.hpp"
#include "kpz/report.hpp"

namespace kpz {

// Sup distance between two CDFs built from weighted samples. Empty weight
// vectors mean equal weights. Merge-scan over the union of sorted values.
inline double ks_distance_weighted(std::vector<double> x1, std::vector<double> w1,
                                   std::vector<double> x2, std::vector<double> w2) {
    require(!x1.empty() && !x2.empty(), "ks_distance: empty input");
    if (w1.empty()) w1.assign(x1.size(), 1.0);
    if (w2.empty()) w2.assign(x2.size(), 1.0);
    require(w1.size() == x1.size() && w2.size() == x2.size(),
            "ks_distance: weight length mismatch");
    auto order = [](std::vector<double>& xs, std::vector<double>& ws) {
        std::vector<size_t> idx(xs.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return xs[i] < xs[j]; });
        std::vector<double> xs2(xs.size()), ws2(xs.size());
        double tot = 0.0;
        for (double w : ws) tot += w;
        for (size_t k = 0; k < idx.size(); ++k) {
            xs2[k] = xs[idx[k]];
            ws2[k] = ws[idx[k]] / tot;
        }
        xs = std::move(xs2);
        ws = std::move(ws2);
    };
    order(x1, w1);
    order(x2, w2);
    double f1 = 0.0, f2 = 0.0, d = 0.0;
    size_t i = 0, j = 0;
    while (i < x1.size() || j < x2.size()) {
        const double v = (j >= x2.size() || (i < x1.size() && x1[i] <= x2[j])) ? x1[i]
                                                                               : x2[j];
        while (i < x1.size() && x1[i] <= v) f1 += w1[i++];
        while (j < x2.size() && x2[j] <= v) f2 += w2[j++];
        d = std::max(d, std::abs(f1 - f2));
    }
    return std::min(1.0, d);
}

inline double ks_distance(const std::vector<double>& x1, const std::vector<double>& x2) {
    return ks_distance_weighted(x1, {}, x2, {});
}

// Empirical sample against a density table's integrated CDF.
inline double ks_distance(std::vector<double> xs, const DensityTable& tab) {
    require(!xs.empty() && !tab.grid.empty(), "ks_distance: empty input");
    std::sort(xs.begin(), xs.end());
    const std::vector<double> cdf = build_cdf(tab);
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf_at(tab.grid, cdf, xs[i]);
        d = std::max(d, std::max(std::abs((i + 1) / n - F), std::abs(i / n - F)));
    }
    return std::min(1.0, d);
}

// Two density tables, compared on the union of their grids.
inline double ks_distance(const DensityTable& t1, const DensityTable& t2) {
    require(!t1.grid.empty() && !t2.grid.empty(), "ks_distance: empty input");
    const std::vector<double> c1 = build_cdf(t1), c2 = build_cdf(t2);
    double d = 0.0;
    for (double x : t1.grid)
        d = std::max(d, std::abs(cdf_at(t1.grid, c1, x) - cdf_at(t2.grid, c2, x)));
    for (double x : t2.grid)
        d = std::max(d, std::abs(cdf_at(t1.grid, c1, x) - cdf_at(t2.grid, c2, x)));
    return std::min(1.0, d);
}

struct LimitSuite {
    std::string name;
    std::vector<double> scales;  // increasing; larger = closer to the limit
    double endpoint_tol = 0.05;
    int n = 0;        // Monte Carlo sample count where applicable
    int steps = 2000; // path discretization where applicable
    uint64_t seed = 12345;
};

inline std::vector<std::string> suite_names() {
    return {"y2x",        "kpz_fixed",    "halfline_mc", "halfline_hd",
            "halfline_ld", "exp_limit",    "asymp_normal", "bessel3",
            "rho_hd",     "edwards_wilkinson", "scaling_fixed_point"};
}

inline LimitSuite default_suite(const std::string& name) {
    LimitSuite s;
    s.name = name;
    if (name == "y2x") {
        s.scales = {1000, 10000, 100000};
        s.endpoint_tol = 0.02;
    } else if (name == "kpz_fixed" || name == "halfline_mc" || name == "halfline_hd" ||
               name == "bessel3" || name == "rho_hd") {
        s.scales = {4, 16, 64};
        s.endpoint_tol = 0.05;
    } else if (name == "halfline_ld") {
        s.scales = {4, 16, 64};
        s.n = 20000;
    } else if (name == "exp_limit") {
        s.scales = {10, 50, 250};  // scale = 1/epsilon
        s.endpoint_tol = 0.02;
    } else if (name == "asymp_normal") {
        s.scales = {25, 100, 400};
        s.endpoint_tol = 0.05;
    } else if (name == "edwards_wilkinson") {
        s.scales = {6.25, 25, 100};  // scale = 1/tau
        s.n = 40000;
    } else if (name == "scaling_fixed_point") {
        s.scales = {4, 9, 25};
        s.endpoint_tol = 1e-12;
    } else {
        throw DomainError("unknown suite '" + name + "'");
    }
    return s;
}

namespace limit_detail {

inline void validate(const LimitSuite& s) {
    require(s.scales.size() >= 3, "LimitSuite: needs at least 3 scales");
    for (size_t i = 1; i < s.scales.size(); ++i)
        require(s.scales[i] > s.scales[i - 1], "LimitSuite: scales must increase");
}

inline std::string ladder_str(const std::vector<double>& v, int prec = 6) {
    std::string out = "[";
    char buf[64];
    for (size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v[i]);
        out += buf;
        if (i + 1 < v.size()) out += ", ";
    }
    return out + "]";
}

// Trend verdict: deviations nonincreasing along the ladder, with an optional
// per-step statistical slack for Monte Carlo checks. Statistic is the worst
// adjacent increase beyond slack; <= 0 passes.
inline CheckResult trend_check(const std::string& target, const std::vector<double>& devs,
                               const std::vector<double>& slack = {}) {
    double worst = -1e300;
    for (size_t i = 0; i + 1 < devs.size(); ++i) {
        double allow = slack.empty() ? 0.0 : slack[i];
        worst = std::max(worst, devs[i + 1] - devs[i] - allow);
    }
    std::string desc = target + " trend nonincreasing, deviations " + ladder_str(devs);
    if (!slack.empty()) desc += " with slack " + ladder_str(slack, 2);
    return {desc, worst, 0.0, worst <= 0.0};
}

inline CheckResult endpoint_check(const std::string& target, double scale, double dev,
                                  double tol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", scale);
    return {target + " endpoint at scale " + buf, dev, tol, dev < tol, scale};
}

// 201-point comparison grid spanning where the limit density exceeds 1e-8 of
// its max, probed on [lo, hi].
inline std::vector<double> spec_grid(const std::function<double(double)>& f, double lo,
                                     double hi, int n = 201) {
    const std::vector<double> probe = linspace(lo, hi, 3000);
    double m = 0.0;
    for (double x : probe) m = std::max(m, f(x));
    require(m > 0.0, "spec_grid: limit density vanishes on the probe window");
    size_t first = 0, last = probe.size() - 1;
    while (first < probe.size() && f(probe[first]) <= 1e-8 * m) ++first;
    while (last > first && f(probe[last]) <= 1e-8 * m) --last;
    return linspace(probe[first], probe[last], n);
}

inline double g_closed(double t, double x, double y) {
    const double dm = x - y, dp = x + y;
    return (std::exp(-dm * dm / t) - std::exp(-dp * dp / t)) / std::sqrt(M_PI * t);
}

inline double sup_dev(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Shared ladder runner for the five density suites: 'scaled' maps a scale to
// (grid-aligned) density values; target is fixed.
inline void density_ladder(VerificationReport& rep, const std::string& name,
                           const std::vector<double>& scales, double tol,
                           const std::vector<double>& target,
                           const std::function<std::vector<double>(double)>& scaled) {
    std::vector<double> devs;
    for (double s : scales) devs.push_back(sup_dev(scaled(s), target));
    rep.checks.push_back(trend_check(name, devs));
    rep.checks.push_back(endpoint_check(name, scales.back(), devs.back(), tol));
}

inline std::vector<double> scale_vec(const std::vector<double>& xs, double f) {
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] * f;
    return out;
}

// Limit initial densities of the half-line families.
inline double z_mc_init(double c, double x) {
    return 4.0 * std::exp(-c * x) * bessel_k_real(0.0, std::exp(-x)) /
           (std::pow(2.0, c) * gamma_fn(c / 2.0) * gamma_fn(c / 2.0));
}

inline double z_hd_init(double a, double c, double x) {
    return 4.0 * std::exp(-c * x) * bessel_k_real(a, std::exp(-x)) /
           (std::pow(2.0, c) * gamma_fn((c - a) / 2.0) * gamma_fn((c + a) / 2.0));
}

inline VerificationReport suite_kpz_fixed(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double a = 0.3, c = 0.3;
    rep.config = "a=0.3 c=0.3 scaled-parameter ladder tau=" + ladder_str(cfg.scales);
    const double fC = const_frakC(a, c).value;
    auto lim_init = [&](double x) {
        return x > 0.0 ? std::exp(-c * x) * doob_h_eta(x, 0.0, a).value / fC : 0.0;
    };
    const std::vector<double> xs = spec_grid(lim_init, 1e-6, 40.0 / (a + c));
    std::vector<double> target(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) target[i] = lim_init(xs[i]);
    density_ladder(rep, "initial law sup deviation", cfg.scales, cfg.endpoint_tol, target,
                   [&](double tau) {
                       const double rt = std::sqrt(tau);
                       const BoundaryParams par{a / rt, c / rt, tau};
                       const std::vector<double> gs = scale_vec(xs, rt);
                       const std::vector<double> H0 = doob_H_row(gs, 0.0, par);
                       const double C = const_C(par).value;
                       std::vector<double> v(xs.size());
                       for (size_t i = 0; i < xs.size(); ++i)
                           v[i] = rt * std::exp(-par.c * gs[i]) * H0[i] / C;
                       return v;
                   });

    const double s_ = 0.25, t_ = 0.75, x_ = 1.0;
    const std::vector<double> ys = linspace(1e-4, 14.0, 261);
    const double hs_lim = doob_h_eta(x_, s_, a).value;
    std::vector<double> tr_target(ys.size());
    for (size_t i = 0; i < ys.size(); ++i)
        tr_target[i] = doob_h_eta(ys[i], t_, a).value * g_closed(t_ - s_, x_, ys[i]) / hs_lim;
    density_ladder(rep, "transition kernel sup deviation", cfg.scales, cfg.endpoint_tol,
                   tr_target, [&](double tau) {
                       const double rt = std::sqrt(tau);
                       const BoundaryParams par{a / rt, c / rt, tau};
                       const std::vector<double> gy = scale_vec(ys, rt);
                       const std::vector<double> Ht = doob_H_row(gy, t_ * tau, par);
                       const double Hs = doob_H(x_ * rt, s_ * tau, par).value;
                       const std::vector<double> pv =
                           yakubovich_p_row(x_ * rt, gy, (t_ - s_) * tau);
                       std::vector<double> v(ys.size());
                       for (size_t i = 0; i < ys.size(); ++i) v[i] = rt * Ht[i] * pv[i] / Hs;
                       return v;
                   });
    return rep;
}

inline VerificationReport suite_halfline(const LimitSuite& cfg, double a, double c) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    rep.config = "a=" + std::to_string(a) + " c=" + std::to_string(c) +
                 " tau=" + ladder_str(cfg.scales);
    const bool hd = cfg.name == "halfline_hd";
    auto lim_init = [&](double x) { return hd ? z_hd_init(a, c, x) : z_mc_init(c, x); };
    const std::vector<double> xs = spec_grid(lim_init, -6.0, 14.0);
    std::vector<double> target(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) target[i] = lim_init(xs[i]);
    density_ladder(rep, "initial law sup deviation", cfg.scales, cfg.endpoint_tol, target,
                   [&](double tau) {
                       const BoundaryParams par{a, c, tau};
                       const std::vector<double> H0 = doob_H_row(xs, 0.0, par);
                       const double C = const_C(par).value;
                       std::vector<double> v(xs.size());
                       for (size_t i = 0; i < xs.size(); ++i)
                           v[i] = std::exp(-c * xs[i]) * H0[i] / C;
                       return v;
                   });

    // transition leg at s=0.5, t=1.0 from x=0.5; the p factor is shared
    const double x_ = 0.5, dt_ = 0.5;
    const std::vector<double> ys = linspace(-5.0, 8.0, 261);
    const std::vector<double> pv = yakubovich_p_row(x_, ys, dt_);
    const double kx = bessel_k_real(hd ? a : 0.0, std::exp(-x_));
    const double efac = hd ? std::exp(-a * a * dt_ / 4.0) : 1.0;
    std::vector<double> tr_target(ys.size());
    for (size_t i = 0; i < ys.size(); ++i)
        tr_target[i] =
            efac * bessel_k_real(hd ? a : 0.0, std::exp(-ys[i])) * pv[i] / kx;
    density_ladder(rep, "transition kernel sup deviation", cfg.scales, cfg.endpoint_tol,
                   tr_target, [&](double tau) {
                       const BoundaryParams par{a, c, tau};
                       const std::vector<double> Ht = doob_H_row(ys, 1.0, par);
                       const double Hs = doob_H(x_, 0.5, par).value;
                       std::vector<double> v(ys.size());
                       for (size_t i = 0; i < ys.size(); ++i) v[i] = Ht[i] * pv[i] / Hs;
                       return v;
                   });

    if (!hd) {
        // limit initial law matches -log(2 sqrt(gamma gamma')) by Laplace transform
        const std::vector<double> gq = linspace(-6.0, 14.0, 2200);
        const std::vector<double> tw = trapezoid_weights(gq);
        std::vector<double> dens(gq.size());
        for (size_t i = 0; i < gq.size(); ++i) dens[i] = z_mc_init(c, gq[i]);
        for (double s : {0.5, 1.0, 2.0}) {
            double acc = 0.0;
            for (size_t i = 0; i < gq.size(); ++i)
                acc += tw[i] * std::exp(-s * gq[i]) * dens[i];
            const double gr = gamma_fn((c + s) / 2.0) / gamma_fn(c / 2.0);
            const double want = std::pow(2.0, s) * gr * gr;
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "limit law Laplace transform vs gamma product, s=%g", s);
            rep.checks.push_back(
                {buf, std::abs(acc - want), 1e-6, std::abs(acc - want) < 1e-6});
        }
    } else {
        // a = 0 degenerates to the one-sided family
        double d = 0.0;
        for (double x : xs) d = std::max(d, std::abs(z_hd_init(0.0, c, x) - z_mc_init(c, x)));
        rep.checks.push_back({"a=0 initial law coincides with the one-sided family", d,
                              1e-10, d < 1e-10});
    }
    return rep;
}

inline VerificationReport suite_bessel3(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double c = 0.75;
    rep.config = "c=0.75 scaled-parameter ladder T=" + ladder_str(cfg.scales);
    auto lim_init = [&](double x) { return x > 0.0 ? c * c * x * std::exp(-c * x) : 0.0; };
    const std::vector<double> xs = spec_grid(lim_init, 1e-9, 30.0 / c);
    std::vector<double> target(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) target[i] = lim_init(xs[i]);
    density_ladder(rep, "initial law sup deviation", cfg.scales, cfg.endpoint_tol, target,
                   [&](double T) {
                       const double rt = std::sqrt(T), cT = c / rt;
                       std::vector<double> v(xs.size());
                       for (size_t i = 0; i < xs.size(); ++i)
                           v[i] = rt * z_mc_init(cT, xs[i] * rt);
                       return v;
                   });

    const std::vector<double> ys = linspace(1e-4, 16.0, 261);
    std::vector<double> tr_target(ys.size());
    for (size_t i = 0; i < ys.size(); ++i)
        tr_target[i] = ys[i] * g_closed(0.5, 1.0, ys[i]);
    density_ladder(rep, "transition kernel sup deviation", cfg.scales, cfg.endpoint_tol,
                   tr_target, [&](double T) {
                       const double rt = std::sqrt(T);
                       const std::vector<double> gy = scale_vec(ys, rt);
                       const std::vector<double> pv = yakubovich_p_row(rt, gy, 0.5 * T);
                       const double kx = bessel_k_real(0.0, std::exp(-rt));
                       std::vector<double> v(ys.size());
                       for (size_t i = 0; i < ys.size(); ++i)
                           v[i] = rt * bessel_k_real(0.0, std::exp(-gy[i])) * pv[i] / kx;
                       return v;
                   });

    // conservative limit kernel: (y/x) g integrates to 1
    const std::vector<double> gq = linspace(1e-6, 12.0, 2200);
    const std::vector<double> tw = trapezoid_weights(gq);
    double mass = 0.0;
    for (size_t i = 0; i < gq.size(); ++i)
        mass += tw[i] * (gq[i] / 0.7) * g_closed(0.4, 0.7, gq[i]);
    rep.checks.push_back({"limit transition kernel integrates to 1", std::abs(mass - 1.0),
                          1e-6, std::abs(mass - 1.0) < 1e-6});
    return rep;
}

inline VerificationReport suite_rho_hd(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double a = -0.5, c = 1.0;
    rep.config = "a=-0.5 c=1.0 scaled-parameter ladder T=" + ladder_str(cfg.scales);
    auto lim_init = [&](double x) {
        if (x <= 0.0) return 0.0;
        return (c * c - a * a) / (2.0 * a) *
               (std::exp((a - c) * x) - std::exp(-(a + c) * x));
    };
    const std::vector<double> xs = spec_grid(lim_init, 1e-9, 40.0 / (a + c));
    std::vector<double> target(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) target[i] = lim_init(xs[i]);
    density_ladder(rep, "initial law sup deviation", cfg.scales, cfg.endpoint_tol, target,
                   [&](double T) {
                       const double rt = std::sqrt(T);
                       std::vector<double> v(xs.size());
                       for (size_t i = 0; i < xs.size(); ++i)
                           v[i] = rt * z_hd_init(a / rt, c / rt, xs[i] * rt);
                       return v;
                   });

    const std::vector<double> ys = linspace(1e-4, 16.0, 261);
    std::vector<double> tr_target(ys.size());
    for (size_t i = 0; i < ys.size(); ++i)
        tr_target[i] = std::exp(-a * a * 0.5 / 4.0) * std::sinh(a * ys[i]) /
                       std::sinh(a) * g_closed(0.5, 1.0, ys[i]);
    density_ladder(rep, "transition kernel sup deviation", cfg.scales, cfg.endpoint_tol,
                   tr_target, [&](double T) {
                       const double rt = std::sqrt(T), aT = a / rt;
                       const std::vector<double> gy = scale_vec(ys, rt);
                       const std::vector<double> pv = yakubovich_p_row(rt, gy, 0.5 * T);
                       const double kx = bessel_k_real(aT, std::exp(-rt));
                       const double ef = std::exp(-aT * aT * 0.5 * T / 4.0);
                       std::vector<double> v(ys.size());
                       for (size_t i = 0; i < ys.size(); ++i)
                           v[i] = rt * ef * bessel_k_real(aT, std::exp(-gy[i])) * pv[i] / kx;
                       return v;
                   });
    return rep;
}

inline VerificationReport suite_exp_limit(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double s = 1.0;
    rep.config = "a=1+eps c=-1 s=1 tau=1, scale=1/eps " + ladder_str(cfg.scales);
    std::vector<double> devs;
    for (double scale : cfg.scales) {
        const double eps = 1.0 / scale;
        const BoundaryParams par{1.0 + eps, -1.0, 1.0};
        BoundaryParams shifted = par;
        shifted.c += eps * s;
        const double v = const_C(shifted).value / const_C(par).value;
        devs.push_back(std::abs(v - 1.0 / (1.0 + s)));
    }
    rep.checks.push_back(trend_check("small-gap Laplace transform deviation", devs));
    rep.checks.push_back(endpoint_check("small-gap Laplace transform deviation",
                                        cfg.scales.back(), devs.back(), cfg.endpoint_tol));
    return rep;
}

inline VerificationReport suite_asymp_normal(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double a = 3.0, c = -1.5, s = -1.0;
    rep.config = "a=3 c=-1.5 s=-1 tau=" + ladder_str(cfg.scales);
    const double want = std::exp(s * s / 4.0);
    std::vector<double> devs;
    for (double tau : cfg.scales) {
        const double rt = std::sqrt(tau);
        const BoundaryParams par{a, c, tau};
        BoundaryParams shifted = par;
        shifted.c += s / rt;
        const double L = std::exp(-s * c * rt / 2.0) * const_C(shifted).value /
                         const_C(par).value;
        devs.push_back(std::abs(L - want));
    }
    rep.checks.push_back(trend_check("centered Laplace transform vs Gaussian", devs));
    rep.checks.push_back(endpoint_check("centered Laplace transform vs Gaussian",
                                        cfg.scales.back(), devs.back(), cfg.endpoint_tol));
    return rep;
}

inline VerificationReport suite_scaling_fixed_point(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double t = 0.5, x = 1.0, y = 2.0;
    rep.config = "(t,x,y)=(0.5,1,2) tau=" + ladder_str(cfg.scales);
    for (double tau : cfg.scales) {
        const double rt = std::sqrt(tau);
        const double lhs = rt * g_closed(tau * t, x * rt, y * rt);
        const double rhs = g_closed(t, x, y);
        char buf[96];
        std::snprintf(buf, sizeof buf, "diffusive scaling identity at tau=%g", tau);
        rep.checks.push_back({buf, std::abs(lhs - rhs), cfg.endpoint_tol,
                              std::abs(lhs - rhs) < cfg.endpoint_tol, tau});
    }
    return rep;
}

inline VerificationReport suite_y2x(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const BoundaryParams par{1.0, 1.0, 1.0};
    rep.config = "a=1 c=1 tau=1 times={0.5,1}, n ladder " + ladder_str(cfg.scales);
    const std::vector<double> times = {0.5, 1.0};
    const ProcessKind kind{ProcessTag::Y, par};
    const MarkovSampler sampler(kind, {times, true});
    std::vector<std::vector<double>> devs(times.size());
    std::vector<std::vector<double>> slack(times.size());
    std::vector<double> prev_sig(times.size(), 0.0);
    for (double scale : cfg.scales) {
        const int n = static_cast<int>(scale);
        const PathEnsemble ye = sampler.run(n, cfg.seed);
        const PathEnsemble xe =
            x_weighted_ensemble(par, cfg.steps, n, cfg.seed + 1, times);
        const std::vector<double> y0 = ye.column(0);
        const double ess = xe.ess();
        const double sig = 0.87 * (1.0 / std::sqrt(static_cast<double>(n)) +
                                   1.0 / std::sqrt(ess));
        for (size_t k = 0; k < times.size(); ++k) {
            std::vector<double> dy = ye.column(k + 1);
            for (int i = 0; i < n; ++i) dy[i] -= y0[i];
            const double ks = ks_distance_weighted(dy, {}, xe.column(k), xe.weights);
            if (!devs[k].empty()) slack[k].push_back(2.0 * (prev_sig[k] + sig));
            devs[k].push_back(ks);
            prev_sig[k] = sig;
        }
    }
    for (size_t k = 0; k < times.size(); ++k) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "increment law vs weighted ensemble KS, t=%g",
                      times[k]);
        rep.checks.push_back(trend_check(buf, devs[k], slack[k]));
        rep.checks.push_back(
            endpoint_check(buf, cfg.scales.back(), devs[k].back(), cfg.endpoint_tol));
    }
    return rep;
}

inline VerificationReport suite_halfline_ld(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double a = 1.5, c = -0.5, t = 1.0;
    rep.config = "a=1.5 c=-0.5 t=1 n=" + std::to_string(cfg.n) +
                 " tau=" + ladder_str(cfg.scales);
    const double want_mean = c * t / 2.0, want_var = t / 2.0;
    std::vector<double> devs, slack, ses, vars, vses;
    double prev_se = 0.0;
    for (double tau : cfg.scales) {
        const ProcessKind kind{ProcessTag::Y, {a, c, tau}};
        const MarkovSampler sampler(kind, {{t}, true});
        const PathEnsemble ens = sampler.run(cfg.n, cfg.seed);
        double s1 = 0.0, s2 = 0.0;
        const int n = ens.n_paths;
        for (int i = 0; i < n; ++i) {
            const double d = ens.value(i, 1) - ens.value(i, 0);
            s1 += d;
            s2 += d * d;
        }
        const double mean = s1 / n;
        const double var = std::max(0.0, s2 / n - mean * mean);
        const double se = std::sqrt(var / n);
        if (!devs.empty()) slack.push_back(2.0 * (prev_se + se));
        devs.push_back(std::abs(mean - want_mean));
        ses.push_back(se);
        vars.push_back(var);
        vses.push_back(var * std::sqrt(2.0 / (n - 1.0)));
        prev_se = se;
    }
    rep.checks.push_back(trend_check("increment drift deviation", devs, slack));
    rep.checks.push_back({"increment drift within 3 SE at the last scale", devs.back(),
                          3.0 * ses.back(), devs.back() <= 3.0 * ses.back(),
                          cfg.scales.back()});
    const double vdev = std::abs(vars.back() - want_var);
    rep.checks.push_back({"increment variance within 3 SE at the last scale", vdev,
                          3.0 * vses.back(), vdev <= 3.0 * vses.back(),
                          cfg.scales.back()});
    return rep;
}

inline VerificationReport suite_edwards_wilkinson(const LimitSuite& cfg) {
    VerificationReport rep;
    rep.suite = cfg.name;
    rep.seed = cfg.seed;
    const double a = 1.0, c = 2.0;
    rep.config = "a=1 c=2 n=" + std::to_string(cfg.n) + " steps=" +
                 std::to_string(cfg.steps) + " scale=1/tau " + ladder_str(cfg.scales);
    const double want = c / 2.0 - (a + c) / 4.0;
    std::vector<double> devs, slack, ses;
    double prev_se = 0.0;
    for (double scale : cfg.scales) {
        const double tau = 1.0 / scale;
        const double rt = std::sqrt(tau);
        const BoundaryParams par{a / rt, c / rt, tau};
        const PathEnsemble ens = x_weighted_ensemble(par, cfg.steps, cfg.n, cfg.seed);
        double ws = 0.0, m1 = 0.0;
        for (int i = 0; i < ens.n_paths; ++i) {
            ws += ens.weights[i];
            m1 += ens.weights[i] * ens.value(i, 0) / rt;
        }
        const double mean = m1 / ws;
        double v = 0.0;
        for (int i = 0; i < ens.n_paths; ++i) {
            const double d = ens.value(i, 0) / rt - mean;
            v += ens.weights[i] * d * d;
        }
        const double se = std::sqrt((v / ws) / ens.ess());
        if (!devs.empty()) slack.push_back(2.0 * (prev_se + se));
        devs.push_back(std::abs(mean - want));
        ses.push_back(se);
        prev_se = se;
    }
    rep.checks.push_back(trend_check("scaled endpoint drift deviation", devs, slack));
    rep.checks.push_back({"scaled endpoint drift within 3 SE at the last scale",
                          devs.back(), 3.0 * ses.back(), devs.back() <= 3.0 * ses.back(),
                          cfg.scales.back()});
    return rep;
}

}  // namespace limit_detail

inline VerificationReport run_suite(const LimitSuite& cfg) {
    limit_detail::validate(cfg);
    if (cfg.name == "kpz_fixed") return limit_detail::suite_kpz_fixed(cfg);
    if (cfg.name == "halfline_mc") return limit_detail::suite_halfline(cfg, 1.0, 2.0);
    if (cfg.name == "halfline_hd") return limit_detail::suite_halfline(cfg, -0.5, 2.0);
    if (cfg.name == "bessel3") return limit_detail::suite_bessel3(cfg);
    if (cfg.name == "rho_hd") return limit_detail::suite_rho_hd(cfg);
    if (cfg.name == "exp_limit") return limit_detail::suite_exp_limit(cfg);
    if (cfg.name == "asymp_normal") return limit_detail::suite_asymp_normal(cfg);
    if (cfg.name == "scaling_fixed_point")
        return limit_detail::suite_scaling_fixed_point(cfg);
    if (cfg.name == "y2x") return limit_detail::suite_y2x(cfg);
    if (cfg.name == "halfline_ld") return limit_detail::suite_halfline_ld(cfg);
    if (cfg.name == "edwards_wilkinson")
        return limit_detail::suite_edwards_wilkinson(cfg);
    throw DomainError("unknown suite '" + cfg.name + "'");
}

inline VerificationReport run_suite(const std::string& name) {
    return run_suite(default_suite(name));
}

}  // namespace kpz
