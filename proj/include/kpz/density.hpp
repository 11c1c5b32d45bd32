#pragma once
// Gridded one-dimensional densities: tabulation, mass audit, inverse-CDF
// sampling, and the outward probe that picks table bounds automatically.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kpz/common.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/rng.hpp"

namespace kpz {

struct DensityTable {
    std::vector<double> grid;
    std::vector<double> values;
    double total_mass = 0.0;
    std::string context;
};

inline double trapezoid_mass(const std::vector<double>& grid,
                             const std::vector<double>& values) {
    double m = 0.0;
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    return m;
}

// Tabulate f on the grid. Negative excursions (quadrature noise in the
// feeding kernels) are clamped at zero before the mass is computed.
inline DensityTable make_table(std::vector<double> grid,
                               const std::function<double(double)>& f,
                               std::string context = {}) {
    require(grid.size() >= 2, "make_table: grid needs at least two points");
    DensityTable t;
    t.grid = std::move(grid);
    t.values.resize(t.grid.size());
    for (size_t i = 0; i < t.grid.size(); ++i)
        t.values[i] = std::max(0.0, f(t.grid[i]));
    t.total_mass = trapezoid_mass(t.grid, t.values);
    t.context = std::move(context);
    return t;
}

// Scale to unit mass. The pre-normalization mass must already be close to 1
// (or the caller asked for an unnormalized law and normalizes deliberately).
inline void normalize(DensityTable& t) {
    require(t.total_mass > 0.0 && std::isfinite(t.total_mass),
            "normalize: table mass must be positive and finite");
    for (double& v : t.values) v /= t.total_mass;
    t.total_mass = 1.0;
}

// Audit hook for laws that are normalized on paper: more than tol of mass
// missing (or surplus) means the grid cut the law off.
inline void check_mass(const DensityTable& t, double tol = 1e-3) {
    if (std::abs(t.total_mass - 1.0) > tol)
        throw AccuracyError("density table mass " + std::to_string(t.total_mass) +
                            " deviates from 1 beyond " + std::to_string(tol) +
                            (t.context.empty() ? "" : " [" + t.context + "]"));
}

// Cumulative trapezoid CDF scaled to end at exactly 1.
inline std::vector<double> build_cdf(const DensityTable& t) {
    require(t.grid.size() >= 2, "build_cdf: table needs at least two points");
    std::vector<double> cdf(t.grid.size(), 0.0);
    for (size_t i = 1; i < t.grid.size(); ++i)
        cdf[i] = cdf[i - 1] +
                 0.5 * (t.values[i] + t.values[i - 1]) * (t.grid[i] - t.grid[i - 1]);
    const double total = cdf.back();
    require(total > 0.0 && std::isfinite(total), "build_cdf: table has no mass");
    for (double& v : cdf) v /= total;
    return cdf;
}

// CDF value at x by linear interpolation of the table CDF.
inline double cdf_at(const std::vector<double>& grid, const std::vector<double>& cdf,
                     double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const size_t j = static_cast<size_t>(it - grid.begin());
    const double lam = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return cdf[j - 1] + lam * (cdf[j] - cdf[j - 1]);
}

// Inverse-CDF of a normalized cumulative table at u in (0,1), with linear
// interpolation between grid points. Flat CDF segments resolve to their
// midpoint; the fraction is clipped so roundoff cannot step outside the cell.
inline double inverse_cdf(const std::vector<double>& grid,
                          const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    size_t j = static_cast<size_t>(it - cdf.begin());
    j = std::max<size_t>(1, std::min(j, cdf.size() - 1));
    const double c0 = cdf[j - 1], c1 = cdf[j];
    double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    frac = std::max(0.0, std::min(1.0, frac));
    return grid[j - 1] + frac * (grid[j] - grid[j - 1]);
}

inline double sample_from(const DensityTable& t, const std::vector<double>& cdf,
                          Rng& rng) {
    return inverse_cdf(t.grid, cdf, rng.uniform());
}

// Support bounds by outward probing in steps of 0.5 from a seed point.
// A side stops when the value falls below 1e-12 of the running maximum, or
// when it ticks upward while already below 1e-6 of the maximum; the second
// rule stops the walk at the noise floor of quadrature-backed integrands
// that multiply a growing exponential.
inline std::pair<double, double> support_bounds(const std::function<double(double)>& f,
                                                double seed_x, double step = 0.5,
                                                int max_steps = 400) {
    double fmax = std::abs(f(seed_x));
    double lo = seed_x, hi = seed_x;
    for (int dir = 0; dir < 2; ++dir) {
        const double sgn = dir == 0 ? -1.0 : 1.0;
        double x = seed_x;
        double prev = fmax;
        // minimum since the last new maximum; a clear climb back out of a
        // deep minimum is an amplified noise floor, and the support ends at
        // the minimum, not wherever the fake tail would carry the walk
        double run_min = fmax, x_min = seed_x;
        for (int k = 0; k < max_steps; ++k) {
            x += sgn * step;
            const double v = std::abs(f(x));
            if (v >= fmax) {
                fmax = v;
                run_min = v;
                x_min = x;
            } else if (v < run_min) {
                run_min = v;
                x_min = x;
            }
            const bool dead = v < 1e-12 * fmax;
            const bool noise_uptick = v > prev && v < 1e-6 * fmax;
            const bool noise_rise = run_min < 1e-4 * fmax && v > 3.0 * run_min;
            if (dir == 0) lo = x; else hi = x;
            if (noise_rise) {
                if (dir == 0) lo = x_min; else hi = x_min;
                break;
            }
            if (dead || noise_uptick) break;
            prev = v;
        }
    }
    return {lo, hi};
}

}  // namespace kpz
