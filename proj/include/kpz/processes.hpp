#pragma once
// Process laws and samplers: the interval process Y, the weighted Brownian
// ensemble X, the half-line limits Z (one- and two-sided), the absorbed
// family eta, the fixed-point families rho, the Hariya-Yor path
// representation, and the GIG building block.
//
// Gridded Markov sampling works off one spectral basis per run: transition
// matrices are Gram products, Doob factors are contractions of the same
// S-matrix, and every path owns its own PRNG stream.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kpz/common.hpp"
#include "kpz/density.hpp"
#include "kpz/kernels.hpp"
#include "kpz/report.hpp"
#include "kpz/rng.hpp"

namespace kpz {

enum class ProcessTag { Y, X, Z_mc, Z_hd, eta, rho_mc, rho_hd, hariya_yor };

struct ProcessKind {
    ProcessTag tag = ProcessTag::Y;
    BoundaryParams params;
};

inline const char* process_name(ProcessTag tag) {
    switch (tag) {
        case ProcessTag::Y: return "Y";
        case ProcessTag::X: return "X";
        case ProcessTag::Z_mc: return "Z_mc";
        case ProcessTag::Z_hd: return "Z_hd";
        case ProcessTag::eta: return "eta";
        case ProcessTag::rho_mc: return "rho_mc";
        case ProcessTag::rho_hd: return "rho_hd";
        case ProcessTag::hariya_yor: return "hariya_yor";
    }
    return "?";
}

inline ProcessTag parse_process(const std::string& name) {
    if (name == "Y") return ProcessTag::Y;
    if (name == "X") return ProcessTag::X;
    if (name == "Z_mc") return ProcessTag::Z_mc;
    if (name == "Z_hd") return ProcessTag::Z_hd;
    if (name == "eta") return ProcessTag::eta;
    if (name == "rho_mc") return ProcessTag::rho_mc;
    if (name == "rho_hd") return ProcessTag::rho_hd;
    if (name == "hariya_yor") return ProcessTag::hariya_yor;
    throw DomainError("unknown process '" + name +
                      "' (expected Y, X, Z_mc, Z_hd, eta, rho_mc, rho_hd, hariya_yor)");
}

// Parameter domain per family. Z_mc carries an unused 'a' but still insists
// on the full Theorem domain so configs stay portable across families.
inline void validate(const ProcessKind& kind) {
    const double a = kind.params.a, c = kind.params.c;
    require(kind.params.tau > 0.0, "process: tau must be positive");
    switch (kind.tag) {
        case ProcessTag::Y:
        case ProcessTag::X:
        case ProcessTag::eta:
            require(a + c > 0.0, std::string(process_name(kind.tag)) +
                                     ": requires a + c > 0");
            break;
        case ProcessTag::Z_mc:
            require(a > 0.0 && c > 0.0, "Z_mc: requires a > 0 and c > 0");
            break;
        case ProcessTag::Z_hd:
            require(a <= 0.0 && a + c > 0.0, "Z_hd: requires a <= 0 and a + c > 0");
            break;
        case ProcessTag::rho_mc:
            require(c > 0.0, "rho_mc: requires c > 0");
            break;
        case ProcessTag::rho_hd:
            require(a < 0.0 && c > -a, "rho_hd: requires a < 0 and c > -a");
            break;
        case ProcessTag::hariya_yor:
            require(c > 0.0 && -c < a && a <= 0.0,
                    "hariya_yor: requires c > 0 and -c < a <= 0");
            break;
    }
}

// eta lives on the unit absorption horizon; everything else runs to tau.
inline double process_horizon(const ProcessKind& kind) {
    return kind.tag == ProcessTag::eta ? 1.0 : kind.params.tau;
}

struct FddSpec {
    std::vector<double> times;
    bool includes_t0 = true;
};

inline void validate(const FddSpec& spec, double horizon) {
    require(!spec.times.empty(), "FddSpec: needs at least one time");
    double prev = 0.0;
    for (double t : spec.times) {
        require(t > prev, "FddSpec: times must be strictly increasing and positive");
        prev = t;
    }
    require(prev <= horizon * (1.0 + 1e-12), "FddSpec: last time exceeds the horizon");
}

struct PathEnsemble {
    int n_paths = 0;
    int n_steps = 0;
    double horizon = 0.0;
    std::vector<double> times;
    std::vector<double> values;  // n_paths x times.size(), row-major
    std::vector<double> weights; // empty when unweighted, else one per path
    uint64_t seed = 0;
    std::vector<uint64_t> stream_ids;

    double value(size_t path, size_t k) const { return values[path * times.size() + k]; }

    std::vector<double> column(size_t k) const {
        std::vector<double> out(n_paths);
        for (int i = 0; i < n_paths; ++i) out[i] = value(i, k);
        return out;
    }

    // Effective sample size (sum w)^2 / sum w^2; n_paths when unweighted.
    double ess() const {
        if (weights.empty()) return static_cast<double>(n_paths);
        double s = 0.0, s2 = 0.0;
        for (double w : weights) {
            s += w;
            s2 += w * w;
        }
        return s2 > 0.0 ? s * s / s2 : 0.0;
    }
};

namespace process_detail {

// Real-order K on a whole grid of e^{-x} arguments.
inline std::vector<double> k_real_row(double nu, const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (size_t j = 0; j < grid.size(); ++j)
        out[j] = bessel_k_real(nu, std::exp(-grid[j]));
    return out;
}

}  // namespace process_detail

// Doob factor H_t on the basis grid. Reuses the basis S-matrix whenever the
// remaining time tau - t fits its truncation; falls back to the standalone
// row evaluation for shorter remainders.
inline std::vector<double> doob_H_grid(const SpectralBasis& basis, double t,
                                       const BoundaryParams& par) {
    const double s = par.tau - t;
    const double a = par.a;
    const std::vector<double>& grid = basis.grid();
    const size_t nx = grid.size();
    std::vector<double> out(nx);
    if (s <= 1e-14) {
        for (size_t j = 0; j < nx; ++j) out[j] = std::exp(-a * grid[j]);
        return out;
    }
    if (s < basis.t_min() * (1.0 - 1e-12)) return doob_H_row(grid, t, par);
    const std::vector<double>& us = basis.u_nodes();
    const std::vector<double>& ws = basis.u_weights();
    Eigen::VectorXd d(static_cast<Eigen::Index>(us.size()));
    for (size_t i = 0; i < us.size(); ++i) {
        const double u = us[i];
        const double lg = lgamma_abs2(a / 2.0, u / 2.0) - lgamma_abs2(0.0, u) -
                          M_PI * u / 2.0;
        d[static_cast<Eigen::Index>(i)] = ws[i] * std::exp(-s * u * u / 4.0 + lg);
    }
    const Eigen::VectorXd v = basis.su_apply(d);
    const double pref = std::pow(2.0, a) / (2.0 * M_PI);
    for (size_t j = 0; j < nx; ++j) {
        out[j] = pref * v[static_cast<Eigen::Index>(j)];
        if (a < 0.0)
            out[j] += kernel_detail::doob_H_residues(std::exp(-grid[j]), s, a);
    }
    return out;
}

// Sequential gridded sampler for the six kernel-defined families. One state
// grid serves the initial law, the transition matrices, and the Doob rows;
// each transition draw is an inverse-CDF step on the H-weighted kernel row.
class MarkovSampler {
public:
    MarkovSampler(const ProcessKind& kind, const FddSpec& spec, int grid_points = 4096)
        : MarkovSampler(kind, spec, build_grid(kind, spec, grid_points)) {}

    MarkovSampler(const ProcessKind& kind, const FddSpec& spec, std::vector<double> grid)
        : kind_(kind), spec_(spec), grid_(std::move(grid)) {
        validate(kind_);
        validate(spec_, process_horizon(kind_));
        require(kind_.tag != ProcessTag::X && kind_.tag != ProcessTag::hariya_yor,
                "MarkovSampler: X and hariya_yor are path samplers, not gridded "
                "Markov families");
        require(grid_.size() >= 16, "MarkovSampler: grid too small");
        tw_ = trapezoid_weights(grid_);
        uses_p_ = kind_.tag == ProcessTag::Y || kind_.tag == ProcessTag::Z_mc ||
                  kind_.tag == ProcessTag::Z_hd;

        double t_min = spec_.times[0];
        for (size_t k = 1; k < spec_.times.size(); ++k)
            t_min = std::min(t_min, spec_.times[k] - spec_.times[k - 1]);

        if (uses_p_)
            basis_ = std::make_unique<SpectralBasis>(grid_, t_min);

        build_h_rows();
        build_init();
        build_transition_matrices();
    }

    const std::vector<double>& grid() const { return grid_; }
    const DensityTable& initial_table() const { return init_; }

    PathEnsemble run(int n, uint64_t seed) const {
        require(n > 0, "MarkovSampler::run: n must be positive");
        const size_t m = spec_.times.size();
        const size_t cols = m + (spec_.includes_t0 ? 1 : 0);
        PathEnsemble ens;
        ens.n_paths = n;
        ens.n_steps = static_cast<int>(m);
        ens.horizon = process_horizon(kind_);
        ens.seed = seed;
        if (spec_.includes_t0) ens.times.push_back(0.0);
        ens.times.insert(ens.times.end(), spec_.times.begin(), spec_.times.end());
        ens.values.resize(static_cast<size_t>(n) * cols);
        ens.stream_ids.resize(n);

        std::vector<double> row(grid_.size());
        std::vector<double> cdf(grid_.size());
        for (int i = 0; i < n; ++i) {
            ens.stream_ids[i] = static_cast<uint64_t>(i);
            Rng rng(seed, static_cast<uint64_t>(i));
            double x = inverse_cdf(grid_, init_cdf_, rng.uniform());
            size_t col = 0;
            if (spec_.includes_t0) ens.values[i * cols + col++] = x;
            double tprev = 0.0;
            for (size_t k = 0; k < m; ++k) {
                const double dt = spec_.times[k] - tprev;
                x = step(x, dt, k, rng, row, cdf);
                tprev = spec_.times[k];
                ens.values[i * cols + col++] = x;
            }
        }
        return ens;
    }

    // Exact gridded marginal density at t = 0 or any requested time in the
    // spec, by quadrature propagation of the kernel chain.
    DensityTable marginal(double t) const {
        const size_t nx = grid_.size();
        if (t <= 1e-14) {
            DensityTable out = init_;
            out.context = context_string(0.0);
            return out;
        }
        size_t target = spec_.times.size();
        for (size_t k = 0; k < spec_.times.size(); ++k)
            if (std::abs(spec_.times[k] - t) <= 1e-12) target = k;
        require(target < spec_.times.size(),
                "MarkovSampler::marginal: t must be one of the spec times");

        Eigen::VectorXd phi(static_cast<Eigen::Index>(nx));
        for (size_t j = 0; j < nx; ++j)
            phi[static_cast<Eigen::Index>(j)] =
                h0_[j] > 0.0 ? init_.values[j] / h0_[j] : 0.0;
        double tprev = 0.0;
        for (size_t k = 0; k <= target; ++k) {
            const double dt = spec_.times[k] - tprev;
            const Eigen::MatrixXd& P = pcache_.at(key(dt)).mat;
            Eigen::VectorXd v(static_cast<Eigen::Index>(nx));
            for (size_t j = 0; j < nx; ++j)
                v[static_cast<Eigen::Index>(j)] =
                    phi[static_cast<Eigen::Index>(j)] * tw_[j];
            phi = P.transpose() * v;
            tprev = spec_.times[k];
        }
        DensityTable out;
        out.grid = grid_;
        out.values.resize(nx);
        for (size_t j = 0; j < nx; ++j)
            out.values[j] =
                std::max(0.0, phi[static_cast<Eigen::Index>(j)] * hrows_[target][j]);
        out.total_mass = trapezoid_mass(out.grid, out.values);
        require(out.total_mass > 0.0, "MarkovSampler::marginal: zero mass");
        normalize(out);
        out.context = context_string(t);
        return out;
    }

    // Conditional CDF F(y | x) across the step ending at spec time index k.
    // Rosenblatt-transform tests invert joint samples through this.
    double conditional_cdf(size_t step_index, double x_from, double y_to) const {
        require(step_index < spec_.times.size(),
                "MarkovSampler::conditional_cdf: step index out of range");
        const double tprev = step_index == 0 ? 0.0 : spec_.times[step_index - 1];
        const double dt = spec_.times[step_index] - tprev;
        std::vector<double> row(grid_.size()), cdf(grid_.size());
        fill_row(x_from, dt, step_index, row);
        double acc = 0.0;
        cdf[0] = 0.0;
        for (size_t j = 1; j < grid_.size(); ++j) {
            acc += 0.5 * (row[j] + row[j - 1]) * (grid_[j] - grid_[j - 1]);
            cdf[j] = acc;
        }
        if (acc <= 0.0 || !std::isfinite(acc))
            throw AccuracyError("MarkovSampler: transition row unresolvable at x = " +
                                std::to_string(x_from));
        for (double& v : cdf) v /= acc;
        return cdf_at(grid_, cdf, y_to);
    }

private:
    struct Cached {
        Eigen::MatrixXd mat;
        std::vector<char> bad_row;
    };

    static long long key(double dt) { return std::llround(dt * 1e12); }

    std::string context_string(double t) const {
        return std::string(process_name(kind_.tag)) + " a=" + std::to_string(kind_.params.a) +
               " c=" + std::to_string(kind_.params.c) +
               " tau=" + std::to_string(kind_.params.tau) + " t=" + std::to_string(t);
    }

    bool half_line() const {
        return kind_.tag == ProcessTag::eta || kind_.tag == ProcessTag::rho_mc ||
               kind_.tag == ProcessTag::rho_hd;
    }

    // Pointwise (slow-path) initial density used only to probe support bounds.
    static std::function<double(double)> probe_init(const ProcessKind& kind) {
        const double a = kind.params.a, c = kind.params.c;
        const BoundaryParams par = kind.params;
        switch (kind.tag) {
            case ProcessTag::Y:
                return [par, c](double x) {
                    return std::exp(-c * x) * doob_H(x, 0.0, par).value;
                };
            case ProcessTag::Z_mc:
                return [c](double x) {
                    return std::exp(-c * x) * bessel_k_real(0.0, std::exp(-x));
                };
            case ProcessTag::Z_hd:
                return [a, c](double x) {
                    return std::exp(-c * x) * bessel_k_real(a, std::exp(-x));
                };
            case ProcessTag::eta:
                return [a, c](double x) {
                    return x > 0.0 ? std::exp(-c * x) * doob_h_eta(x, 0.0, a).value : 0.0;
                };
            case ProcessTag::rho_mc:
                return [c](double x) { return x > 0.0 ? x * std::exp(-c * x) : 0.0; };
            case ProcessTag::rho_hd:
            default:
                return [a, c](double x) {
                    if (x <= 0.0) return 0.0;
                    return (c * c - a * a) / (2.0 * a) *
                           (std::exp((a - c) * x) - std::exp(-(a + c) * x));
                };
        }
    }

    static std::vector<double> build_grid(const ProcessKind& kind, const FddSpec& spec,
                                          int grid_points) {
        validate(kind);
        validate(spec, process_horizon(kind));
        require(grid_points >= 16, "MarkovSampler: grid_points too small");
        const double horizon = process_horizon(kind);
        double t_min = spec.times[0];
        for (size_t k = 1; k < spec.times.size(); ++k)
            t_min = std::min(t_min, spec.times[k] - spec.times[k - 1]);
        const bool hl = kind.tag == ProcessTag::eta || kind.tag == ProcessTag::rho_mc ||
                        kind.tag == ProcessTag::rho_hd;
        auto f = probe_init(kind);
        const double seed_x = hl ? 1.0 / std::max(0.25, kind.params.c) : 0.0;
        auto [lo, hi] = support_bounds(f, seed_x);
        // paths only run to the last recorded time, so diffusion pads scale
        // with it, not with the horizon
        const double t_last = spec.times.back();
        const double spread = 7.0 * std::sqrt(t_last / 2.0) + 2.0;
        if (hl) {
            lo = 1e-6;
            hi += spread;
        } else {
            // the kill wall recedes ~ log-slowly for earlier marginals
            lo -= 0.5 * std::log(horizon / t_min) + 1.5;
            hi += spread + std::max(0.0, -kind.params.c) * t_last / 2.0;
        }
        return linspace(lo, hi, grid_points);
    }

    void build_h_rows() {
        const size_t nx = grid_.size();
        const BoundaryParams& par = kind_.params;
        auto at_time = [&](double t) -> std::vector<double> {
            switch (kind_.tag) {
                case ProcessTag::Y:
                    return doob_H_grid(*basis_, t, par);
                case ProcessTag::Z_mc:
                    return process_detail::k_real_row(0.0, grid_);
                case ProcessTag::Z_hd:
                    // the e^{-a^2 t/4} prefactor cancels in row normalization
                    return process_detail::k_real_row(par.a, grid_);
                case ProcessTag::eta: {
                    std::vector<double> h(nx);
                    for (size_t j = 0; j < nx; ++j)
                        h[j] = doob_h_eta(grid_[j], t, par.a).value;
                    return h;
                }
                case ProcessTag::rho_mc: {
                    std::vector<double> h(grid_.begin(), grid_.end());
                    return h;
                }
                case ProcessTag::rho_hd:
                default: {
                    std::vector<double> h(nx);
                    const double am = std::abs(par.a);
                    for (size_t j = 0; j < nx; ++j) h[j] = std::sinh(am * grid_[j]);
                    return h;
                }
            }
        };
        h0_ = at_time(0.0);
        const bool time_invariant = kind_.tag == ProcessTag::Z_mc ||
                                    kind_.tag == ProcessTag::Z_hd ||
                                    kind_.tag == ProcessTag::rho_mc ||
                                    kind_.tag == ProcessTag::rho_hd;
        hrows_.resize(spec_.times.size());
        for (size_t k = 0; k < spec_.times.size(); ++k)
            hrows_[k] = time_invariant ? h0_ : at_time(spec_.times[k]);
    }

    void build_init() {
        const size_t nx = grid_.size();
        const double a = kind_.params.a, c = kind_.params.c;
        std::vector<double> v(nx);
        double norm = 1.0;
        switch (kind_.tag) {
            case ProcessTag::Y:
                norm = 1.0 / const_C(kind_.params).value;
                break;
            case ProcessTag::Z_mc:
                norm = 4.0 / (std::pow(2.0, c) * gamma_fn(c / 2.0) * gamma_fn(c / 2.0));
                break;
            case ProcessTag::Z_hd:
                norm = 4.0 / (std::pow(2.0, c) * gamma_fn((c - a) / 2.0) *
                              gamma_fn((c + a) / 2.0));
                break;
            case ProcessTag::eta:
                norm = 1.0 / const_frakC(a, c).value;
                break;
            case ProcessTag::rho_mc:
                norm = c * c;
                break;
            case ProcessTag::rho_hd:
                norm = (c * c - a * a) / (2.0 * a);
                break;
            default:
                break;
        }
        for (size_t j = 0; j < nx; ++j) {
            const double x = grid_[j];
            double base;
            switch (kind_.tag) {
                case ProcessTag::Y:
                case ProcessTag::Z_mc:
                case ProcessTag::Z_hd:
                case ProcessTag::eta:
                    base = std::exp(-c * x) * h0_[j];
                    break;
                case ProcessTag::rho_mc:
                    base = x * std::exp(-c * x);
                    break;
                case ProcessTag::rho_hd:
                default:
                    base = std::exp((a - c) * x) - std::exp(-(a + c) * x);
                    break;
            }
            v[j] = std::max(0.0, norm * base);
        }
        // every start density here is a single hump; once the tail falls below
        // resolution, cut it so an amplified noise floor cannot rise back in
        // (for c < 0 the exp(-c x) tilt turns H-row roundoff into fake mass)
        const size_t jmax = static_cast<size_t>(
            std::max_element(v.begin(), v.end()) - v.begin());
        const double floor_v = 1e-13 * v[jmax];
        for (size_t j = jmax; j < nx; ++j)
            if (v[j] < floor_v) {
                std::fill(v.begin() + static_cast<long>(j), v.end(), 0.0);
                break;
            }
        for (size_t j = jmax + 1; j-- > 0;)
            if (v[j] < floor_v) {
                std::fill(v.begin(), v.begin() + static_cast<long>(j) + 1, 0.0);
                break;
            }
        init_.grid = grid_;
        init_.values = std::move(v);
        init_.total_mass = trapezoid_mass(init_.grid, init_.values);
        init_.context = context_string(0.0);
        check_mass(init_, 1e-3);
        normalize(init_);
        init_cdf_ = build_cdf(init_);
    }

    void build_transition_matrices() {
        const size_t nx = grid_.size();
        double tprev = 0.0;
        for (double t : spec_.times) {
            const double dt = t - tprev;
            tprev = t;
            const long long k = key(dt);
            if (pcache_.count(k)) continue;
            Cached cc;
            if (uses_p_) {
                cc.mat = basis_->pmat(dt);
                // zero sub-noise entries row by row; flag rows that are all noise
                cc.bad_row.assign(nx, 0);
                double gmax = 0.0;
                std::vector<double> rowmax(nx, 0.0);
                for (size_t i = 0; i < nx; ++i) {
                    double m = 0.0;
                    for (size_t j = 0; j < nx; ++j)
                        m = std::max(m, cc.mat(static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(j)));
                    rowmax[i] = m;
                    gmax = std::max(gmax, m);
                }
                for (size_t i = 0; i < nx; ++i) {
                    const double cut = rowmax[i] * 1e-8;
                    for (size_t j = 0; j < nx; ++j) {
                        double& e = cc.mat(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j));
                        if (e < cut) e = 0.0;
                    }
                    if (rowmax[i] < 1e-12 * gmax) cc.bad_row[i] = 1;
                }
            } else {
                cc.mat.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nx));
                const double inv = 1.0 / std::sqrt(M_PI * dt);
                for (size_t i = 0; i < nx; ++i) {
                    const double x = grid_[i];
                    for (size_t j = 0; j < nx; ++j) {
                        const double y = grid_[j];
                        const double dm = x - y, dp = x + y;
                        cc.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                            (std::exp(-dm * dm / dt) - std::exp(-dp * dp / dt)) * inv;
                    }
                }
                cc.bad_row.assign(nx, 0);
            }
            pcache_.emplace(k, std::move(cc));
        }
    }

    void fill_row(double x, double dt, size_t step_index, std::vector<double>& row) const {
        const size_t nx = grid_.size();
        const Cached& cc = pcache_.at(key(dt));
        size_t idx = static_cast<size_t>(
            std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin());
        idx = idx == 0 ? 0 : idx - 1;
        idx = std::min(idx, nx - 2);
        const double lam =
            std::max(0.0, std::min(1.0, (x - grid_[idx]) / (grid_[idx + 1] - grid_[idx])));
        if (cc.bad_row[idx] || cc.bad_row[idx + 1])
            throw AccuracyError(
                "MarkovSampler: transition row below the resolvable kernel floor "
                "at x = " + std::to_string(x));
        const std::vector<double>& h = hrows_[step_index];
        for (size_t j = 0; j < nx; ++j) {
            const double pj =
                (1.0 - lam) * cc.mat(static_cast<Eigen::Index>(idx),
                                     static_cast<Eigen::Index>(j)) +
                lam * cc.mat(static_cast<Eigen::Index>(idx + 1),
                             static_cast<Eigen::Index>(j));
            row[j] = pj * h[j];
        }
    }

    double step(double x, double dt, size_t step_index, Rng& rng,
                std::vector<double>& row, std::vector<double>& cdf) const {
        fill_row(x, dt, step_index, row);
        const size_t nx = grid_.size();
        // per-cell trapezoid masses keep the draw centered; cumulating node
        // masses instead would shift every draw half a cell left
        double acc = 0.0;
        cdf[0] = 0.0;
        for (size_t j = 1; j < nx; ++j) {
            acc += 0.5 * (row[j] + row[j - 1]) * (grid_[j] - grid_[j - 1]);
            cdf[j] = acc;
        }
        if (acc <= 0.0 || !std::isfinite(acc))
            throw AccuracyError("MarkovSampler: transition row unresolvable at x = " +
                                std::to_string(x));
        const double u = rng.uniform() * acc;
        size_t j = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        j = std::max<size_t>(1, std::min(j, nx - 1));
        const double c0 = cdf[j - 1], c1 = cdf[j];
        double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        frac = std::max(0.0, std::min(1.0, frac));
        return grid_[j - 1] + frac * (grid_[j] - grid_[j - 1]);
    }

    ProcessKind kind_;
    FddSpec spec_;
    std::vector<double> grid_;
    std::vector<double> tw_;
    bool uses_p_ = false;
    std::unique_ptr<SpectralBasis> basis_;
    std::vector<double> h0_;
    std::vector<std::vector<double>> hrows_;
    DensityTable init_;
    std::vector<double> init_cdf_;
    std::map<long long, Cached> pcache_;
};

// Draw n paths of a gridded Markov family at the spec times.
inline PathEnsemble sample_markov(const ProcessKind& kind, const FddSpec& spec, int n,
                                  uint64_t seed, int grid_points = 4096) {
    MarkovSampler sampler(kind, spec, grid_points);
    return sampler.run(n, seed);
}

// Joint density of the interval process at the spec times. With the start
// point included this is the closed product law; without it the start
// coordinate is integrated out numerically.
inline double y_fdd_density(const BoundaryParams& par, const FddSpec& spec,
                            const std::vector<double>& point,
                            const QuadratureSpec& quad = {}) {
    require(par.a + par.c > 0.0, "y_fdd_density: requires a + c > 0");
    validate(spec, par.tau);
    const size_t n = spec.times.size();
    require(point.size() == n + (spec.includes_t0 ? 1 : 0),
            "y_fdd_density: point length must match the spec");
    const double C = const_C(par, quad).value;

    // coordinates aligned with spec.times
    const std::vector<double> ys(point.end() - static_cast<long>(n), point.end());
    double dens;
    if (spec.includes_t0) {
        dens = std::exp(-par.c * point[0]) / C;
        double prev = point[0], tprev = 0.0;
        for (size_t k = 0; k < n; ++k) {
            dens *= yakubovich_p(prev, ys[k], spec.times[k] - tprev, quad).value;
            prev = ys[k];
            tprev = spec.times[k];
        }
    } else {
        // integrate the start coordinate against e^{-c x} p_{t1}(x, y1)
        const double t1 = spec.times[0];
        const double y1 = ys[0];
        const double wall = -0.5 * std::log(4.0 * (27.6 + 3.0 * std::max(0.0, par.c)) / t1);
        const double lo = std::min(wall - 1.0, y1 - 8.0 * std::sqrt(t1 / 2.0));
        const double hi =
            y1 + std::max(0.0, -par.c) * t1 / 2.0 + 8.0 * std::sqrt(t1 / 2.0) + 2.0;
        std::vector<double> xs, ws;
        panel_nodes(lo, hi, 24, xs, ws, quad.nodes);
        double acc = 0.0;
        for (size_t i = 0; i < xs.size(); ++i)
            acc += ws[i] * std::exp(-par.c * xs[i]) *
                   yakubovich_p(xs[i], y1, t1, quad).value;
        dens = acc / C;
        for (size_t k = 1; k < n; ++k)
            dens *= yakubovich_p(ys[k - 1], ys[k], spec.times[k] - spec.times[k - 1], quad)
                        .value;
    }
    // Doob closure at the last coordinate; exact e^{-a y} when t_n = tau
    dens *= doob_H(ys.back(), spec.times.back(), par, quad).value;
    return std::max(0.0, dens);
}

// Brownian ensemble with the exponential-functional change of measure:
// weight e^{-a B_tau} (1/2 int_0^tau e^{-2B} dt)^{-(a+c)/2}, self-normalized.
inline PathEnsemble x_weighted_ensemble(const BoundaryParams& par, int n_steps, int n,
                                        uint64_t seed, std::vector<double> record = {}) {
    require(par.tau > 0.0, "x_weighted_ensemble: tau must be positive");
    require(n_steps >= 1 && n >= 1, "x_weighted_ensemble: n and n_steps must be positive");
    if (record.empty()) record.push_back(par.tau);
    const double dt = par.tau / n_steps;
    std::vector<int> marks;
    for (double t : record) {
        require(t > 0.0 && t <= par.tau * (1.0 + 1e-12),
                "x_weighted_ensemble: record times must lie in (0, tau]");
        int k = static_cast<int>(std::llround(t / dt));
        k = std::max(1, std::min(n_steps, k));
        marks.push_back(k);
    }
    PathEnsemble ens;
    ens.n_paths = n;
    ens.n_steps = n_steps;
    ens.horizon = par.tau;
    ens.seed = seed;
    ens.times = record;
    ens.values.resize(static_cast<size_t>(n) * record.size());
    ens.weights.resize(n);
    ens.stream_ids.resize(n);
    const double sd = std::sqrt(dt / 2.0);
    const double h = (par.a + par.c) / 2.0;
    for (int i = 0; i < n; ++i) {
        ens.stream_ids[i] = static_cast<uint64_t>(i);
        Rng rng(seed, static_cast<uint64_t>(i));
        double B = 0.0, I = 0.0, prev = 1.0;
        for (int k = 1; k <= n_steps; ++k) {
            B += sd * rng.normal();
            const double cur = std::exp(-2.0 * B);
            I += 0.5 * (prev + cur) * dt;
            prev = cur;
            for (size_t r = 0; r < marks.size(); ++r)
                if (marks[r] == k) ens.values[i * record.size() + r] = B;
        }
        ens.weights[i] = std::exp(-par.a * B) * std::pow(0.5 * I, -h);
    }
    if (ens.ess() < 10.0)
        throw StatQualityError("x_weighted_ensemble: effective sample size below 10");
    return ens;
}

enum class XRoute { theta, y_based };

// Unconstant y-route integrand: int e^{-(a+c) y} p_tau(y, y + x) dy.
inline double x_tilde_f(const BoundaryParams& par, double x,
                        const QuadratureSpec& quad = {}) {
    require(par.a + par.c > 0.0, "x_tilde_f: requires a + c > 0");
    const double h = par.a + par.c;
    const double lo = -4.0, hi = 16.0 / h + 2.0;
    std::vector<double> ys, ws;
    panel_nodes(lo, hi, 28, ys, ws, quad.nodes);
    double acc = 0.0;
    for (size_t i = 0; i < ys.size(); ++i)
        acc += ws[i] * std::exp(-h * ys[i]) * yakubovich_p(ys[i], ys[i] + x, par.tau, quad).value;
    return acc;
}

// Theta-route density kernel f(x) = e^{h x} int xi^{h-1} e^{-xi cosh x}
// theta(xi, tau/4) dxi / 2 with xi = e^s and h = (a+c)/2.
inline double x_f_theta(const BoundaryParams& par, double x,
                        const QuadratureSpec& quad = {}) {
    require(par.a + par.c > 0.0, "x_f_theta: requires a + c > 0");
    const double tq = par.tau / 4.0;
    if (tq < THETA_T_FLOOR * (1.0 - 1e-12))
        throw AccuracyError("x_f_theta: needs tau >= 4x theta floor");
    const double h = (par.a + par.c) / 2.0;
    const double s_lo = -30.0 / std::max(h, 0.5);
    const double s_hi = std::log(48.0 / std::cosh(x));
    if (s_hi <= s_lo) return 0.0;
    const hw_detail::ThetaNodes nd = hw_detail::build_nodes(tq);
    std::vector<double> ss, ws;
    panel_nodes(s_lo, s_hi, 60, ss, ws, quad.nodes);
    const double ch = std::cosh(x);
    double acc = 0.0;
    for (size_t i = 0; i < ss.size(); ++i) {
        const double arg = h * ss[i] - std::exp(ss[i]) * ch;
        if (arg < -746.0) continue;
        acc += ws[i] * std::exp(arg) * hw_detail::eval(nd, std::exp(ss[i]));
    }
    return std::exp(h * x) * 0.5 * std::max(0.0, acc);
}

// One-point density of the weighted ensemble endpoint, by either route.
// The theta route carries the closure constant 2^{h-1} Gamma(h), so the two
// routes agree identically when both are available.
inline double x_density_1pt(const BoundaryParams& par, double x, XRoute route,
                            const QuadratureSpec& quad = {}) {
    const double h = (par.a + par.c) / 2.0;
    const double C = const_C(par, quad).value;
    if (route == XRoute::y_based)
        return std::exp(-par.a * x) * x_tilde_f(par, x, quad) / C;
    const double K = std::pow(2.0, h - 1.0) * gamma_fn(h);
    return std::exp(-par.a * x) * K * x_f_theta(par, x, quad) / C;
}

// Full X_tau density table. The y-route integral for every x reduces to
// diagonal offsets of one spectral Gram matrix when the x values and the
// y grid share a lattice, so the whole table costs one pmat.
inline DensityTable x_density_table(const BoundaryParams& par, double x_lo, double x_hi,
                                    int nx) {
    require(par.a + par.c > 0.0, "x_density_table: requires a + c > 0");
    require(nx >= 2 && x_hi > x_lo, "x_density_table: bad x range");
    const double h = par.a + par.c;
    const double delta_req = (x_hi - x_lo) / (nx - 1);
    const long long stride = static_cast<long long>(std::ceil(delta_req / 0.011));
    const double delta = delta_req / static_cast<double>(stride);
    // x values are snapped to the lattice so every y + x is a lattice point
    const long long off0 = std::llround(x_lo / delta);
    const long long offN = off0 + (nx - 1) * stride;
    const double y_lo = -5.0, y_hi = 16.0 / h + 2.0;
    const long long ny = static_cast<long long>(std::floor((y_hi - y_lo) / delta)) + 1;
    const long long jshift = std::max<long long>(0, -off0);
    const long long m = jshift + ny + std::max<long long>(0, offN);
    std::vector<double> lattice(static_cast<size_t>(m));
    for (long long j = 0; j < m; ++j)
        lattice[static_cast<size_t>(j)] = y_lo + delta * static_cast<double>(j - jshift);
    SpectralBasis basis(lattice, par.tau);
    const Eigen::MatrixXd P = basis.pmat(par.tau);
    const double C = const_C(par).value;

    DensityTable out;
    out.grid.resize(nx);
    out.values.resize(nx);
    for (int k = 0; k < nx; ++k) {
        const long long off = off0 + k * stride;
        double acc = 0.0;
        for (long long j = jshift; j < jshift + ny; ++j) {
            const long long jj = j + off;
            if (jj < 0 || jj >= m) continue;
            const double w = (j == jshift || j == jshift + ny - 1) ? 0.5 * delta : delta;
            acc += w * std::exp(-h * lattice[static_cast<size_t>(j)]) *
                   P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(jj));
        }
        const double x = delta * static_cast<double>(off);
        out.grid[k] = x;
        out.values[k] = std::max(0.0, std::exp(-par.a * x) * acc / C);
    }
    out.total_mass = trapezoid_mass(out.grid, out.values);
    out.context = "X a=" + std::to_string(par.a) + " c=" + std::to_string(par.c) +
                  " tau=" + std::to_string(par.tau) + " t=" + std::to_string(par.tau);
    return out;
}

namespace process_detail {

// Ratio-of-uniforms envelope for the GIG density kernel
// x^{nu-1} e^{-(x + alpha^2/x)/2}; bounds fitted on a log-spaced scan.
struct GigEnvelope {
    double mode = 0.0, lh_mode = 0.0, vlo = 0.0, vhi = 0.0;
    double nu = 0.0, alpha = 0.0;

    explicit GigEnvelope(double nu_, double alpha_) : nu(nu_), alpha(alpha_) {
        mode = (nu - 1.0) + std::sqrt((nu - 1.0) * (nu - 1.0) + alpha * alpha);
        lh_mode = logh(mode);
        double rmin = 0.0, rmax = 0.0;
        const int n = 4001;
        for (int i = 0; i < n; ++i) {
            const double e = -14.0 + 28.0 * i / (n - 1);
            const double x = mode * std::exp(e);
            const double r = (x - mode) * std::exp(0.5 * (logh(x) - lh_mode));
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        vlo = 1.1 * rmin;
        vhi = 1.1 * rmax;
    }

    double logh(double x) const {
        return (nu - 1.0) * std::log(x) - 0.5 * (x + alpha * alpha / x);
    }

    double draw(Rng& rng) const {
        for (;;) {
            const double u = rng.uniform();
            const double v = vlo + (vhi - vlo) * rng.uniform();
            const double x = mode + v / u;
            if (x > 0.0 && 2.0 * std::log(u) <= logh(x) - lh_mode) return x;
        }
    }
};

}  // namespace process_detail

// Normalized GIG(nu, alpha) density.
inline double gig_density(double nu, double alpha, double x) {
    require(alpha > 0.0, "gig_density: alpha must be positive");
    if (x <= 0.0) return 0.0;
    const double norm =
        std::pow(alpha, -nu) / (2.0 * bessel_k_real(nu, alpha));
    return norm * std::pow(x, nu - 1.0) * std::exp(-0.5 * (x + alpha * alpha / x));
}

// n independent GIG(nu, alpha) draws as a scalar ensemble.
inline PathEnsemble gig_sample(double nu, double alpha, int n, uint64_t seed) {
    require(alpha > 0.0, "gig_sample: alpha must be positive");
    require(n >= 1, "gig_sample: n must be positive");
    const process_detail::GigEnvelope env(nu, alpha);
    PathEnsemble ens;
    ens.n_paths = n;
    ens.n_steps = 0;
    ens.horizon = 0.0;
    ens.seed = seed;
    ens.times = {0.0};
    ens.values.resize(n);
    ens.stream_ids.resize(n);
    for (int i = 0; i < n; ++i) {
        ens.stream_ids[i] = static_cast<uint64_t>(i);
        Rng rng(seed, static_cast<uint64_t>(i));
        ens.values[i] = env.draw(rng);
    }
    return ens;
}

// Hariya-Yor path representation of the half-line process increments:
// B_t + a t/2 + log(1 + gamma_{(c-a)/2} int_0^t e^{-2B_s - a s} ds).
inline PathEnsemble hariya_yor_sample(const BoundaryParams& par, const FddSpec& spec,
                                      int n_steps, int n, uint64_t seed) {
    ProcessKind kind{ProcessTag::hariya_yor, par};
    validate(kind);
    require(n_steps >= 1 && n >= 1, "hariya_yor_sample: n and n_steps must be positive");
    const double t_max = spec.times.back();
    validate(spec, t_max);
    const double dt = t_max / n_steps;
    std::vector<int> marks;
    for (double t : spec.times) {
        int k = static_cast<int>(std::llround(t / dt));
        marks.push_back(std::max(1, std::min(n_steps, k)));
    }
    const size_t cols = spec.times.size() + (spec.includes_t0 ? 1 : 0);
    PathEnsemble ens;
    ens.n_paths = n;
    ens.n_steps = n_steps;
    ens.horizon = t_max;
    ens.seed = seed;
    if (spec.includes_t0) ens.times.push_back(0.0);
    ens.times.insert(ens.times.end(), spec.times.begin(), spec.times.end());
    ens.values.resize(static_cast<size_t>(n) * cols);
    ens.stream_ids.resize(n);
    const double sd = std::sqrt(dt / 2.0);
    const double shape = (par.c - par.a) / 2.0;
    for (int i = 0; i < n; ++i) {
        ens.stream_ids[i] = static_cast<uint64_t>(i);
        Rng rng(seed, static_cast<uint64_t>(i));
        const double g = rng.gamma(shape);
        double B = 0.0, J = 0.0, prev = 1.0;
        size_t col = 0;
        if (spec.includes_t0) ens.values[i * cols + col++] = 0.0;
        for (int k = 1; k <= n_steps; ++k) {
            const double s = k * dt;
            B += sd * rng.normal();
            const double cur = std::exp(-2.0 * B - par.a * s);
            J += 0.5 * (prev + cur) * dt;
            prev = cur;
            for (size_t r = 0; r < marks.size(); ++r)
                if (marks[r] == k)
                    ens.values[i * cols + (spec.includes_t0 ? 1 : 0) + r] =
                        B + par.a * s / 2.0 + std::log1p(g * J);
        }
    }
    return ens;
}

// Witness functionals for the transformation identity. Fixed catalog since
// the identity quantifies over all bounded F.
inline std::function<double(double)> hy_functional(const std::string& id) {
    if (id == "one") return [](double) { return 1.0; };
    if (id == "exp-0.5") return [](double d) { return std::exp(-0.5 * d); };
    if (id == "exp-1") return [](double d) { return std::exp(-d); };
    throw DomainError("hy_functional: unknown id '" + id +
                      "' (catalog: one, exp-0.5, exp-1)");
}

// Two-sided Monte Carlo check of the GIG-transformation identity.
// Left: F at the log-corrected drifted path endpoint with an independent
// half-GIG(−a, e^{-x}) coefficient. Right: the killed-path expectation with
// the e^{-a^2 t/4} K_a ratio weight.
inline VerificationReport hy_identity_check(double a, double x, double t,
                                            const std::string& functional_id, int n,
                                            uint64_t seed, int n_steps = 1000) {
    require(a <= 0.0, "hy_identity_check: requires a <= 0");
    require(t > 0.0, "hy_identity_check: t must be positive");
    require(n >= 100, "hy_identity_check: n too small");
    auto F = hy_functional(functional_id);
    const double dt = t / n_steps;
    const double sd = std::sqrt(dt / 2.0);
    const process_detail::GigEnvelope env(-a, std::exp(-x));

    double lsum = 0.0, lsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, static_cast<uint64_t>(i));
        const double V = 0.5 * env.draw(rng);
        double B = 0.0, J = 0.0, prev = 1.0;
        for (int k = 1; k <= n_steps; ++k) {
            B += sd * rng.normal();
            const double cur = std::exp(-2.0 * B - a * k * dt);
            J += 0.5 * (prev + cur) * dt;
            prev = cur;
        }
        const double d = B + a * t / 2.0 + std::log1p(V * J);
        const double f = F(d);
        lsum += f;
        lsum2 += f * f;
    }
    const double lhs = lsum / n;
    const double lse = std::sqrt(std::max(0.0, lsum2 / n - lhs * lhs) / n);

    const double kref = bessel_k_real(a, std::exp(-x));
    const double pref = std::exp(-a * a * t / 4.0);
    double rsum = 0.0, rsum2 = 0.0, wsum = 0.0, wsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, static_cast<uint64_t>(n + i));
        double B = 0.0, I = 0.0, prev = std::exp(-2.0 * x);
        for (int k = 1; k <= n_steps; ++k) {
            B += sd * rng.normal();
            const double cur = std::exp(-2.0 * (x + B));
            I += 0.5 * (prev + cur) * dt;
            prev = cur;
        }
        const double w =
            pref * std::exp(-0.25 * I) * bessel_k_real(a, std::exp(-(x + B))) / kref;
        const double f = w * F(B);
        rsum += f;
        rsum2 += f * f;
        wsum += w;
        wsum2 += w * w;
    }
    const double rhs = rsum / n;
    const double rse = std::sqrt(std::max(0.0, rsum2 / n - rhs * rhs) / n);
    const double ess = wsum2 > 0.0 ? wsum * wsum / wsum2 : 0.0;
    if (ess < 10.0)
        throw StatQualityError("hy_identity_check: killed-path weights degenerate");

    VerificationReport rep;
    rep.suite = "hy_identity";
    rep.seed = seed;
    rep.config = "a=" + std::to_string(a) + " x=" + std::to_string(x) +
                 " t=" + std::to_string(t) + " F=" + functional_id +
                 " n=" + std::to_string(n) + " steps=" + std::to_string(n_steps);
    const double se = std::sqrt(lse * lse + rse * rse);
    rep.checks.push_back({"transform vs killed-path expectation, |lhs - rhs| within 3 SE",
                          std::abs(lhs - rhs), 3.0 * se, std::abs(lhs - rhs) <= 3.0 * se});
    rep.checks.push_back({"killed-path weight effective sample size >= 10", ess, 10.0,
                          ess >= 10.0});
    return rep;
}

// Laplace transform of the start-point marginal: E e^{-s Y_0} as a ratio of
// normalizing constants.
inline double laplace_y0(const BoundaryParams& par, double s) {
    require(s >= 0.0, "laplace_y0: s must be nonnegative");
    require(par.a + par.c > 0.0, "laplace_y0: requires a + c > 0");
    require(par.a + par.c + s > 0.0, "laplace_y0: requires a + c + s > 0");
    BoundaryParams shifted = par;
    shifted.c += s;
    return const_C(shifted).value / const_C(par).value;
}

// Quadrature cross-route for the same transform: e^{-s x} against the
// unnormalized start-point density e^{-c x} H_0(x).
inline double laplace_y0_quadrature(const BoundaryParams& par, double s,
                                    const QuadratureSpec& quad = {}) {
    require(par.a + par.c > 0.0 && par.a + par.c + s > 0.0,
            "laplace_y0_quadrature: domain violation");
    const double lo = -4.0;
    const double hi = 18.0 / std::max(par.c + s, 0.4);
    std::vector<double> xs, ws;
    panel_nodes(lo, hi, 30, xs, ws, quad.nodes);
    const std::vector<double> H = doob_H_row(xs, 0.0, par);
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        acc += ws[i] * std::exp(-(par.c + s) * xs[i]) * H[i];
    return acc / const_C(par, quad).value;
}

}  // namespace kpz
