#pragma once
// Gauss-Legendre panel quadrature. Nodes are computed once per order by
// Newton iteration on the Legendre recurrence and cached.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "kpz/common.hpp"

namespace kpz {

struct GaussRule {
    std::vector<double> x;  // nodes on (-1, 1)
    std::vector<double> w;
};

inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

// Equal panels over [a, b], `nodes`-point rule each; fills flat node/weight arrays.
inline void panel_nodes(double a, double b, int panels, std::vector<double>& xs,
                        std::vector<double>& ws, int nodes = 32) {
    const GaussRule& r = gauss_legendre(nodes);
    xs.resize(static_cast<size_t>(panels) * nodes);
    ws.resize(xs.size());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int j = 0; j < nodes; ++j) {
            xs[static_cast<size_t>(p) * nodes + j] = mid + 0.5 * h * r.x[j];
            ws[static_cast<size_t>(p) * nodes + j] = 0.5 * h * r.w[j];
        }
    }
}

template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int nodes = 32) {
    std::vector<double> xs, ws;
    panel_nodes(a, b, panels, xs, ws, nodes);
    double s = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) s += ws[i] * f(xs[i]);
    return s;
}

// Panel integration with a node-doubling self-check; est_error is the
// difference between the two refinement levels.
template <class F>
KernelValue integrate_checked(F&& f, double a, double b, int panels, const QuadratureSpec& q) {
    int nodes = q.nodes < 16 ? 16 : q.nodes;
    double coarse = integrate_panels(f, a, b, panels, nodes);
    double fine = integrate_panels(f, a, b, 2 * panels, nodes);
    KernelValue kv;
    kv.value = fine;
    kv.est_error = std::abs(fine - coarse);
    return kv;
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    w[0] = 0.5 * (grid[1] - grid[0]);
    w[n - 1] = 0.5 * (grid[n - 1] - grid[n - 2]);
    for (size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    return w;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
    return v;
}

}  // namespace kpz
