#pragma once
// Spectral basis for the interval transition density on a fixed grid.
//
// The density has the diagonalized form
//   p_t(x,y) = (1/pi^2) int_0^inf e^{-t u^2/4} S(u,e^{-x}) S(u,e^{-y})
//              u (1 - e^{-2 pi u}) du
// so precomputing SU[i][j] = S(u_i, e^{-grid_j}) once turns every p_t(grid,grid)
// matrix into a weighted Gram product. The u truncation keeps the dropped tail
// below e^{-t_min u^2/4} ~ 1e-64 for the smallest time step that will be asked
// of this basis; the panel count scales with the largest Fourier frequency
// present, which is max|grid| + 1.

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "kpz/bessel.hpp"
#include "kpz/common.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

class SpectralBasis {
public:
    using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    SpectralBasis(std::vector<double> grid, double t_min, double umax_cap = BESSEL_U_CAP)
        : grid_(std::move(grid)), t_min_(t_min) {
        require(grid_.size() >= 2, "SpectralBasis: grid needs at least two points");
        require(t_min > 0.0, "SpectralBasis: t_min must be positive");
        double gmax = 0.0;
        for (double g : grid_) gmax = std::max(gmax, std::abs(g));
        const double umax = std::min(std::sqrt(64.0 * std::log(10.0) / t_min), umax_cap);
        const double freq = gmax + 1.0;
        int panels = static_cast<int>(umax * freq / 3.0);
        if (panels < 8) panels = 8;
        if (panels > 6000) panels = 6000;
        panel_nodes(1e-13, umax, panels, u_, w_);

        const auto nu = static_cast<Eigen::Index>(u_.size());
        const auto nx = static_cast<Eigen::Index>(grid_.size());
        if (static_cast<double>(nu) * static_cast<double>(nx) > 1.2e8)
            throw AccuracyError("SpectralBasis: grid x frequency budget exceeded");

        ex_.resize(grid_.size());
        for (size_t j = 0; j < grid_.size(); ++j) ex_[j] = std::exp(-grid_[j]);

        su_.resize(nu, nx);
        for (Eigen::Index i = 0; i < nu; ++i)
            bessel_k_scaled_imag_row(u_[i], ex_, &su_(i, 0));

        meas_.resize(nu);
        for (Eigen::Index i = 0; i < nu; ++i)
            meas_[i] = u_[i] * (-std::expm1(-2.0 * M_PI * u_[i])) / (M_PI * M_PI);
    }

    const std::vector<double>& grid() const { return grid_; }
    size_t grid_size() const { return grid_.size(); }
    double t_min() const { return t_min_; }
    const std::vector<double>& u_nodes() const { return u_; }
    const std::vector<double>& u_weights() const { return w_; }

    // sum_i d_i S(u_i, e^{-grid_j}) over the stored rows. Lets callers reuse
    // the S matrix for any u-integral whose truncation fits inside this basis
    // (any effective time >= t_min), e.g. the Doob factor rows.
    Eigen::VectorXd su_apply(const Eigen::VectorXd& d) const { return su_.transpose() * d; }

    // p_t on grid x grid. Symmetric positive semidefinite, so a scaled Gram
    // (syrk) product does the work of the full triple product.
    Eigen::MatrixXd pmat(double t) const {
        require(t > 0.0, "SpectralBasis::pmat: t must be positive");
        const auto nu = static_cast<Eigen::Index>(u_.size());
        const auto nx = static_cast<Eigen::Index>(grid_.size());
        Eigen::VectorXd dsqrt(nu);
        for (Eigen::Index i = 0; i < nu; ++i)
            dsqrt[i] = std::sqrt(w_[i] * meas_[i] * std::exp(-t * u_[i] * u_[i] / 4.0));
        MatRM b = su_;
        b.array().colwise() *= dsqrt.array();
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(nx, nx);
        p.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
        p.triangularView<Eigen::StrictlyUpper>() = p.transpose();
        return p;
    }

    // Single row p_t(x, grid_k) for x off the grid.
    Eigen::VectorXd prow(double t, double x) const {
        require(t > 0.0, "SpectralBasis::prow: t must be positive");
        const auto nu = static_cast<Eigen::Index>(u_.size());
        const double ex = std::exp(-x);
        Eigen::VectorXd d(nu);
        for (Eigen::Index i = 0; i < nu; ++i)
            d[i] = w_[i] * meas_[i] * std::exp(-t * u_[i] * u_[i] / 4.0) *
                   bessel_k_scaled_imag(u_[i], ex);
        return su_.transpose() * d;
    }

private:
    std::vector<double> grid_;
    double t_min_ = 0.0;
    std::vector<double> ex_;
    std::vector<double> u_, w_;
    MatRM su_;
    Eigen::VectorXd meas_;
};

}  // namespace kpz
