#pragma once
// Shared value types and error taxonomy for the kpz library.

#include <cmath>
#include <stdexcept>
#include <string>

namespace kpz {

// Parameter violations: inputs outside the mathematical domain of an
// operation (e.g. a + c <= 0 where the normalizing constant diverges).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The requested value exists but cannot be resolved by the implemented
// numerical routes at the requested point (e.g. the Hartman-Watson floor,
// or a transition row entirely below the spectral noise floor).
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Importance-sampling diagnostics too weak to support a conclusion.
struct StatQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures while emitting output.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundaryParams {
    double a = 0.0;
    double c = 0.0;
    double tau = 1.0;
};

// Quadrature controls shared by every integral-backed operation.
// upper_cutoff == 0 lets each operation pick its own truncation rule;
// nodes is the Gauss-Legendre order per panel.
struct QuadratureSpec {
    double upper_cutoff = 0.0;
    int nodes = 32;
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
};

struct KernelValue {
    double value = 0.0;
    double est_error = 0.0;
    std::string method;
};

struct BesselOrder {
    enum Kind { real_order, imaginary_order };
    Kind kind = real_order;
    double value = 0.0;

    static BesselOrder real(double nu) { return {real_order, nu}; }
    static BesselOrder imaginary(double u) { return {imaginary_order, u}; }
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace kpz
