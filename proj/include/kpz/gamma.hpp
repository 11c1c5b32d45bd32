#pragma once
// Complex log-Gamma (Lanczos) and the squared modulus |Gamma(re + i im)|^2.
// One internal implementation; everything Gamma-shaped in the library is
// derived from it or from the std real-argument functions.

#include <cmath>
#include <complex>

#include "kpz/common.hpp"

namespace kpz {

inline std::complex<double> lgamma_complex(std::complex<double> z) {
    // Lanczos, g = 7, 9 terms; reflection for Re z < 0.5.
    static const double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (z.real() < 0.5) {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        std::complex<double> s = std::sin(M_PI * z);
        return std::log(M_PI) - std::log(s) - lgamma_complex(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = coef[0];
    for (int k = 1; k < 9; ++k) x += coef[k] / (z + static_cast<double>(k));
    std::complex<double> t = z + 7.5;
    return 0.918938533204672742 + (z + 0.5) * std::log(t) - t + std::log(x);
}

// 2 Re log Gamma(re + i im); the log of |Gamma|^2.
inline double lgamma_abs2(double re, double im) {
    return 2.0 * lgamma_complex({re, im}).real();
}

inline double abs_gamma_sq(double re, double im) {
    if (im == 0.0 && re <= 0.0 && re == std::floor(re))
        throw DomainError("abs_gamma_sq: pole at nonpositive integer");
    return std::exp(lgamma_abs2(re, im));
}

inline double gamma_fn(double x) { return std::tgamma(x); }

// 1/Gamma with the 1/Gamma(0) = 0 convention extended to the poles.
inline double inv_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

}  // namespace kpz
