#ifndef NLCOUPLER_PARAMS_HPP
#define NLCOUPLER_PARAMS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "nlcoupler/errors.hpp"

namespace nlcoupler {

using complexd = std::complex<double>;

/// Physical constants of the coupler.
///
/// lambda1, lambda2 drive subharmonic generation inside each waveguide,
/// lambda3 is the linear (evanescent) exchange rate and lambda4 the
/// nonlinear (parametric) exchange rate.  The pump-frame phases are fixed
/// to phi1(t) = (mu2 - mu1) t / 2 and phi2(t) = (mu2 + mu1) t / 2; with
/// that choice the only dynamical frequency parameters are the effective
/// detunings delta_j = omega_j + mu_j / 2, which are always recomputed
/// from omega_j and mu_j, never stored.
struct CouplerParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;

    double delta1() const { return omega1 + 0.5 * mu1; }
    double delta2() const { return omega2 + 0.5 * mu2; }

    void validate() const {
        for (double v : {lambda1, lambda2, lambda3, lambda4, omega1, omega2, mu1, mu2}) {
            if (!std::isfinite(v))
                throw ConfigError("CouplerParams: all rates and frequencies must be finite");
        }
    }
};

/// Combination constants of the exact solution.
///
/// The dressed squared frequencies are the eigenvalues of the squared
/// evolution generator,
///   obar_{1,2}^2 = (O1^2 + O2^2)/2 -/+ R/2,   R = sqrt(d^2 + 4 g1 g2),
/// with d = J- J+ - k- k+, so the trace identity
/// obar1^2 + obar2^2 = O1^2 + O2^2 holds by construction.  R^2 is always
/// real; negative R^2 makes the pair complex conjugate and downstream code
/// must not assume realness.
struct SpectralData {
    double lambda_plus = 0.0;   // lambda3 + lambda4
    double lambda_minus = 0.0;  // lambda3 - lambda4
    double k_plus = 0.0;        // delta1 + 2 lambda1
    double k_minus = 0.0;       // delta1 - 2 lambda1
    double j_plus = 0.0;        // delta2 + 2 lambda2
    double j_minus = 0.0;       // delta2 - 2 lambda2
    double g1 = 0.0;            // k- lambda+ + lambda- J+
    double g2 = 0.0;            // k+ lambda- + lambda+ J-
    complexd theta{0.0, 0.0};   // mixing angle, complex-capable
    double omega1_sq = 0.0;     // lambda- lambda+ + k- k+
    double omega2_sq = 0.0;     // lambda- lambda+ + J- J+
    complexd omega_bar_1{0.0, 0.0};
    complexd omega_bar_2{0.0, 0.0};

    double splitting_numerator() const { return j_minus * j_plus - k_minus * k_plus; }
};

SpectralData derive_spectral(const CouplerParams& p) {
    p.validate();
    SpectralData s;
    s.lambda_plus = p.lambda3 + p.lambda4;
    s.lambda_minus = p.lambda3 - p.lambda4;
    s.k_plus = p.delta1() + 2.0 * p.lambda1;
    s.k_minus = p.delta1() - 2.0 * p.lambda1;
    s.j_plus = p.delta2() + 2.0 * p.lambda2;
    s.j_minus = p.delta2() - 2.0 * p.lambda2;
    s.g1 = s.k_minus * s.lambda_plus + s.lambda_minus * s.j_plus;
    s.g2 = s.k_plus * s.lambda_minus + s.lambda_plus * s.j_minus;
    s.omega1_sq = s.lambda_minus * s.lambda_plus + s.k_minus * s.k_plus;
    s.omega2_sq = s.lambda_minus * s.lambda_plus + s.j_minus * s.j_plus;

    const double d = s.splitting_numerator();  // = omega2_sq - omega1_sq
    const double gg = s.g1 * s.g2;
    if (gg >= 0.0) {
        // Two-argument arctangent fixes theta = pi/4 * sign when d -> 0.
        s.theta = 0.5 * std::atan2(2.0 * std::sqrt(gg), d);
    } else {
        s.theta = 0.5 * std::atan(complexd(0.0, 2.0 * std::sqrt(-gg)) / d);
    }

    const complexd split = std::sqrt(complexd(d * d + 4.0 * gg, 0.0));
    const double mean = 0.5 * (s.omega1_sq + s.omega2_sq);
    s.omega_bar_1 = std::sqrt(mean - 0.5 * split);
    s.omega_bar_2 = std::sqrt(mean + 0.5 * split);
    return s;
}

enum class RegimeTag { Oscillatory, Amplifying, Mixed };

/// Dynamical classification of the coupler: real dressed frequencies give
/// periodic power switching, imaginary ones hyperbolic amplification.
struct Regime {
    RegimeTag tag = RegimeTag::Oscillatory;
    std::string detail;
};

Regime classify_regime(const SpectralData& s) {
    const complexd sq1 = s.omega_bar_1 * s.omega_bar_1;
    const complexd sq2 = s.omega_bar_2 * s.omega_bar_2;
    const double scale = std::max({1.0, std::abs(sq1), std::abs(sq2)});
    const double imag_tol = 1e-12 * scale;
    const bool real1 = std::abs(sq1.imag()) <= imag_tol;
    const bool real2 = std::abs(sq2.imag()) <= imag_tol;

    Regime r;
    if (real1 && real2 && sq1.real() >= 0.0 && sq2.real() >= 0.0) {
        r.tag = RegimeTag::Oscillatory;
        r.detail = "both dressed squared frequencies real and nonnegative";
    } else if ((real1 && sq1.real() < 0.0) || (real2 && sq2.real() < 0.0)) {
        r.tag = RegimeTag::Amplifying;
        r.detail = (real1 && sq1.real() < 0.0 && real2 && sq2.real() < 0.0)
                       ? "both dressed squared frequencies negative"
                       : (real1 && sq1.real() < 0.0 ? "obar1^2 negative" : "obar2^2 negative");
    } else {
        r.tag = RegimeTag::Mixed;
        r.detail = "dressed squared frequencies form a complex-conjugate pair";
    }
    return r;
}

inline const char* to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::Oscillatory: return "Oscillatory";
        case RegimeTag::Amplifying: return "Amplifying";
        case RegimeTag::Mixed: return "Mixed";
    }
    return "?";
}

} // namespace nlcoupler

#endif
