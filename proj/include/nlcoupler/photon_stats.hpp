#ifndef NLCOUPLER_PHOTON_STATS_HPP
#define NLCOUPLER_PHOTON_STATS_HPP

#include <cmath>
#include <complex>
#include <utility>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/evolution.hpp"
#include "nlcoupler/states.hpp"

namespace nlcoupler {

/// The second-moment kernels V1..V7 of one output mode.
struct StatsKernels {
    double v1 = 0.0;   // |K|^2 + |L|^2
    double v2 = 0.0;   // |M|^2 + |N|^2
    double v3 = 0.0;   // |N|^2 + |L|^2
    complexd v4, v5;   // K* L,  M* N
    complexd v6, v7;   // K N* + L* M,  M K* + N* L
};

/// Squeezing measures S_j = 4 Var(X_j) - 1 and Q_j = 4 Var(Y_j) - 1 for both
/// modes; negative values signal squeezing below vacuum noise.
struct QuadratureReport {
    double s1 = 0.0, q1 = 0.0;
    double s2 = 0.0, q2 = 0.0;
    bool s1_squeezed = false, q1_squeezed = false;
    bool s2_squeezed = false, q2_squeezed = false;
};

/// First and second photon-number moments of one output mode.
struct PhotonStatistics {
    double mean = 0.0;
    double variance = 0.0;
    double g2 = 0.0;
};

namespace detail {

struct ModeKLMN {
    complexd K, L, M, N;
};

// K multiplies the mode's own annihilation operator, M the other mode's.
inline ModeKLMN mode_klmn(const EvolutionCoefficients& c, int mode) {
    if (mode == 1) return {c.k1, c.l1, c.m1, c.n1};
    if (mode == 2) return {c.k2, c.l2, c.m2, c.n2};
    throw ConfigError("mode must be 1 or 2");
}

// (own, other) input-side data for one output mode.
template <typename T>
inline std::pair<T, T> own_other(T first, T second, int mode) {
    return mode == 1 ? std::pair<T, T>{first, second} : std::pair<T, T>{second, first};
}

// <e^2> of the zero-mean fluctuation operator e = K d1 + L d1+ + M d2 + N d2+
// when the input fluctuations have <d^2> = 0 and <d+ d> = occ.
inline complexd fluctuation_sq(const ModeKLMN& m, double occ_own, double occ_other) {
    return m.K * m.L * (2.0 * occ_own + 1.0) + m.M * m.N * (2.0 * occ_other + 1.0);
}

} // namespace detail

StatsKernels stats_kernels(const EvolutionCoefficients& c, int mode) {
    const auto m = detail::mode_klmn(c, mode);
    StatsKernels k;
    k.v1 = std::norm(m.K) + std::norm(m.L);
    k.v2 = std::norm(m.M) + std::norm(m.N);
    k.v3 = std::norm(m.N) + std::norm(m.L);
    k.v4 = std::conj(m.K) * m.L;
    k.v5 = std::conj(m.M) * m.N;
    k.v6 = m.K * std::conj(m.N) + std::conj(m.L) * m.M;
    k.v7 = m.M * std::conj(m.K) + std::conj(m.N) * m.L;
    return k;
}

/// Mean amplitude <a_j(t)> in the pump frame for coherent input.
complexd mean_amplitude(const EvolutionCoefficients& c, const Coherent& st, int mode) {
    const auto m = detail::mode_klmn(c, mode);
    const auto [own, other] = detail::own_other(st.alpha1, st.alpha2, mode);
    return m.K * own + m.L * std::conj(own) + m.M * other + m.N * std::conj(other);
}

double mean_photon(const EvolutionCoefficients& c, const InputState& state, int mode) {
    validate(state);
    const StatsKernels k = stats_kernels(c, mode);
    if (const auto* coh = std::get_if<Coherent>(&state)) {
        const auto [u, w] = detail::own_other(coh->alpha1, coh->alpha2, mode);
        const complexd cross = u * u * std::conj(k.v4) + w * w * std::conj(k.v5) +
                               std::conj(u) * w * k.v7 + u * w * k.v6;
        return std::norm(u) * k.v1 + std::norm(w) * k.v2 + k.v3 + 2.0 * cross.real();
    }
    if (const auto* f = std::get_if<Fock>(&state)) {
        const auto [n, m] = detail::own_other(f->n, f->m, mode);
        return n * k.v1 + m * k.v2 + k.v3;
    }
    const auto& th = std::get<Thermal>(state);
    const auto [n1, n2] = detail::own_other(th.nbar1, th.nbar2, mode);
    return n1 * k.v1 + n2 * k.v2 + k.v3;
}

double photon_variance(const EvolutionCoefficients& c, const InputState& state, int mode) {
    validate(state);
    const auto m = detail::mode_klmn(c, mode);
    const StatsKernels k = stats_kernels(c, mode);

    if (const auto* coh = std::get_if<Coherent>(&state)) {
        // n = |cbar + e|^2 with cbar the mean amplitude and e the vacuum
        // fluctuation of the output mode, [e, e+] = 1:
        //   Var(n) = (2 V3 + 1)|cbar|^2 + 2 Re(cbar*^2 <e^2>)
        //            + |<e^2>|^2 + V3^2 + V3.
        const complexd cbar = mean_amplitude(c, *coh, mode);
        const complexd psi = detail::fluctuation_sq(m, 0.0, 0.0);
        const complexd cbar_conj_sq = std::conj(cbar) * std::conj(cbar);
        return (2.0 * k.v3 + 1.0) * std::norm(cbar) + 2.0 * (cbar_conj_sq * psi).real() +
               std::norm(psi) + k.v3 * k.v3 + k.v3;
    }
    if (const auto* f = std::get_if<Fock>(&state)) {
        // Direct expansion of <n^2> - <n>^2 on |n>|m>; the two input modes
        // contribute independent single-mode pieces plus an intensity cross
        // term and the pair-moment interference (KL)*(MN).
        const auto [n, mm] = detail::own_other<double>(f->n, f->m, mode);
        const double k2 = std::norm(m.K), l2 = std::norm(m.L);
        const double m2 = std::norm(m.M), n2 = std::norm(m.N);
        const double kl2 = k2 * l2, mn2 = m2 * n2;
        const double ea = k2 * n + l2 * (n + 1.0);
        const double eb = m2 * mm + n2 * (mm + 1.0);
        const complexd pair_int = std::conj(m.K * m.L) * (m.M * m.N);
        return n * k2 * (1.0 - k2) + (n + 1.0) * l2 * (1.0 + l2) +
               kl2 * (2.0 * n * n + 2.0 * n + 1.0) + mm * m2 * (1.0 - m2) +
               (mm + 1.0) * n2 * (1.0 + n2) + mn2 * (2.0 * mm * mm + 2.0 * mm + 1.0) +
               2.0 * ea * eb + 2.0 * pair_int.real() * (2.0 * n + 1.0) * (2.0 * mm + 1.0);
    }
    // Thermal: zero-mean Gaussian input, so the photon-number variance
    // factorizes by the Gaussian moment theorem:
    //   Var(n) = <n>^2 + <n> + |<e^2>|^2.
    const auto& th = std::get<Thermal>(state);
    const auto [n1, n2] = detail::own_other(th.nbar1, th.nbar2, mode);
    const double mean = n1 * k.v1 + n2 * k.v2 + k.v3;
    const complexd e2 = detail::fluctuation_sq(m, n1, n2);
    return mean * mean + mean + std::norm(e2);
}

double g2(const EvolutionCoefficients& c, const InputState& state, int mode) {
    const double mean = mean_photon(c, state, mode);
    if (mean < 1e-30)
        throw ZeroIntensity("g2 undefined: mean photon number below 1e-30");
    const double var = photon_variance(c, state, mode);
    return 1.0 + (var - mean) / (mean * mean);
}

PhotonStatistics photon_statistics(const EvolutionCoefficients& c, const InputState& state,
                                   int mode) {
    PhotonStatistics ps;
    ps.mean = mean_photon(c, state, mode);
    ps.variance = photon_variance(c, state, mode);
    ps.g2 = 1.0 + (ps.variance - ps.mean) / (ps.mean * ps.mean);
    return ps;
}

namespace detail {

// S (sign = +1) or Q (sign = -1) for one mode.  For any input with
// <d> arbitrary, <d^2> = 0 and <d+ d> = occ per mode (thermal, number and
// coherent states all qualify; coherent uses occ = 0),
//   4 Var(X) - 1 = 2 <e+ e> + 2 Re <e^2>
// with e the fluctuation part of the output operator.
inline double quad_measure(const ModeKLMN& m, double occ_own, double occ_other, double sign) {
    const double ee = occ_own * (std::norm(m.K) + std::norm(m.L)) +
                      occ_other * (std::norm(m.M) + std::norm(m.N)) + std::norm(m.L) +
                      std::norm(m.N);
    const complexd e2 = fluctuation_sq(m, occ_own, occ_other);
    return 2.0 * ee + sign * 2.0 * e2.real();
}

} // namespace detail

/// Quadrature squeezing for both modes.  Number and thermal inputs share
/// the same quadrature variances (occ_j = n_j resp. nbar_j); coherent input
/// has vacuum-level fluctuations regardless of amplitude.
QuadratureReport squeezing(const EvolutionCoefficients& c, const InputState& state) {
    validate(state);
    double occ1 = 0.0, occ2 = 0.0;
    if (const auto* f = std::get_if<Fock>(&state)) {
        occ1 = f->n;
        occ2 = f->m;
    } else if (const auto* t = std::get_if<Thermal>(&state)) {
        occ1 = t->nbar1;
        occ2 = t->nbar2;
    }
    const auto m1 = detail::mode_klmn(c, 1);
    const auto m2 = detail::mode_klmn(c, 2);

    QuadratureReport r;
    r.s1 = detail::quad_measure(m1, occ1, occ2, +1.0);
    r.q1 = detail::quad_measure(m1, occ1, occ2, -1.0);
    r.s2 = detail::quad_measure(m2, occ2, occ1, +1.0);
    r.q2 = detail::quad_measure(m2, occ2, occ1, -1.0);
    r.s1_squeezed = r.s1 < 0.0;
    r.q1_squeezed = r.q1 < 0.0;
    r.s2_squeezed = r.s2 < 0.0;
    r.q2_squeezed = r.q2 < 0.0;
    return r;
}

} // namespace nlcoupler

#endif
