#ifndef NLCOUPLER_CHAR_FN_HPP
#define NLCOUPLER_CHAR_FN_HPP

#include <cmath>
#include <complex>
#include <utility>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/evolution.hpp"
#include "nlcoupler/polynomials.hpp"
#include "nlcoupler/states.hpp"

namespace nlcoupler {

/// Which output mode(s) a phase-space quantity refers to.
struct Selection {
    bool joint = false;
    int mode = 1;

    static Selection single(int mode) { return {false, mode}; }
    static Selection both() { return {true, 1}; }
};

namespace detail {

// Coefficients (eta1, eta2) of the initial-mode displacement generated by
// exp(z1 a1+(t) - z1* a1(t) + z2 a2+(t) - z2* a2(t)); index = initial mode.
inline std::pair<complexd, complexd> eta_pair(const EvolutionCoefficients& c, const complexd& z1,
                                              const complexd& z2) {
    const complexd eta1 =
        z1 * std::conj(c.k1) - std::conj(z1) * c.l1 + z2 * std::conj(c.m2) - std::conj(z2) * c.n2;
    const complexd eta2 =
        z1 * std::conj(c.m1) - std::conj(z1) * c.n1 + z2 * std::conj(c.k2) - std::conj(z2) * c.l2;
    return {eta1, eta2};
}

} // namespace detail

/// Two-mode s-parametrized characteristic function at (z1, z2).  The s-term
/// and the Gaussian part share one exponential so that growing orderings
/// (s = 1 on nonclassical states) overflow to inf instead of producing
/// inf * 0.
complexd char_fn_joint(const EvolutionCoefficients& c, const InputState& state, double s,
                       const complexd& z1, const complexd& z2) {
    validate(state);
    const auto [eta1, eta2] = detail::eta_pair(c, z1, z2);
    const double q1 = std::norm(eta1), q2 = std::norm(eta2);
    const double szz = 0.5 * s * (std::norm(z1) + std::norm(z2));
    if (const auto* f = std::get_if<Fock>(&state)) {
        return std::exp(szz - 0.5 * (q1 + q2)) * laguerre(f->n, q1) * laguerre(f->m, q2);
    }
    if (const auto* coh = std::get_if<Coherent>(&state)) {
        const complexd disp = eta1 * std::conj(coh->alpha1) - std::conj(eta1) * coh->alpha1 +
                              eta2 * std::conj(coh->alpha2) - std::conj(eta2) * coh->alpha2;
        return std::exp(szz - 0.5 * (q1 + q2) + disp);
    }
    const auto& th = std::get<Thermal>(state);
    return std::exp(szz - (th.nbar1 + 0.5) * q1 - (th.nbar2 + 0.5) * q2);
}

/// Single-mode s-parametrized characteristic function (the joint one with
/// the other mode's argument set to zero).
complexd char_fn_single(const EvolutionCoefficients& c, const InputState& state, int mode,
                        double s, const complexd& z) {
    if (mode != 1 && mode != 2) throw ConfigError("char_fn_single: mode must be 1 or 2");
    return mode == 1 ? char_fn_joint(c, state, s, z, complexd(0.0))
                     : char_fn_joint(c, state, s, complexd(0.0), z);
}

complexd char_fn(const EvolutionCoefficients& c, const InputState& state, const Selection& sel,
                 double s, const complexd& z1, const complexd& z2 = complexd(0.0)) {
    return sel.joint ? char_fn_joint(c, state, s, z1, z2)
                     : char_fn_single(c, state, sel.mode, s, z1);
}

} // namespace nlcoupler

#endif
