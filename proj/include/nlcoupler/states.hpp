#ifndef NLCOUPLER_STATES_HPP
#define NLCOUPLER_STATES_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <variant>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/params.hpp"

namespace nlcoupler {

/// Both modes in coherent states |alpha1>|alpha2>.
struct Coherent {
    complexd alpha1{0.0, 0.0};
    complexd alpha2{0.0, 0.0};
};

/// Both modes in number states |n>|m>.
struct Fock {
    int n = 0;
    int m = 0;
};

/// Both modes in thermal states with mean occupations nbar1, nbar2.
struct Thermal {
    double nbar1 = 0.0;
    double nbar2 = 0.0;
};

using InputState = std::variant<Coherent, Fock, Thermal>;

inline void validate(const InputState& s) {
    if (const auto* c = std::get_if<Coherent>(&s)) {
        if (!std::isfinite(c->alpha1.real()) || !std::isfinite(c->alpha1.imag()) ||
            !std::isfinite(c->alpha2.real()) || !std::isfinite(c->alpha2.imag()))
            throw ConfigError("Coherent: amplitudes must be finite");
    } else if (const auto* f = std::get_if<Fock>(&s)) {
        if (f->n < 0 || f->m < 0) throw ConfigError("Fock: occupations must be >= 0");
    } else if (const auto* t = std::get_if<Thermal>(&s)) {
        if (!(t->nbar1 >= 0.0) || !(t->nbar2 >= 0.0))
            throw ConfigError("Thermal: mean occupations must be >= 0");
    }
}

inline std::string describe(const InputState& s) {
    char buf[128];
    if (const auto* c = std::get_if<Coherent>(&s)) {
        std::snprintf(buf, sizeof buf, "coherent(%g%+gi, %g%+gi)", c->alpha1.real(),
                      c->alpha1.imag(), c->alpha2.real(), c->alpha2.imag());
    } else if (const auto* f = std::get_if<Fock>(&s)) {
        std::snprintf(buf, sizeof buf, "fock(%d, %d)", f->n, f->m);
    } else {
        const auto& t = std::get<Thermal>(s);
        std::snprintf(buf, sizeof buf, "thermal(%g, %g)", t.nbar1, t.nbar2);
    }
    return buf;
}

/// Swaps the two input modes (used by the interchange-symmetry relations).
inline InputState swap_modes(const InputState& s) {
    if (const auto* c = std::get_if<Coherent>(&s)) return Coherent{c->alpha2, c->alpha1};
    if (const auto* f = std::get_if<Fock>(&s)) return Fock{f->m, f->n};
    const auto& t = std::get<Thermal>(s);
    return Thermal{t.nbar2, t.nbar1};
}

} // namespace nlcoupler

#endif
