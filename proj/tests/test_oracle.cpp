#include <catch2/catch_amalgamated.hpp>

#include "nlcoupler/fock_oracle.hpp"
#include "nlcoupler/photon_stats.hpp"
#include "nlcoupler/quasiprob.hpp"

using namespace nlcoupler;
using Catch::Approx;

namespace {
const CouplerParams curve_a{0.25, 0.25, 1.0, 0.25};
const CouplerParams amp_set{0.17, 0.2, 1.0, 2.0};
const double half_pi = 1.5707963267948966;
} // namespace

TEST_CASE("integrated coefficients: identity, agreement, growth") {
    const auto c0 = ode_coefficients(curve_a, 0.0);
    CHECK(c0.k1 == complexd(1.0));
    CHECK(std::abs(c0.l1) == 0.0);

    const auto cf = evolution_coefficients(curve_a, half_pi);
    const auto od = ode_coefficients(curve_a, half_pi);
    CHECK(std::abs(cf.k1 - od.k1) < 1e-8);
    CHECK(std::abs(cf.n2 - od.n2) < 1e-8);

    const auto ch = ode_coefficients(amp_set, 1.0);
    CHECK(std::abs(ch.k1) > 1.0);  // hyperbolic growth
    CHECK(check_symplectic(ch).max() < 1e-9);
}

TEST_CASE("effective Hamiltonian is symmetric and conserves the vacuum of the exchange") {
    const auto h = EffectiveHamiltonian::build(curve_a, 8);
    CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    // pure evanescent exchange keeps the vacuum invariant
    const CouplerParams bs{0.0, 0.0, 1.0, 0.0};
    for (double t : {0.5, 1.7, 3.0}) {
        const auto os = evolve_state(bs, InputState(Fock{0, 0}), t, 8);
        CHECK(oracle_moments(os, 1).mean == Approx(0.0).margin(1e-12));
        CHECK(oracle_moments(os, 2).mean == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("free evolution leaves every observable constant") {
    const CouplerParams free_p{0.0, 0.0, 0.0, 0.0};
    FockPropagator prop(free_p, 12);
    const InputState st = Coherent{{0.7, 0.1}, {0.2, -0.4}};
    const auto a = evolve_state(prop, st, 0.0);
    const auto b = evolve_state(prop, st, 2.9);
    for (int mode : {1, 2}) {
        const auto ma = oracle_moments(a, mode), mb = oracle_moments(b, mode);
        CHECK(ma.mean == Approx(mb.mean).margin(1e-11));
        CHECK(ma.variance == Approx(mb.variance).margin(1e-11));
        CHECK(ma.squeeze_s == Approx(mb.squeeze_s).margin(1e-11));
    }
}

TEST_CASE("unitarity and tail mass for a one-photon input") {
    FockPropagator prop(curve_a, 40);
    for (double t : {0.5, 1.0, half_pi, 3.0}) {
        const auto os = evolve_state(prop, InputState(Fock{1, 0}), t);
        CHECK(os.components[0].norm() == Approx(1.0).margin(1e-12));
        if (t == half_pi) CHECK(os.tail_mass < 1e-10);
        CHECK(os.tail_mass < 1e-8);
    }
}

TEST_CASE("cutoff convergence is bounded by the tail mass") {
    const InputState st = Fock{1, 0};
    const double t = 1.0;
    const auto os_small = evolve_state(curve_a, st, t, 20, /*strict=*/false);
    const auto os_big = evolve_state(curve_a, st, t, 40);
    const double diff =
        std::abs(oracle_moments(os_small, 1).mean - oracle_moments(os_big, 1).mean);
    CHECK(diff < 10.0 * std::max(os_small.tail_mass, 1e-12));
}

TEST_CASE("Schroedinger means follow the linear input-output map") {
    const InputState st = Coherent{{0.8, 0.0}, {0.0, -0.5}};
    FockPropagator prop(curve_a, 40);
    for (double t : {0.4, 1.3}) {
        const auto os = evolve_state(prop, st, t);
        const auto c = evolution_coefficients(curve_a, t);
        // <a1(t)> from the truncated state
        complexd a_mean = 0.0;
        const int nb = os.cutoff + 1;
        const auto& v = os.components[0];
        for (int n1 = 1; n1 < nb; ++n1)
            for (int n2 = 0; n2 < nb; ++n2)
                a_mean += std::conj(v((n1 - 1) * nb + n2)) * std::sqrt(double(n1)) *
                          v(n1 * nb + n2);
        CHECK(std::abs(a_mean - mean_amplitude(c, std::get<Coherent>(st), 1)) < 1e-6);
    }
}

TEST_CASE("truncated thermal mixture reproduces thermal counting statistics") {
    const auto os = evolve_state(curve_a, InputState(Thermal{0.5, 0.5}), 0.0, 25);
    CHECK(os.discarded_weight < 1e-9);
    CHECK(os.total_weight() + os.discarded_weight == Approx(1.0).margin(1e-12));
    const auto m = oracle_moments(os, 1);
    CHECK(m.g2 == Approx(2.0).margin(1e-6));
    CHECK(m.mean == Approx(0.5).margin(1e-9));
}

TEST_CASE("coherent moments match the analytic route") {
    const double t = 1.0;
    const auto os = evolve_state(curve_a, InputState(Coherent{{0.5, 0.0}, {0.3, 0.0}}), t, 30);
    const auto c = evolution_coefficients(curve_a, t);
    const InputState st = Coherent{{0.5, 0.0}, {0.3, 0.0}};
    for (int mode : {1, 2}) {
        const auto om = oracle_moments(os, mode);
        CHECK(om.mean == Approx(mean_photon(c, st, mode)).margin(1e-5));
        CHECK(om.variance == Approx(photon_variance(c, st, mode)).margin(1e-5));
    }
}

TEST_CASE("displaced-parity values") {
    // vacuum
    const auto vac = evolve_state(curve_a, InputState(Fock{0, 0}), 0.0, 20);
    CHECK(oracle_wigner(vac, Selection::single(1), complexd(0.0)) ==
          Approx(2.0 / M_PI).margin(1e-10));
    // one photon
    const auto one = evolve_state(curve_a, InputState(Fock{1, 0}), 0.0, 20);
    CHECK(oracle_wigner(one, Selection::single(1), complexd(0.0)) ==
          Approx(-2.0 / M_PI).margin(1e-10));
    // displacement matrix generates coherent amplitudes from the vacuum
    const complexd beta(0.7, -0.3);
    const auto d = detail::displacement_matrix(beta, 18);
    complexd amp = 1.0;
    for (int n = 0; n < 6; ++n) {
        CHECK(std::abs(d(n, 0) - amp * std::exp(-0.5 * std::norm(beta))) < 1e-12);
        amp *= beta / std::sqrt(double(n + 1));
    }
}

TEST_CASE("joint displaced parity matches the two-mode closed form") {
    const double t = 0.9;
    const auto os = evolve_state(curve_a, InputState(Fock{1, 1}), t, 30);
    const auto c = evolution_coefficients(curve_a, t);
    for (const auto& [a1, a2] :
         {std::pair{complexd(0.0), complexd(0.0)}, {complexd(0.4, 0.1), complexd(-0.2, 0.3)}}) {
        CHECK(oracle_wigner(os, Selection::both(), a1, a2) ==
              Approx(quasi_closed_form(c, Fock{1, 1}, Selection::both(), 0.0, a1, a2))
                  .margin(1e-6));
    }
}

TEST_CASE("amplifying regime refuses once the truncation cannot follow") {
    CHECK_THROWS_AS(evolve_state(amp_set, InputState(Fock{1, 0}), 6.0, 24), CutoffExceeded);
    // short amplification times remain within reach of the truncation
    const auto os = evolve_state(amp_set, InputState(Fock{1, 0}), 0.4, 40);
    CHECK(os.tail_mass < 1e-8);
    // hyperbolic growth leaves the gated window well before t = 1
    CHECK_THROWS_AS(evolve_state(amp_set, InputState(Fock{1, 0}), 1.0, 50), CutoffExceeded);
}

TEST_CASE("initial occupations beyond the cutoff are rejected") {
    CHECK_THROWS_AS(evolve_state(curve_a, InputState(Fock{30, 0}), 0.1, 20), CutoffExceeded);
    CHECK_THROWS_AS(evolve_state(curve_a, InputState(Coherent{{9.0, 0.0}, {0.0, 0.0}}), 0.1, 12),
                    CutoffExceeded);
    CHECK_THROWS_AS(evolve_state(curve_a, InputState(Thermal{40.0, 0.0}), 0.1, 16),
                    CutoffExceeded);
}
