#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nlcoupler/fock_oracle.hpp"
#include "nlcoupler/gaussian.hpp"
#include "nlcoupler/photon_stats.hpp"

using namespace nlcoupler;
using Catch::Approx;

namespace {
const CouplerParams curve_a{0.25, 0.25, 1.0, 0.25};
const CouplerParams curve_c{0.17, 0.2, 1.0, 0.2};
const CouplerParams amp_set{0.17, 0.2, 1.0, 2.0};
const double half_pi = 1.5707963267948966;
} // namespace

TEST_CASE("kernels at t = 0") {
    const auto c = evolution_coefficients(curve_a, 0.0);
    const StatsKernels k = stats_kernels(c, 1);
    CHECK(k.v1 == 1.0);
    CHECK(k.v2 == 0.0);
    CHECK(k.v3 == 0.0);
    for (complexd z : {k.v4, k.v5, k.v6, k.v7}) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("kernel sum rule and definition checks") {
    const auto c = evolution_coefficients(curve_a, 1.0);
    for (int mode : {1, 2}) {
        const StatsKernels k = stats_kernels(c, mode);
        CHECK(std::abs(k.v1 + k.v2 - 1.0 - 2.0 * k.v3) < 1e-10);
    }
    const StatsKernels k = stats_kernels(c, 1);
    CHECK(std::abs(k.v4 - std::conj(c.k1) * c.l1) == 0.0);
    CHECK(std::abs(k.v5 - std::conj(c.m1) * c.n1) == 0.0);
}

TEST_CASE("initial photon numbers") {
    const auto c = evolution_coefficients(curve_a, 0.0);
    CHECK(mean_photon(c, Coherent{{20.0, 0.0}, {5.0, 0.0}}, 1) == Approx(400.0).margin(1e-12));
    CHECK(mean_photon(c, Coherent{{20.0, 0.0}, {5.0, 0.0}}, 2) == Approx(25.0).margin(1e-12));
    CHECK(photon_variance(c, Fock{3, 7}, 1) == 0.0);
    CHECK(photon_variance(c, Coherent{{2.0, -1.0}, {0.0, 0.0}}, 1) ==
          Approx(5.0).margin(1e-12));
}

TEST_CASE("amplifier regime grows both intensities monotonically") {
    const Coherent st{{20.0, 0.0}, {5.0, 0.0}};
    double prev1 = -1.0, prev2 = -1.0;
    for (int k = 0; k <= 60; ++k) {
        const auto c = evolution_coefficients(amp_set, 1.5 * k / 60);
        const double n1 = mean_photon(c, st, 1);
        const double n2 = mean_photon(c, st, 2);
        CHECK(n1 > prev1);
        CHECK(n2 > prev2);
        prev1 = n1;
        prev2 = n2;
    }
}

TEST_CASE("number-state moments against the truncated-basis route") {
    FockPropagator prop(curve_a, 40);
    const InputState st = Fock{1, 0};
    const auto c = evolution_coefficients(curve_a, half_pi);
    const auto os = evolve_state(prop, st, half_pi);
    const auto om = oracle_moments(os, 1);
    CHECK(mean_photon(c, st, 1) == Approx(om.mean).margin(1e-6));
    CHECK(photon_variance(c, st, 1) == Approx(om.variance).margin(1e-6));
}

TEST_CASE("large-occupation number state at short time") {
    // dimension 6561 exercises the matrix-free integration path
    const double t = 0.2;
    const auto c = evolution_coefficients(curve_a, t);
    const InputState st = Fock{5, 50};
    const auto os = evolve_state(curve_a, st, t, 80, /*strict=*/false);
    REQUIRE(os.tail_mass < 1e-6);
    const auto om = oracle_moments(os, 1);
    CHECK(photon_variance(c, st, 1) ==
          Approx(om.variance).epsilon(1e-4));
    CHECK(mean_photon(c, st, 1) == Approx(om.mean).epsilon(1e-4));
}

TEST_CASE("second-order correlation limits") {
    const auto c = evolution_coefficients(curve_a, 0.0);
    const PhotonStatistics ps = photon_statistics(c, Coherent{{1.4, 0.3}, {0.2, 0.0}}, 1);
    CHECK(ps.mean == Approx(std::norm(complexd(1.4, 0.3))).margin(1e-12));
    CHECK(ps.variance == Approx(ps.mean).margin(1e-12));
    CHECK(ps.g2 == Approx(1.0).margin(1e-12));
    CHECK(g2(c, Coherent{{1.4, 0.3}, {0.2, 0.0}}, 1) == Approx(1.0).margin(1e-12));
    CHECK(g2(c, Thermal{0.8, 0.1}, 1) == Approx(2.0).margin(1e-12));
    CHECK(g2(c, Fock{5, 11}, 1) == Approx(0.8).margin(1e-12));
    CHECK_THROWS_AS(g2(c, Coherent{}, 1), ZeroIntensity);
}

TEST_CASE("quadrature measures at t = 0") {
    const auto c = evolution_coefficients(curve_c, 0.0);
    const auto rc = squeezing(c, Coherent{{3.0, 1.0}, {0.5, 0.0}});
    for (double v : {rc.s1, rc.q1, rc.s2, rc.q2}) CHECK(v == Approx(0.0).margin(1e-14));
    const auto rt = squeezing(c, Thermal{0.5, 1.25});
    CHECK(rt.s1 == Approx(1.0).margin(1e-14));
    CHECK(rt.q1 == Approx(1.0).margin(1e-14));
    CHECK(rt.s2 == Approx(2.5).margin(1e-14));
}

TEST_CASE("coherent input develops squeezing for all three figure sets") {
    for (const CouplerParams& p : {curve_a, CouplerParams{0.2, 0.2, 1.0, 0.2}, curve_c}) {
        double mn = 1e9;
        for (int k = 0; k <= 400; ++k)
            mn = std::min(mn, squeezing(evolution_coefficients(p, 4.0 * k / 400), Coherent{}).s1);
        CHECK(mn < 0.0);
    }
}

TEST_CASE("number and thermal inputs share quadrature variances") {
    const auto c = evolution_coefficients(curve_a, 1.2);
    const auto rf = squeezing(c, Fock{2, 1});
    const auto rt = squeezing(c, Thermal{2.0, 1.0});
    CHECK(rf.s1 == Approx(rt.s1).margin(0));
    CHECK(rf.q2 == Approx(rt.q2).margin(0));
}

TEST_CASE("uncertainty product holds across random samples") {
    std::mt19937 rng(333);
    std::uniform_real_distribution<double> lam(0.0, 2.0), det(-1.0, 1.0), tt(0.0, 6.0),
        occ(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const CouplerParams p{lam(rng), lam(rng), lam(rng), lam(rng),
                              det(rng), det(rng), 0.0,      0.0};
        const auto c = evolution_coefficients(p, tt(rng));
        InputState st;
        switch (i % 3) {
            case 0: st = Coherent{{occ(rng), occ(rng)}, {occ(rng), 0.0}}; break;
            case 1: st = Fock{i % 4, (i / 3) % 5}; break;
            default: st = Thermal{occ(rng), occ(rng)};
        }
        const auto r = squeezing(c, st);
        CHECK((r.s1 + 1.0) * (r.q1 + 1.0) >= 1.0 - 1e-9);
        CHECK((r.s2 + 1.0) * (r.q2 + 1.0) >= 1.0 - 1e-9);
        CHECK(r.s1 >= -1.0);
        CHECK(r.q2 >= -1.0);
    }
}

TEST_CASE("squeezing measures agree with the covariance route") {
    for (double t : {0.4, 1.3, 2.9}) {
        const auto c = evolution_coefficients(curve_c, t);
        for (const InputState& st :
             {InputState(Coherent{{0.7, 0.1}, {0.0, 0.4}}), InputState(Thermal{0.6, 1.1})}) {
            const auto r = squeezing(c, st);
            const auto g1 = gaussian_form(c, st, Selection::single(1), 0.0);
            const auto g2m = gaussian_form(c, st, Selection::single(2), 0.0);
            // (1,1) entry of the Weyl quadratic form is 4 Var(X), (0,0) is 4 Var(Y)
            CHECK(r.s1 == Approx(g1.M(1, 1) - 1.0).margin(1e-9));
            CHECK(r.q1 == Approx(g1.M(0, 0) - 1.0).margin(1e-9));
            CHECK(r.s2 == Approx(g2m.M(1, 1) - 1.0).margin(1e-9));
        }
    }
}

TEST_CASE("mode interchange maps the statistics exactly") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> lam(0.0, 1.5), det(-1.0, 1.0), tt(0.0, 5.0);
    for (int i = 0; i < 40; ++i) {
        const CouplerParams p{lam(rng), lam(rng), lam(rng), lam(rng),
                              det(rng), det(rng), 0.0,      0.0};
        CouplerParams ps = p;
        std::swap(ps.lambda1, ps.lambda2);
        std::swap(ps.omega1, ps.omega2);
        const double t = tt(rng);
        const auto c = evolution_coefficients(p, t);
        const auto cs = evolution_coefficients(ps, t);
        const InputState st = Coherent{{0.8, -0.3}, {0.2, 0.5}};
        const InputState sts = swap_modes(st);
        CHECK(mean_photon(c, st, 1) == mean_photon(cs, sts, 2));
        CHECK(mean_photon(c, st, 2) == mean_photon(cs, sts, 1));
        CHECK(photon_variance(c, st, 1) == photon_variance(cs, sts, 2));
        const InputState f = Fock{3, 1};
        CHECK(photon_variance(c, f, 1) == photon_variance(cs, swap_modes(f), 2));
        const InputState th = Thermal{0.4, 1.7};
        CHECK(squeezing(c, th).s1 == squeezing(cs, swap_modes(th)).s2);
    }
}

TEST_CASE("coherent and thermal moments against the truncated-basis route") {
    FockPropagator prop(curve_a, 45);
    const double t = 1.0;
    const auto c = evolution_coefficients(curve_a, t);
    for (const InputState& st :
         {InputState(Coherent{{0.5, 0.0}, {0.0, 0.3}}), InputState(Thermal{0.5, 0.5})}) {
        const auto os = evolve_state(prop, st, t);
        for (int mode : {1, 2}) {
            const auto om = oracle_moments(os, mode);
            CHECK(mean_photon(c, st, mode) == Approx(om.mean).margin(2e-5));
            CHECK(photon_variance(c, st, mode) == Approx(om.variance).margin(2e-5));
            CHECK(g2(c, st, mode) == Approx(om.g2).margin(2e-5));
        }
        const auto sq = squeezing(c, st);
        const auto o1 = oracle_moments(os, 1);
        CHECK(sq.s1 == Approx(o1.squeeze_s).margin(2e-5));
        CHECK(sq.q1 == Approx(o1.squeeze_q).margin(2e-5));
    }
}
