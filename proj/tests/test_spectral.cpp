#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nlcoupler/evolution.hpp"
#include "nlcoupler/params.hpp"

using namespace nlcoupler;
using Catch::Approx;

namespace {
const CouplerParams curve_a{0.25, 0.25, 1.0, 0.25};
const CouplerParams curve_c{0.17, 0.2, 1.0, 0.2};
const CouplerParams amp_set{0.17, 0.2, 1.0, 2.0};
} // namespace

TEST_CASE("detunings are recomputed from omega and mu") {
    CouplerParams p;
    p.omega1 = 0.3;
    p.mu1 = 0.4;
    p.omega2 = -1.0;
    p.mu2 = 0.2;
    CHECK(p.delta1() == Approx(0.5).margin(0));
    CHECK(p.delta2() == Approx(-0.9).margin(0));
    p.lambda1 = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("spectral data for the symmetric figure set") {
    const SpectralData s = derive_spectral(curve_a);
    CHECK(s.g1 == Approx(-0.25).margin(1e-15));
    CHECK(s.g2 == Approx(-0.25).margin(1e-15));
    CHECK(s.theta.real() == Approx(M_PI / 4).margin(1e-15));
    CHECK(s.theta.imag() == 0.0);
    const complexd sq1 = s.omega_bar_1 * s.omega_bar_1;
    const complexd sq2 = s.omega_bar_2 * s.omega_bar_2;
    CHECK(sq1.real() == Approx(0.4375).margin(1e-14));
    CHECK(sq2.real() == Approx(0.9375).margin(1e-14));
    CHECK(classify_regime(s).tag == RegimeTag::Oscillatory);
}

TEST_CASE("spectral data for the asymmetric oscillatory set") {
    const SpectralData s = derive_spectral(curve_c);
    CHECK(s.g1 == Approx(-0.088).margin(1e-15));
    CHECK(s.g2 == Approx(-0.208).margin(1e-15));
    CHECK((s.omega_bar_1 * s.omega_bar_1).real() > 0.0);
    CHECK((s.omega_bar_2 * s.omega_bar_2).real() > 0.0);
    CHECK(classify_regime(s).tag == RegimeTag::Oscillatory);
}

TEST_CASE("strong nonlinear exchange flips to the amplifying regime") {
    const SpectralData s = derive_spectral(amp_set);
    CHECK(s.omega1_sq == Approx(-3.1156).margin(1e-12));
    CHECK(classify_regime(s).tag == RegimeTag::Amplifying);
}

TEST_CASE("free evolution is oscillatory with zero frequencies") {
    const SpectralData s = derive_spectral(CouplerParams{});
    CHECK(std::abs(s.omega_bar_1) == 0.0);
    CHECK(std::abs(s.omega_bar_2) == 0.0);
    CHECK(classify_regime(s).tag == RegimeTag::Oscillatory);
}

TEST_CASE("trace identity and generator eigenvalues, random parameters") {
    std::mt19937 rng(7041);
    std::uniform_real_distribution<double> lam(0.0, 2.0), det(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const CouplerParams p{lam(rng), lam(rng), lam(rng), lam(rng),
                              det(rng), det(rng), 0.0,      0.0};
        const SpectralData s = derive_spectral(p);
        const complexd sum =
            s.omega_bar_1 * s.omega_bar_1 + s.omega_bar_2 * s.omega_bar_2;
        const double trace = s.omega1_sq + s.omega2_sq;
        CHECK(std::abs(sum - trace) <= 1e-12 * std::max(1.0, std::abs(trace)));
    }
}

TEST_CASE("dressed squared frequencies are the eigenvalues of G^2") {
    for (const CouplerParams& p : {curve_a, curve_c, amp_set,
                                   CouplerParams{0.3, 0.7, 0.9, 1.3, 0.4, -0.2, 0.6, 0.8}}) {
        const SpectralData s = derive_spectral(p);
        const auto g = heisenberg_generator(p);
        Eigen::Matrix4d gm;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) gm(i, j) = g[i][j];
        const Eigen::Matrix4d g2 = gm * gm;
        Eigen::EigenSolver<Eigen::Matrix4d> es(g2);
        std::vector<complexd> eig(4), expect{s.omega_bar_1 * s.omega_bar_1,
                                             s.omega_bar_1 * s.omega_bar_1,
                                             s.omega_bar_2 * s.omega_bar_2,
                                             s.omega_bar_2 * s.omega_bar_2};
        for (int i = 0; i < 4; ++i) eig[i] = es.eigenvalues()(i);
        auto key = [](const complexd& z) {
            return std::make_pair(std::round(z.real() * 1e9), std::round(z.imag() * 1e9));
        };
        std::sort(eig.begin(), eig.end(),
                  [&](const complexd& a, const complexd& b) { return key(a) < key(b); });
        std::sort(expect.begin(), expect.end(),
                  [&](const complexd& a, const complexd& b) { return key(a) < key(b); });
        for (int i = 0; i < 4; ++i) CHECK(std::abs(eig[i] - expect[i]) < 1e-9);
    }
}
