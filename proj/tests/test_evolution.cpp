#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nlcoupler/evolution.hpp"
#include "nlcoupler/fock_oracle.hpp"

using namespace nlcoupler;
using Catch::Approx;

namespace {

const CouplerParams curve_a{0.25, 0.25, 1.0, 0.25};
const double half_pi = 1.5707963267948966;

double coeff_dist(const EvolutionCoefficients& a, const EvolutionCoefficients& b) {
    double m = 0.0;
    for (auto [x, y] : {std::pair{a.k1, b.k1}, {a.l1, b.l1}, {a.m1, b.m1}, {a.n1, b.n1},
                        {a.k2, b.k2}, {a.l2, b.l2}, {a.m2, b.m2}, {a.n2, b.n2}})
        m = std::max(m, std::abs(x - y));
    return m;
}

// Assembly of the coefficients from the basis functions, with the
// stabilized C, S products.  The second-mode expressions place the g2/g1
// ratio on the lambda- half throughout (K2's S-term included, matching the
// L2/M2/N2 pattern and the integrated system).
EvolutionCoefficients assemble_from_basis(const CouplerParams& p, double t) {
    const SpectralData sd = derive_spectral(p);
    const BasisFunctions b = basis_functions(sd, t);
    const complexd I(0.0, 1.0);
    const double r = sd.g2 / sd.g1;
    const double kp = sd.k_plus, km = sd.k_minus, jp = sd.j_plus, jm = sd.j_minus;
    const double lp = sd.lambda_plus, lm = sd.lambda_minus;

    EvolutionCoefficients c;
    c.t = t;
    c.k1 = b.f1 - 0.5 * I * ((kp + km) * b.g1fn + (lp * r + lm) * b.sfn);
    c.l1 = -0.5 * I * ((kp - km) * b.g1fn + (lp * r - lm) * b.sfn);
    c.m1 = 0.5 * ((1.0 + r) * b.cfn - I * ((lp + lm) * b.g1fn + (jp * r + jm) * b.sfn));
    c.n1 = 0.5 * ((1.0 - r) * b.cfn - I * ((lp - lm) * b.g1fn + (jp * r - jm) * b.sfn));
    c.k2 = b.f2 - 0.5 * I * ((jp + jm) * b.g2fn + (lp + lm * r) * b.sfn);
    c.l2 = -0.5 * I * ((jp - jm) * b.g2fn + (lp - lm * r) * b.sfn);
    c.m2 = 0.5 * ((1.0 + r) * b.cfn - I * ((lp + lm) * b.g2fn + (kp + km * r) * b.sfn));
    c.n2 = 0.5 * ((r - 1.0) * b.cfn - I * ((lp - lm) * b.g2fn + (kp - km * r) * b.sfn));
    return c;
}

} // namespace

TEST_CASE("identity coefficients at t = 0") {
    const auto c = evolution_coefficients(curve_a, 0.0);
    CHECK(c.k1 == complexd(1.0, 0.0));
    CHECK(c.k2 == complexd(1.0, 0.0));
    for (complexd z : {c.l1, c.m1, c.n1, c.l2, c.m2, c.n2}) CHECK(std::abs(z) == 0.0);
    const auto rep = check_symplectic(c);
    CHECK(rep.commutator == 0.0);
    CHECK(rep.cross_a == 0.0);
    CHECK(rep.cross_b == 0.0);
}

TEST_CASE("basis functions at t = 0 and the sinc limit") {
    const SpectralData sd = derive_spectral(curve_a);
    const BasisFunctions b0 = basis_functions(sd, 0.0);
    CHECK(b0.f1 == complexd(1.0, 0.0));
    CHECK(b0.f2 == complexd(1.0, 0.0));
    for (complexd z : {b0.g1fn, b0.g2fn, b0.cfn, b0.sfn}) CHECK(std::abs(z) == 0.0);

    // constructed so that obar1 = 0 exactly with unit weight on that branch:
    // G1(t) then equals t * cos^2(theta) = t
    const CouplerParams degen{0.5, 0.25, 1.0, 0.0, 0.0, 0.5};
    const SpectralData sdd = derive_spectral(degen);
    CHECK(std::abs(sdd.omega_bar_1) == 0.0);
    const BasisFunctions bd = basis_functions(sdd, 2.0);
    CHECK(bd.g1fn.real() == Approx(2.0).margin(1e-12));
    CHECK(bd.g1fn.imag() == Approx(0.0).margin(1e-14));
}

TEST_CASE("first-order expansion at small t") {
    const auto c = evolution_coefficients(curve_a, 0.01);
    CHECK(std::abs(c.l1 - complexd(0.0, -0.005)) < 1e-4);
    CHECK(std::abs(c.m1 - complexd(0.0, -0.01)) < 1e-4);
    CHECK(std::abs(c.n1 - complexd(0.0, -0.0025)) < 1e-4);
}

TEST_CASE("coefficients assembled from the basis functions match") {
    for (const CouplerParams& p :
         {curve_a, CouplerParams{0.3, 0.7, 0.9, 1.3, 0.4, -0.2, 0.6, 0.8}}) {
        for (double t : {0.3, 1.0, 2.7}) {
            CHECK(coeff_dist(assemble_from_basis(p, t), evolution_coefficients(p, t)) < 1e-12);
        }
    }
}

TEST_CASE("closed form matches the integrated Heisenberg system") {
    CHECK(coeff_dist(evolution_coefficients(curve_a, half_pi),
                     ode_coefficients(curve_a, half_pi)) < 1e-8);
}

TEST_CASE("symplectic identities over random parameters") {
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> lam(0.0, 2.0), det(-1.0, 1.0), tt(0.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const CouplerParams p{lam(rng), lam(rng), lam(rng), lam(rng),
                              det(rng), det(rng), 0.0,      0.0};
        for (int k = 0; k < 5; ++k)
            worst = std::max(worst, check_symplectic(evolution_coefficients(p, tt(rng))).max());
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("curve-A residuals stay tiny at t = 2") {
    const auto rep = check_symplectic(evolution_coefficients(curve_a, 2.0));
    CHECK(rep.max() < 1e-10);
}

TEST_CASE("transfer matrix preserves the commutation metric") {
    const CouplerParams p{0.4, 0.9, 1.1, 0.7, 0.3, -0.5, 0.0, 0.0};
    const auto tm = transfer_matrix(evolution_coefficients(p, 1.9));
    const double eta[4] = {1.0, -1.0, 1.0, -1.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            complexd acc = 0.0;
            double scale = 1.0;
            for (int k = 0; k < 4; ++k) {
                acc += tm[i][k] * eta[k] * std::conj(tm[j][k]);
                scale += std::abs(tm[i][k] * tm[j][k]);
            }
            const complexd want = i == j ? complexd(eta[i]) : complexd(0.0);
            CHECK(std::abs(acc - want) / scale < 1e-9);
        }
}

TEST_CASE("a corrupted coefficient is flagged") {
    auto c = evolution_coefficients(curve_a, 1.3);
    c.k1 += 0.1;
    CHECK(check_symplectic(c).max() > 1e-3);
}

TEST_CASE("coefficients satisfy the differential system (finite differences)") {
    const CouplerParams p{0.3, 0.7, 0.9, 1.3, 0.4, -0.2, 0.6, 0.8};
    const auto g = heisenberg_generator(p);
    const double t = 1.1, h = 1e-6;
    const auto cp = evolution_coefficients(p, t + h);
    const auto cm = evolution_coefficients(p, t - h);
    const auto c0 = evolution_coefficients(p, t);
    const auto tp = transfer_matrix(cp), tm = transfer_matrix(cm), t0 = transfer_matrix(c0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const complexd deriv = (tp[i][j] - tm[i][j]) / (2.0 * h);
            complexd rhs = 0.0;
            for (int k = 0; k < 4; ++k) rhs += g[i][k] * t0[k][j];
            rhs *= complexd(0.0, -1.0);
            CHECK(std::abs(deriv - rhs) < 1e-5);
        }
}

TEST_CASE("interchanging the modes maps the coefficient rows exactly") {
    const CouplerParams p{0.31, 0.17, 0.9, 0.45, 0.2, -0.4, 0.3, 0.1};
    CouplerParams ps = p;
    std::swap(ps.lambda1, ps.lambda2);
    std::swap(ps.omega1, ps.omega2);
    std::swap(ps.mu1, ps.mu2);
    const auto c = evolution_coefficients(p, 1.37);
    const auto cs = evolution_coefficients(ps, 1.37);
    CHECK(c.k1 == cs.k2);
    CHECK(c.l1 == cs.l2);
    CHECK(c.m1 == cs.m2);
    CHECK(c.n1 == cs.n2);
    CHECK(c.k2 == cs.k1);
}
