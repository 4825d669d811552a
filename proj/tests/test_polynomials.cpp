#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nlcoupler/polynomials.hpp"

using namespace nlcoupler;
using Catch::Approx;

TEST_CASE("degree zero") {
    CHECK(laguerre(0, 2.7) == 1.0);
    CHECK(hermite(0, complexd(1.0, -2.0)) == complexd(1.0));
    CHECK(jacobi(0, 3.0, 1.0, 0.4) == 1.0);
}

TEST_CASE("low-degree closed forms") {
    CHECK(laguerre(1, 0.7) == Approx(0.3).margin(1e-15));
    CHECK(laguerre(2, 0.5) == Approx(1.0 - 2 * 0.5 + 0.25 / 2).margin(1e-14));
    const complexd z(0.4, 1.1);
    CHECK(std::abs(hermite(2, z) - (4.0 * z * z - 2.0)) < 1e-13);
    CHECK(std::abs(hermite(3, z) - (8.0 * z * z * z - 12.0 * z)) < 1e-13);
    CHECK(laguerre_assoc(1, 2, 0.3) == Approx(3.0 - 0.3).margin(1e-14));
}

TEST_CASE("Wigner zero crossing of the one-photon state sits at |alpha|^2 = 1/4") {
    CHECK(laguerre(1, 4.0 * 0.25) == Approx(0.0).margin(1e-15));
    CHECK(laguerre(1, 4.0 * 0.2) > 0.0);
    CHECK(laguerre(1, 4.0 * 0.3) < 0.0);
}

TEST_CASE("Jacobi at x = 1 collapses to a binomial") {
    for (int r = 0; r <= 6; ++r)
        for (int c = 0; c <= 3; ++c)
            for (int d = 0; d <= 3; ++d)
                CHECK(jacobi(r, c, d, 1.0) == Approx(binomial(r + c, r)).margin(1e-10));
}

TEST_CASE("Jacobi sum agrees with the three-term recurrence") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> ab(-0.9, 3.0), xs(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const double a = ab(rng), b = ab(rng), x = xs(rng);
        double pm1 = 1.0;
        double p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
        CHECK(jacobi(1, a, b, x) == Approx(p).margin(1e-12));
        for (int n = 1; n < 6; ++n) {
            const double c1 = 2.0 * (n + 1) * (n + a + b + 1) * (2 * n + a + b);
            const double c2 = (2 * n + a + b + 1) * (a * a - b * b);
            const double c3 =
                (2 * n + a + b) * (2 * n + a + b + 1) * (2 * n + a + b + 2);
            const double c4 = 2.0 * (n + a) * (n + b) * (2 * n + a + b + 2);
            const double pn = ((c2 + c3 * x) * p - c4 * pm1) / c1;
            pm1 = p;
            p = pn;
            CHECK(jacobi(n + 1, a, b, x) == Approx(p).margin(1e-9 * std::max(1.0, std::abs(p))));
        }
    }
}

TEST_CASE("Laguerre coefficient expansion reproduces the recurrence") {
    for (int n : {1, 2, 3, 5}) {
        const auto c = laguerre_coefficients(n);
        for (double x : {0.0, 0.3, 1.7, 4.2}) {
            double acc = 0.0, xk = 1.0;
            for (int k = 0; k <= n; ++k) {
                acc += c[k] * xk;
                xk *= x;
            }
            CHECK(acc == Approx(laguerre(n, x)).margin(1e-12));
        }
    }
}

TEST_CASE("associated Laguerre matches the plain one at a = 0") {
    for (int n : {0, 1, 4})
        for (double x : {0.1, 2.0}) CHECK(laguerre_assoc(n, 0, x) == Approx(laguerre(n, x)));
}

TEST_CASE("negative degrees are rejected") {
    CHECK_THROWS_AS(laguerre(-1, 0.0), ConfigError);
    CHECK_THROWS_AS(hermite(-2, complexd(0.0)), ConfigError);
    CHECK_THROWS_AS(jacobi(-1, 0.0, 0.0, 0.0), ConfigError);
}
