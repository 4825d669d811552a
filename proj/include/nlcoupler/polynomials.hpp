#ifndef NLCOUPLER_POLYNOMIALS_HPP
#define NLCOUPLER_POLYNOMIALS_HPP

#include <complex>
#include <vector>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/params.hpp"

namespace nlcoupler {

// binom(a, k) for real a and integer k >= 0.
inline double binomial(double a, int k) {
    if (k < 0) throw ConfigError("binomial: k must be >= 0");
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= (a - k + i) / i;
    return r;
}

// Laguerre L_n(x).
inline double laguerre(int n, double x) {
    if (n < 0) throw ConfigError("laguerre: degree must be >= 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0, l = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

// Associated Laguerre L_n^{(a)}(x).
inline double laguerre_assoc(int n, int a, double x) {
    if (n < 0) throw ConfigError("laguerre_assoc: degree must be >= 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0, l = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

// Hermite H_m(z) with complex argument.
inline complexd hermite(int m, const complexd& z) {
    if (m < 0) throw ConfigError("hermite: degree must be >= 0");
    if (m == 0) return 1.0;
    complexd hm1 = 1.0, h = 2.0 * z;
    for (int k = 1; k < m; ++k) {
        const complexd hp1 = 2.0 * z * h - 2.0 * static_cast<double>(k) * hm1;
        hm1 = h;
        h = hp1;
    }
    return h;
}

// Jacobi P_r^{(c,d)}(x) by its finite sum
//   sum_k (-1)^(r-k) binom(r+d, r-k) binom(r+k+c+d, k) ((x+1)/2)^k.
inline double jacobi(int r, double c, double d, double x) {
    if (r < 0) throw ConfigError("jacobi: degree must be >= 0");
    const double y = 0.5 * (x + 1.0);
    double sum = 0.0;
    double yk = 1.0;
    for (int k = 0; k <= r; ++k) {
        const double sign = ((r - k) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(r + d, r - k) * binomial(r + k + c + d, k) * yk;
        yk *= y;
    }
    return sum;
}

// Coefficients of L_n as a polynomial: L_n(x) = sum_k c_k x^k,
// c_k = (-1)^k binom(n, k) / k!.
inline std::vector<double> laguerre_coefficients(int n) {
    std::vector<double> c(n + 1);
    double fact = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        c[k] = ((k % 2 == 0) ? 1.0 : -1.0) * binomial(n, k) / fact;
    }
    return c;
}

} // namespace nlcoupler

#endif
