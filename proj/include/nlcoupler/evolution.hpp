#ifndef NLCOUPLER_EVOLUTION_HPP
#define NLCOUPLER_EVOLUTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/params.hpp"

namespace nlcoupler {

/// Values of the six scalar basis functions F1, F2, G1, G2, C, S at one time.
///
/// C and S are evaluated in stabilized form: the printed product
/// sqrt(g1/g2) sin(2 theta) is carried as the single rational factor
/// 2 g1 / (obar2^2 - obar1^2), which stays finite as g2 -> 0 and needs no
/// square-root branch choice.
struct BasisFunctions {
    complexd f1, f2, g1fn, g2fn, cfn, sfn;
};

/// The eight input-output coefficients K_j, L_j, M_j, N_j at time t.
struct EvolutionCoefficients {
    double t = 0.0;
    complexd k1, l1, m1, n1;
    complexd k2, l2, m2, n2;
};

/// Normalized residuals of the three symplectic identities.
///
/// Each residual is |lhs - rhs| divided by max(1, sum of |term|); the
/// normalization keeps the check meaningful in the amplifying regime where
/// the coefficients grow like exp(|Im obar| t) and an absolute residual
/// would be dominated by floating-point cancellation.
struct SymplecticResidualReport {
    double commutator = 0.0;  // |K_j|^2 + |M_j|^2 - |L_j|^2 - |N_j|^2 = 1, worst j
    double cross_a = 0.0;     // K1 N2 + M1 L2 = N1 K2 + L1 M2
    double cross_b = 0.0;     // K1 M2* + M1 K2* = L1 N2* + N1 L2*

    double max() const { return std::max({commutator, cross_a, cross_b}); }
};

namespace detail {

// cos(t sqrt(x)); entire in x, so the branch of the square root cancels.
inline complexd cos_sqrt(const complexd& x, double t) {
    return std::cos(t * std::sqrt(x));
}

// sin(t sqrt(x)) / sqrt(x); entire in x, series-guarded near the origin.
inline complexd sinc_sqrt(const complexd& x, double t) {
    const complexd w = std::sqrt(x);
    const complexd tw = t * w;
    if (std::abs(tw) < 1e-4) {
        const complexd tw2 = tw * tw;
        return t * (1.0 - tw2 / 6.0 + tw2 * tw2 / 120.0);
    }
    return std::sin(tw) / w;
}

// d/dx cos(t sqrt(x)) = -(t/2) sinc_sqrt(x)
inline complexd dcos_sqrt(const complexd& x, double t) {
    return -0.5 * t * sinc_sqrt(x, t);
}

// d/dx sinc_sqrt(x) = (t cos(t sqrt(x)) - sinc_sqrt(x)) / (2x)
inline complexd dsinc_sqrt(const complexd& x, double t) {
    if (std::abs(x) * t * t < 1e-4) {
        const double t3 = t * t * t;
        return -t3 / 6.0 + t3 * t * t * x / 60.0;
    }
    return (t * cos_sqrt(x, t) - sinc_sqrt(x, t)) / (2.0 * x);
}

// cos/sinc values at the two dressed squared frequencies plus their
// Newton divided differences.  The divided-difference form stays finite
// when the pencil becomes degenerate (x1 -> x2).
struct TimeFunctions {
    complexd c1, c2, s1, s2;
    complexd cavg, savg;
    complexd dc, ds;
};

inline TimeFunctions time_functions(const complexd& x1, const complexd& x2, double t) {
    TimeFunctions tf;
    tf.c1 = cos_sqrt(x1, t);
    tf.c2 = cos_sqrt(x2, t);
    tf.s1 = sinc_sqrt(x1, t);
    tf.s2 = sinc_sqrt(x2, t);
    tf.cavg = 0.5 * (tf.c1 + tf.c2);
    tf.savg = 0.5 * (tf.s1 + tf.s2);
    const complexd r = x2 - x1;
    const double scale = std::max({1.0, std::abs(x1), std::abs(x2)});
    if (std::abs(r) >= 1e-6 * scale) {
        tf.dc = (tf.c2 - tf.c1) / r;
        tf.ds = (tf.s2 - tf.s1) / r;
    } else {
        const complexd xm = 0.5 * (x1 + x2);
        tf.dc = dcos_sqrt(xm, t);
        tf.ds = dsinc_sqrt(xm, t);
    }
    return tf;
}

// Scalar data of the quadratic pencil behind the solution.  pp = (g1+g2)/2
// and qq = (g1-g2)/2 are the symmetric/antisymmetric halves of the coupling
// products; split = obar2^2 - obar1^2.
struct SpectralPencil {
    double om1sq = 0.0, om2sq = 0.0;
    double d = 0.0;
    double g1 = 0.0, g2 = 0.0;
    double pp = 0.0, qq = 0.0;
    complexd split;
    complexd x1, x2;
};

inline SpectralPencil make_pencil(const CouplerParams& p) {
    const double lp = p.lambda3 + p.lambda4;
    const double lm = p.lambda3 - p.lambda4;
    const double kp = p.delta1() + 2.0 * p.lambda1;
    const double km = p.delta1() - 2.0 * p.lambda1;
    const double jp = p.delta2() + 2.0 * p.lambda2;
    const double jm = p.delta2() - 2.0 * p.lambda2;

    SpectralPencil pc;
    pc.g1 = km * lp + lm * jp;
    pc.g2 = kp * lm + lp * jm;
    pc.om1sq = lm * lp + km * kp;
    pc.om2sq = lm * lp + jm * jp;
    pc.d = jm * jp - km * kp;
    pc.pp = 0.5 * (pc.g1 + pc.g2);
    pc.qq = 0.5 * (pc.g1 - pc.g2);
    pc.split = std::sqrt(complexd(pc.d * pc.d + 4.0 * pc.g1 * pc.g2, 0.0));
    const double mean = 0.5 * (pc.om1sq + pc.om2sq);
    pc.x1 = mean - 0.5 * pc.split;
    pc.x2 = mean + 0.5 * pc.split;
    return pc;
}

struct ModeRow {
    complexd K, L, M, N;
};

// One mode's row of the transfer matrix in divided-difference form.  The
// second mode is obtained from the same expression with (delta, lambda)
// swapped and (d, qq) negated, which makes the 1 <-> 2 interchange symmetry
// exact in floating point.
inline ModeRow mode_row(double delta_own, double lambda_own, double lambda3,
                        double lambda4, double d_signed, double qs, double pp,
                        const TimeFunctions& tf) {
    const complexd I(0.0, 1.0);
    const complexd f_even = tf.cavg - 0.5 * d_signed * tf.dc;
    const complexd g_even = tf.savg - 0.5 * d_signed * tf.ds;
    const complexd g_odd = tf.savg + 0.5 * d_signed * tf.ds;

    ModeRow r;
    r.K = f_even - I * (delta_own * g_even + (lambda3 * pp - lambda4 * qs) * tf.ds);
    r.L = -I * (2.0 * lambda_own * g_even + (lambda4 * pp - lambda3 * qs) * tf.ds);
    r.M = pp * tf.dc - I * (lambda3 * g_odd + (delta_own * pp + 2.0 * lambda_own * qs) * tf.ds);
    r.N = qs * tf.dc - I * (lambda4 * g_odd + (delta_own * qs + 2.0 * lambda_own * pp) * tf.ds);
    return r;
}

} // namespace detail

/// F, G, C, S at time t from the spectral data.
BasisFunctions basis_functions(const SpectralData& sd, double t) {
    const complexd x1 = sd.omega_bar_1 * sd.omega_bar_1;
    const complexd x2 = sd.omega_bar_2 * sd.omega_bar_2;
    const double d = sd.splitting_numerator();
    const detail::TimeFunctions tf = detail::time_functions(x1, x2, t);

    BasisFunctions b;
    b.f1 = tf.cavg - 0.5 * d * tf.dc;
    b.f2 = tf.cavg + 0.5 * d * tf.dc;
    b.g1fn = tf.savg - 0.5 * d * tf.ds;
    b.g2fn = tf.savg + 0.5 * d * tf.ds;
    b.cfn = sd.g1 * tf.dc;
    b.sfn = sd.g1 * tf.ds;
    return b;
}

SymplecticResidualReport check_symplectic(const EvolutionCoefficients& c) {
    auto norm2 = [](const complexd& z) { return std::norm(z); };
    SymplecticResidualReport rep;
    for (int mode = 0; mode < 2; ++mode) {
        const complexd K = mode == 0 ? c.k1 : c.k2;
        const complexd L = mode == 0 ? c.l1 : c.l2;
        const complexd M = mode == 0 ? c.m1 : c.m2;
        const complexd N = mode == 0 ? c.n1 : c.n2;
        const double terms = norm2(K) + norm2(M) + norm2(L) + norm2(N) + 1.0;
        const double res =
            std::abs(norm2(K) + norm2(M) - norm2(L) - norm2(N) - 1.0) / std::max(1.0, terms);
        rep.commutator = std::max(rep.commutator, res);
    }
    {
        const complexd lhs1 = c.k1 * c.n2, lhs2 = c.m1 * c.l2;
        const complexd rhs1 = c.n1 * c.k2, rhs2 = c.l1 * c.m2;
        const double terms = std::abs(lhs1) + std::abs(lhs2) + std::abs(rhs1) + std::abs(rhs2);
        rep.cross_a = std::abs(lhs1 + lhs2 - rhs1 - rhs2) / std::max(1.0, terms);
    }
    {
        const complexd lhs1 = c.k1 * std::conj(c.m2), lhs2 = c.m1 * std::conj(c.k2);
        const complexd rhs1 = c.l1 * std::conj(c.n2), rhs2 = c.n1 * std::conj(c.l2);
        const double terms = std::abs(lhs1) + std::abs(lhs2) + std::abs(rhs1) + std::abs(rhs2);
        rep.cross_b = std::abs(lhs1 + lhs2 - rhs1 - rhs2) / std::max(1.0, terms);
    }
    return rep;
}

/// Exact input-output coefficients at time t.
///
/// Throws BranchAmbiguity when the assembled coefficients fail the
/// symplectic check; callers may then fall back to ode_coefficients.
EvolutionCoefficients evolution_coefficients(const CouplerParams& p, double t) {
    p.validate();
    if (!std::isfinite(t)) throw ConfigError("evolution_coefficients: t must be finite");

    const detail::SpectralPencil pc = detail::make_pencil(p);
    const detail::TimeFunctions tf = detail::time_functions(pc.x1, pc.x2, t);

    const detail::ModeRow r1 =
        detail::mode_row(p.delta1(), p.lambda1, p.lambda3, p.lambda4, pc.d, pc.qq, pc.pp, tf);
    const detail::ModeRow r2 =
        detail::mode_row(p.delta2(), p.lambda2, p.lambda3, p.lambda4, -pc.d, -pc.qq, pc.pp, tf);

    EvolutionCoefficients c;
    c.t = t;
    c.k1 = r1.K;
    c.l1 = r1.L;
    c.m1 = r1.M;
    c.n1 = r1.N;
    c.k2 = r2.K;
    c.l2 = r2.L;
    c.m2 = r2.M;
    c.n2 = r2.N;

    const double res = check_symplectic(c).max();
    if (res > 1e-9)
        throw BranchAmbiguity("evolution coefficients failed the symplectic check", res);
    return c;
}

/// Generator of d/dt (A, A+, B, B+) = -i G (A, A+, B, B+); real 4x4.
inline std::array<std::array<double, 4>, 4> heisenberg_generator(const CouplerParams& p) {
    const double d1 = p.delta1(), d2 = p.delta2();
    const double l1 = p.lambda1, l2 = p.lambda2, l3 = p.lambda3, l4 = p.lambda4;
    return {{{d1, 2.0 * l1, l3, l4},
             {-2.0 * l1, -d1, -l4, -l3},
             {l3, l4, d2, 2.0 * l2},
             {-l4, -l3, -2.0 * l2, -d2}}};
}

/// 4x4 transfer matrix on (a1, a1+, a2, a2+) built from the coefficients
/// and their conjugates.
inline std::array<std::array<complexd, 4>, 4> transfer_matrix(const EvolutionCoefficients& c) {
    return {{{c.k1, c.l1, c.m1, c.n1},
             {std::conj(c.l1), std::conj(c.k1), std::conj(c.n1), std::conj(c.m1)},
             {c.m2, c.n2, c.k2, c.l2},
             {std::conj(c.n2), std::conj(c.m2), std::conj(c.l2), std::conj(c.k2)}}};
}

} // namespace nlcoupler

#endif
