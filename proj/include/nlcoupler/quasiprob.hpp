#ifndef NLCOUPLER_QUASIPROB_HPP
#define NLCOUPLER_QUASIPROB_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nlcoupler/char_fn.hpp"
#include "nlcoupler/errors.hpp"
#include "nlcoupler/gaussian.hpp"
#include "nlcoupler/polynomials.hpp"

namespace nlcoupler {

/// Ordering parameter of the s-parametrized family: 1 -> P, 0 -> W, -1 -> Q.
struct OrderingParameter {
    double s = 0.0;

    OrderingParameter(double value = 0.0) : s(value) {
        if (!(s >= -1.0 && s <= 1.0))
            throw ConfigError("ordering parameter s must lie in [-1, 1]");
    }
    operator double() const { return s; }
};

/// Uniform rectangular sampling of one phase-space plane.
struct PhaseRect {
    double re_min = -3.0, re_max = 3.0;
    double im_min = -3.0, im_max = 3.0;
    int n_re = 41, n_im = 41;

    void validate() const {
        if (!(re_max > re_min) || !(im_max > im_min) || n_re < 2 || n_im < 2 ||
            !std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
            !std::isfinite(im_max))
            throw ConfigError("PhaseRect: bounds must be finite and counts >= 2");
    }
    double dre() const { return (re_max - re_min) / (n_re - 1); }
    double dim() const { return (im_max - im_min) / (n_im - 1); }
    complexd point(int i, int j) const { return {re_min + i * dre(), im_min + j * dim()}; }
    int count() const { return n_re * n_im; }
};

struct PhaseSpaceGrid {
    PhaseRect mode_a;
    std::optional<PhaseRect> mode_b;  // present for two-mode fields

    void validate() const {
        mode_a.validate();
        if (mode_b) mode_b->validate();
    }
};

enum class EvalMethod { ClosedForm, Transform };

struct FieldMeta {
    std::string state;
    Selection sel;
    double s = 0.0;
    double t = 0.0;
    EvalMethod method = EvalMethod::ClosedForm;
    double norm_check = 0.0;   // Riemann sum over the grid
    double norm_tol = 1e-3;
    double conv_error = 0.0;   // last grid-doubling change (Transform only)
    double min_value = 0.0;
    double max_value = 0.0;
};

/// Sampled quasiprobability (real) or characteristic function (complex)
/// on a phase-space grid.  Single-mode layout: index i*n_im + j; two-mode:
/// the mode-a index is the slow one.
struct QuasiField {
    PhaseSpaceGrid grid;
    std::vector<double> values;
    std::vector<complexd> cvalues;  // used by characteristic-function fields
    FieldMeta meta;

    bool is_complex() const { return !cvalues.empty(); }
    double at(int i, int j) const { return values[i * grid.mode_a.n_im + j]; }
};

/// Diagonalized-Gaussian quantities of the single-mode Fock quasiprobability.
struct FockSingleKernel {
    double tau_sq = 0.0;     // |K|^2 + |L|^2 + |M|^2 + |N|^2
    complexd psi;            // K L + N M, phase epsilon
    double epsilon = 0.0;
    complexd eta_plus, eta_minus;
    complexd zeta_plus, zeta_minus;
    complexd x_arg, y_arg;   // Hermite arguments at the evaluation point
    complexd z;              // z^2 = [1-2(|eta+|^2+|eta-|^2)][1-2(|zeta+|^2+|zeta-|^2)]
    int r = 0;               // Jacobi-degree bound min(n, m)
};

FockSingleKernel fock_single_kernel(const EvolutionCoefficients& c, int mode, const Fock& st,
                                    double s, const complexd& alpha) {
    const auto m = detail::mode_klmn(c, mode);
    FockSingleKernel k;
    k.tau_sq = std::norm(m.K) + std::norm(m.L) + std::norm(m.M) + std::norm(m.N);
    k.psi = m.K * m.L + m.N * m.M;
    k.epsilon = std::arg(k.psi);
    const double ap = std::abs(k.psi);
    const complexd dp = std::sqrt(complexd(2.0 * (k.tau_sq - s + 2.0 * ap)));
    const complexd dm = std::sqrt(complexd(2.0 * (k.tau_sq - s - 2.0 * ap)));
    const complexd ph = std::exp(complexd(0.0, 0.5 * k.epsilon));
    k.eta_plus = (std::conj(m.K) * ph + m.L / ph) / dp;
    k.eta_minus = (std::conj(m.K) * ph - m.L / ph) / dm;
    k.zeta_plus = (std::conj(m.M) * ph + m.N / ph) / dp;
    k.zeta_minus = (std::conj(m.M) * ph - m.N / ph) / dm;
    const complexd a_plus = alpha / ph + std::conj(alpha) * ph;
    const complexd a_minus = alpha / ph - std::conj(alpha) * ph;
    k.x_arg = k.eta_plus * a_plus / dp + k.eta_minus * a_minus / dm;
    k.y_arg = k.zeta_plus * a_plus / dp + k.zeta_minus * a_minus / dm;
    const complexd zsq =
        (1.0 - 2.0 * (std::norm(k.eta_plus) + std::norm(k.eta_minus))) *
        (1.0 - 2.0 * (std::norm(k.zeta_plus) + std::norm(k.zeta_minus)));
    k.z = std::sqrt(zsq);
    k.r = std::min(st.n, st.m);
    return k;
}

namespace detail {

// Dense polynomial in two real variables; c[a*(dv+1)+b] multiplies u^a v^b.
struct Poly2 {
    int du = 0, dv = 0;
    std::vector<double> c;

    Poly2(int du_, int dv_) : du(du_), dv(dv_), c((du_ + 1) * (dv_ + 1), 0.0) {}
    double& at(int a, int b) { return c[a * (dv + 1) + b]; }
    double get(int a, int b) const { return c[a * (dv + 1) + b]; }
};

inline Poly2 poly_mul(const Poly2& p, const Poly2& q) {
    Poly2 r(p.du + q.du, p.dv + q.dv);
    for (int a = 0; a <= p.du; ++a)
        for (int b = 0; b <= p.dv; ++b) {
            const double pc = p.get(a, b);
            if (pc == 0.0) continue;
            for (int a2 = 0; a2 <= q.du; ++a2)
                for (int b2 = 0; b2 <= q.dv; ++b2)
                    r.at(a + a2, b + b2) += pc * q.get(a2, b2);
        }
    return r;
}

// L_n(quadratic form) as a Poly2; quad is the 2x2 block mapping zeta-reals
// to one eta, so the form is |eta|^2 = (B00 u + B01 v)^2 + (B10 u + B11 v)^2.
inline Poly2 laguerre_of_quadratic(int n, const Eigen::Matrix2d& B) {
    Poly2 q(2, 2);
    q.at(2, 0) = B(0, 0) * B(0, 0) + B(1, 0) * B(1, 0);
    q.at(0, 2) = B(0, 1) * B(0, 1) + B(1, 1) * B(1, 1);
    q.at(1, 1) = 2.0 * (B(0, 0) * B(0, 1) + B(1, 0) * B(1, 1));

    const std::vector<double> lc = laguerre_coefficients(n);
    Poly2 acc(0, 0);
    acc.at(0, 0) = lc[0];
    Poly2 qpow(0, 0);
    qpow.at(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
        qpow = poly_mul(qpow, q);
        Poly2 wider(qpow.du, qpow.dv);
        for (int a = 0; a <= acc.du; ++a)
            for (int b = 0; b <= acc.dv; ++b) wider.at(a, b) += acc.get(a, b);
        for (int a = 0; a <= qpow.du; ++a)
            for (int b = 0; b <= qpow.dv; ++b) wider.at(a, b) += lc[k] * qpow.get(a, b);
        acc = wider;
    }
    return acc;
}

// Table of E[(c_u + X)^a (c_v + Y)^b] for centered Gaussian (X, Y) with
// covariance Sigma and complex shift (c_u, c_v), via Stein's recurrence.
inline std::vector<std::vector<complexd>> gaussian_moments(const Eigen::Matrix2d& Sigma,
                                                           const complexd& cu,
                                                           const complexd& cv, int amax,
                                                           int bmax) {
    std::vector<std::vector<complexd>> mom(amax + 1, std::vector<complexd>(bmax + 1, 0.0));
    mom[0][0] = 1.0;
    for (int b = 1; b <= bmax; ++b) {
        mom[0][b] = cv * mom[0][b - 1];
        if (b >= 2) mom[0][b] += (b - 1.0) * Sigma(1, 1) * mom[0][b - 2];
    }
    for (int a = 1; a <= amax; ++a)
        for (int b = 0; b <= bmax; ++b) {
            mom[a][b] = cu * mom[a - 1][b];
            if (a >= 2) mom[a][b] += (a - 1.0) * Sigma(0, 0) * mom[a - 2][b];
            if (b >= 1) mom[a][b] += b * Sigma(0, 1) * mom[a - 1][b - 1];
        }
    return mom;
}

// Exact transform of the single-mode Fock characteristic function:
// polynomial x Gaussian integrated by Gaussian moment algebra.
inline double fock_single_value(const EvolutionCoefficients& c, int mode, const Fock& st,
                                double s, const complexd& alpha) {
    const Selection sel = Selection::single(mode);
    const Eigen::MatrixXd lam = eta_map(c, sel);
    const Eigen::Matrix2d M =
        (lam.transpose() * lam - s * Eigen::Matrix2d::Identity()).eval();
    Eigen::LLT<Eigen::Matrix2d> llt(M);
    if (llt.info() != Eigen::Success)
        throw PNotRepresentable(
            "single-mode Fock quasiprobability is not an ordinary function at this ordering");
    const Eigen::Matrix2d Sigma = M.inverse();
    const double detM = M.determinant();

    const Eigen::Vector2d w(2.0 * alpha.imag(), -2.0 * alpha.real());
    const Eigen::Vector2d sw = Sigma * w;
    const complexd cu(0.0, sw(0)), cv(0.0, sw(1));

    const Poly2 pn = laguerre_of_quadratic(st.n, lam.block<2, 2>(0, 0));
    const Poly2 pm = laguerre_of_quadratic(st.m, lam.block<2, 2>(2, 0));
    const Poly2 poly = poly_mul(pn, pm);

    const auto mom = gaussian_moments(Sigma, cu, cv, poly.du, poly.dv);
    complexd acc = 0.0;
    for (int a = 0; a <= poly.du; ++a)
        for (int b = 0; b <= poly.dv; ++b) {
            const double pc = poly.get(a, b);
            if (pc != 0.0) acc += pc * mom[a][b];
        }
    const double g0 = (2.0 * M_PI / std::sqrt(detM)) * std::exp(-0.5 * w.dot(sw));
    return g0 * acc.real() / (M_PI * M_PI);
}

} // namespace detail

/// Closed-form s-parametrized quasiprobability at one phase-space point.
double quasi_closed_form(const EvolutionCoefficients& c, const InputState& state,
                         const Selection& sel, double s, const complexd& alpha1,
                         const complexd& alpha2 = complexd(0.0)) {
    validate(state);
    if (const auto* f = std::get_if<Fock>(&state)) {
        if (sel.joint) {
            if (s != 0.0)
                throw UnsupportedClosedForm(
                    "two-mode Fock closed form exists only for the Wigner function (s = 0)");
            const auto [lam1, lam2] = detail::eta_pair(c, alpha1, alpha2);
            const double q1 = std::norm(lam1), q2 = std::norm(lam2);
            const double sign = ((f->n + f->m) % 2 == 0) ? 1.0 : -1.0;
            return 4.0 / (M_PI * M_PI) * sign * laguerre(f->n, 4.0 * q1) *
                   laguerre(f->m, 4.0 * q2) * std::exp(-2.0 * (q1 + q2));
        }
        return detail::fock_single_value(c, sel.mode, *f, s, alpha1);
    }
    return gaussian_form(c, state, sel, s).value(alpha1, alpha2);
}

namespace detail {

inline void finalize_meta(QuasiField& f) {
    const PhaseRect& ra = f.grid.mode_a;
    double area = ra.dre() * ra.dim();
    if (f.grid.mode_b) area *= f.grid.mode_b->dre() * f.grid.mode_b->dim();
    double sum = 0.0, mn = 0.0, mx = 0.0;
    if (!f.values.empty()) {
        mn = mx = f.values[0];
        for (double v : f.values) {
            sum += v;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    f.meta.norm_check = sum * area;
    f.meta.min_value = mn;
    f.meta.max_value = mx;
}

} // namespace detail

/// Closed form evaluated over a grid.
QuasiField quasi_closed_form_field(const EvolutionCoefficients& c, const InputState& state,
                                   const Selection& sel, double s, const PhaseSpaceGrid& grid) {
    grid.validate();
    if (sel.joint && !grid.mode_b)
        throw ConfigError("joint selection requires a second phase-space rectangle");

    QuasiField f;
    f.grid = grid;
    f.meta.state = describe(state);
    f.meta.sel = sel;
    f.meta.s = s;
    f.meta.t = c.t;
    f.meta.method = EvalMethod::ClosedForm;

    const PhaseRect& ra = grid.mode_a;
    if (!sel.joint) {
        f.values.resize(ra.count());
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j)
                f.values[i * ra.n_im + j] = quasi_closed_form(c, state, sel, s, ra.point(i, j));
    } else {
        const PhaseRect& rb = *grid.mode_b;
        f.values.resize(static_cast<std::size_t>(ra.count()) * rb.count());
        std::size_t idx = 0;
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j)
                for (int i2 = 0; i2 < rb.n_re; ++i2)
                    for (int j2 = 0; j2 < rb.n_im; ++j2)
                        f.values[idx++] =
                            quasi_closed_form(c, state, sel, s, ra.point(i, j), rb.point(i2, j2));
    }
    detail::finalize_meta(f);
    return f;
}

namespace detail {

// Square zeta-domain half-width such that |C| < 1e-10 on the boundary.
// Non-finite samples (overflow of a growing characteristic function) count
// as not decayed.
template <typename CharFn>
double transform_extent(CharFn&& cf, double start = 3.0) {
    double u = start;
    for (int it = 0; it < 10; ++it) {
        double worst = 0.0;
        const int nb = 24;
        for (int i = 0; i <= nb; ++i) {
            const double x = -u + 2.0 * u * i / nb;
            for (const complexd z : {complexd(x, u), complexd(x, -u), complexd(u, x),
                                     complexd(-u, x)}) {
                const double m = std::abs(cf(z));
                worst = std::max(worst, std::isfinite(m) ? m : 1.0);
            }
        }
        if (worst < 1e-10) return u;
        u *= 1.6;
    }
    throw TruncatedTransform(
        "characteristic function has not decayed at the integration boundary");
}

// Single-mode inverse Weyl transform by trapezoidal quadrature, factorized
// over the separable oscillation exp(2i(y u - x v)).
template <typename CharFn>
void transform_single(CharFn&& cf, const PhaseRect& ra, double extent, int nz,
                      std::vector<double>& out) {
    const double dz = 2.0 * extent / (nz - 1);
    std::vector<complexd> cgrid(static_cast<std::size_t>(nz) * nz);
    for (int j = 0; j < nz; ++j) {
        const double u = -extent + j * dz;
        for (int k = 0; k < nz; ++k) {
            const double v = -extent + k * dz;
            cgrid[j * nz + k] = cf(complexd(u, v));
        }
    }
    out.assign(ra.count(), 0.0);
    std::vector<complexd> inner(nz);
    for (int i = 0; i < ra.n_re; ++i) {
        const double x = ra.re_min + i * ra.dre();
        for (int j = 0; j < nz; ++j) {
            complexd acc = 0.0;
            for (int k = 0; k < nz; ++k) {
                const double v = -extent + k * dz;
                acc += cgrid[j * nz + k] * std::exp(complexd(0.0, -2.0 * x * v));
            }
            inner[j] = acc;
        }
        for (int jj = 0; jj < ra.n_im; ++jj) {
            const double y = ra.im_min + jj * ra.dim();
            complexd acc = 0.0;
            for (int j = 0; j < nz; ++j) {
                const double u = -extent + j * dz;
                acc += inner[j] * std::exp(complexd(0.0, 2.0 * y * u));
            }
            out[i * ra.n_im + jj] = acc.real() * dz * dz / (M_PI * M_PI);
        }
    }
}

} // namespace detail

/// Canonical numerical evaluation: Fourier transform of the characteristic
/// function over an auto-sized zeta domain with a grid-doubling convergence
/// check.  Serves as arbiter when closed forms disagree.
QuasiField quasi_transform(const EvolutionCoefficients& c, const InputState& state,
                           const Selection& sel, double s, const PhaseSpaceGrid& grid) {
    grid.validate();
    QuasiField f;
    f.grid = grid;
    f.meta.state = describe(state);
    f.meta.sel = sel;
    f.meta.s = s;
    f.meta.t = c.t;
    f.meta.method = EvalMethod::Transform;

    const PhaseRect& ra = grid.mode_a;
    const double amax_a =
        std::max({std::abs(ra.re_min), std::abs(ra.re_max), std::abs(ra.im_min),
                  std::abs(ra.im_max)});

    if (!sel.joint) {
        auto cf = [&](const complexd& z) { return char_fn_single(c, state, sel.mode, s, z); };
        const double extent = detail::transform_extent(cf);
        // resolve both the Gaussian width and the exp(2i alpha zeta) oscillation
        int nz = std::max(129, static_cast<int>(std::ceil(2.0 * extent * (2.0 * amax_a + 4.0) /
                                                          M_PI)) |
                                   1);
        std::vector<double> coarse, fine;
        detail::transform_single(cf, ra, extent, nz, coarse);
        double change = 0.0;
        for (int pass = 0; pass < 3; ++pass) {
            const int nz2 = 2 * nz - 1;
            detail::transform_single(cf, ra, extent, nz2, fine);
            change = 0.0;
            for (std::size_t i = 0; i < coarse.size(); ++i)
                change = std::max(change, std::abs(fine[i] - coarse[i]));
            coarse.swap(fine);
            nz = nz2;
            if (change < 1e-9) break;
        }
        f.meta.conv_error = change;
        f.values = std::move(coarse);
    } else {
        if (!grid.mode_b)
            throw ConfigError("joint selection requires a second phase-space rectangle");
        const PhaseRect& rb = *grid.mode_b;
        const double amax_b =
            std::max({std::abs(rb.re_min), std::abs(rb.re_max), std::abs(rb.im_min),
                      std::abs(rb.im_max)});
        auto cf_diag = [&](const complexd& z) { return char_fn_joint(c, state, s, z, z); };
        auto cf_1 = [&](const complexd& z) { return char_fn_joint(c, state, s, z, complexd(0.0)); };
        auto cf_2 = [&](const complexd& z) { return char_fn_joint(c, state, s, complexd(0.0), z); };
        const double extent = std::max({detail::transform_extent(cf_diag),
                                        detail::transform_extent(cf_1),
                                        detail::transform_extent(cf_2)});
        const int nz = std::max(65, static_cast<int>(std::ceil(
                                        2.0 * extent * (2.0 * std::max(amax_a, amax_b) + 4.0) /
                                        M_PI)) |
                                    1);
        const double dz = 2.0 * extent / (nz - 1);

        f.values.assign(static_cast<std::size_t>(ra.count()) * rb.count(), 0.0);
        // half-transform over zeta2 for each alpha2, then the mode-1 pass
        std::vector<complexd> half(static_cast<std::size_t>(nz) * nz);
        for (int i2 = 0; i2 < rb.n_re; ++i2)
            for (int j2 = 0; j2 < rb.n_im; ++j2) {
                const complexd a2 = rb.point(i2, j2);
                for (int j = 0; j < nz; ++j)
                    for (int k = 0; k < nz; ++k) {
                        const complexd z1(-extent + j * dz, -extent + k * dz);
                        complexd acc = 0.0;
                        for (int p = 0; p < nz; ++p)
                            for (int q = 0; q < nz; ++q) {
                                const complexd z2(-extent + p * dz, -extent + q * dz);
                                acc += char_fn_joint(c, state, s, z1, z2) *
                                       std::exp(a2 * std::conj(z2) - std::conj(a2) * z2);
                            }
                        half[j * nz + k] = acc;
                    }
                for (int i = 0; i < ra.n_re; ++i)
                    for (int j = 0; j < ra.n_im; ++j) {
                        const complexd a1 = ra.point(i, j);
                        complexd acc = 0.0;
                        for (int p = 0; p < nz; ++p)
                            for (int q = 0; q < nz; ++q) {
                                const complexd z1(-extent + p * dz, -extent + q * dz);
                                acc += half[p * nz + q] *
                                       std::exp(a1 * std::conj(z1) - std::conj(a1) * z1);
                            }
                        const std::size_t idx =
                            (static_cast<std::size_t>(i) * ra.n_im + j) * rb.count() +
                            static_cast<std::size_t>(i2) * rb.n_im + j2;
                        f.values[idx] = acc.real() * dz * dz * dz * dz /
                                        (M_PI * M_PI * M_PI * M_PI);
                    }
            }
    }
    detail::finalize_meta(f);
    return f;
}

/// s-ordered operator moment from a sampled quasiprobability:
///   int W(alpha) prod_j conj(alpha_j)^{m_j} alpha_j^{n_j} d^2alpha_j.
complexd moments_from_field(const QuasiField& f, int m1, int n1, int m2 = 0, int n2 = 0) {
    if (f.is_complex())
        throw ConfigError("moments_from_field requires a quasiprobability field");
    if (std::abs(f.meta.norm_check - 1.0) > f.meta.norm_tol)
        throw ConfigError("moments_from_field: field normalization outside declared tolerance");

    const PhaseRect& ra = f.grid.mode_a;
    complexd acc = 0.0;
    if (!f.grid.mode_b) {
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j) {
                const complexd a = ra.point(i, j);
                acc += f.values[i * ra.n_im + j] * std::pow(std::conj(a), m1) * std::pow(a, n1);
            }
        return acc * ra.dre() * ra.dim();
    }
    const PhaseRect& rb = *f.grid.mode_b;
    std::size_t idx = 0;
    for (int i = 0; i < ra.n_re; ++i)
        for (int j = 0; j < ra.n_im; ++j) {
            const complexd a = ra.point(i, j);
            const complexd wa = std::pow(std::conj(a), m1) * std::pow(a, n1);
            for (int i2 = 0; i2 < rb.n_re; ++i2)
                for (int j2 = 0; j2 < rb.n_im; ++j2) {
                    const complexd b = rb.point(i2, j2);
                    acc += f.values[idx++] * wa * std::pow(std::conj(b), m2) * std::pow(b, n2);
                }
        }
    return acc * ra.dre() * ra.dim() * rb.dre() * rb.dim();
}

} // namespace nlcoupler

#endif
