#ifndef NLCOUPLER_GAUSSIAN_HPP
#define NLCOUPLER_GAUSSIAN_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "nlcoupler/char_fn.hpp"
#include "nlcoupler/errors.hpp"
#include "nlcoupler/evolution.hpp"
#include "nlcoupler/photon_stats.hpp"
#include "nlcoupler/states.hpp"

namespace nlcoupler {

namespace detail {

// Real 2x2 block of the map zeta -> zeta*c - zeta* *cp in (Re, Im) coords.
inline Eigen::Matrix2d real_block(const complexd& c, const complexd& cp) {
    Eigen::Matrix2d b;
    b << c.real() - cp.real(), -(c.imag() + cp.imag()),
         c.imag() - cp.imag(),   c.real() + cp.real();
    return b;
}

// Real matrix of (eta1, eta2) as a function of the zeta coordinates for the
// given selection; rows (eta1x, eta1y, eta2x, eta2y).
inline Eigen::MatrixXd eta_map(const EvolutionCoefficients& c, const Selection& sel) {
    if (sel.joint) {
        Eigen::MatrixXd lam(4, 4);
        lam.block<2, 2>(0, 0) = real_block(std::conj(c.k1), c.l1);
        lam.block<2, 2>(0, 2) = real_block(std::conj(c.m2), c.n2);
        lam.block<2, 2>(2, 0) = real_block(std::conj(c.m1), c.n1);
        lam.block<2, 2>(2, 2) = real_block(std::conj(c.k2), c.l2);
        return lam;
    }
    Eigen::MatrixXd lam(4, 2);
    if (sel.mode == 1) {
        lam.block<2, 2>(0, 0) = real_block(std::conj(c.k1), c.l1);
        lam.block<2, 2>(2, 0) = real_block(std::conj(c.m1), c.n1);
    } else {
        lam.block<2, 2>(0, 0) = real_block(std::conj(c.m2), c.n2);
        lam.block<2, 2>(2, 0) = real_block(std::conj(c.k2), c.l2);
    }
    return lam;
}

} // namespace detail

/// Gaussian characteristic data in real zeta coordinates:
///   C(zeta) = exp(-1/2 zeta^T M zeta + i k^T zeta).
/// Valid for coherent and thermal inputs; the existence of the quasiprob-
/// ability as an ordinary function is positive-definiteness of M.
struct GaussianQuasi {
    Eigen::MatrixXd M;
    Eigen::VectorXd k;
    int modes = 1;

    bool positive_definite() const {
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        return llt.info() == Eigen::Success;
    }

    /// Density value at one phase-space point (alpha2 ignored for a single
    /// mode).  Throws PNotRepresentable when the transform diverges.
    double value(const complexd& alpha1, const complexd& alpha2 = complexd(0.0)) const {
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success)
            throw PNotRepresentable(
                "quasiprobability is not an ordinary function at this ordering");
        Eigen::VectorXd r = k;
        r(0) += 2.0 * alpha1.imag();
        r(1) += -2.0 * alpha1.real();
        if (modes == 2) {
            r(2) += 2.0 * alpha2.imag();
            r(3) += -2.0 * alpha2.real();
        }
        const Eigen::VectorXd x = llt.solve(r);
        double logdet = 0.0;
        for (int i = 0; i < M.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
        const double pref = modes == 1 ? 2.0 / M_PI : 4.0 / (M_PI * M_PI);
        return pref * std::exp(-0.5 * r.dot(x) - logdet);
    }
};

/// Builds the Gaussian zeta-space form for a coherent or thermal input.
GaussianQuasi gaussian_form(const EvolutionCoefficients& c, const InputState& state,
                            const Selection& sel, double s) {
    validate(state);
    if (std::holds_alternative<Fock>(state))
        throw UnsupportedState("gaussian_form: Fock inputs are not Gaussian");

    const Eigen::MatrixXd lam = detail::eta_map(c, sel);
    Eigen::Vector4d occ_diag = Eigen::Vector4d::Ones();
    if (const auto* th = std::get_if<Thermal>(&state)) {
        occ_diag << 2.0 * th->nbar1 + 1.0, 2.0 * th->nbar1 + 1.0, 2.0 * th->nbar2 + 1.0,
            2.0 * th->nbar2 + 1.0;
    }

    GaussianQuasi g;
    g.modes = sel.joint ? 2 : 1;
    const int dim = sel.joint ? 4 : 2;
    g.M = lam.transpose() * occ_diag.asDiagonal() * lam -
          s * Eigen::MatrixXd::Identity(dim, dim);
    g.k = Eigen::VectorXd::Zero(dim);
    if (const auto* coh = std::get_if<Coherent>(&state)) {
        Eigen::Vector4d kp;
        kp << -2.0 * coh->alpha1.imag(), 2.0 * coh->alpha1.real(), -2.0 * coh->alpha2.imag(),
            2.0 * coh->alpha2.real();
        g.k = lam.transpose() * kp;
    }
    return g;
}

/// Point-independent pieces of the coherent-state quasiprobability kernel,
/// plus the mean amplitudes and the P-existence flags |A_j| > |B_j|.
struct CoherentQuasiKernel {
    double a1 = 0.0, a2 = 0.0;           // A_j(s)
    complexd b1, b2;                     // B_j, phases 2 delta_j
    double delta1 = 0.0, delta2 = 0.0;
    complexd d;                          // D, phase chi
    double chi = 0.0;
    complexd cbar;                       // Cbar, phase gamma
    double gamma = 0.0;
    complexd e1, e2;                     // E_j at the evaluation point
    double f_plus = 0.0, f_minus = 0.0;
    double r_plus = 0.0, r_minus = 0.0;
    double s_plus = 0.0, s_minus = 0.0;
    double t_cross = 0.0;
    complexd x_plus, x_minus;
    complexd alpha_bar_1, alpha_bar_2;
    bool p_exists_1 = false, p_exists_2 = false;
};

CoherentQuasiKernel coherent_quasi_kernel(const EvolutionCoefficients& c, const Coherent& st,
                                          double s, const complexd& alpha1,
                                          const complexd& alpha2) {
    CoherentQuasiKernel k;
    k.a1 = 0.5 * (1.0 - s) + std::norm(c.l1) + std::norm(c.n1);
    k.a2 = 0.5 * (1.0 - s) + std::norm(c.l2) + std::norm(c.n2);
    k.b1 = std::conj(c.n1 * c.m1 + c.l1 * c.k1);
    k.b2 = std::conj(c.n2 * c.m2 + c.l2 * c.k2);
    k.delta1 = 0.5 * std::arg(k.b1);
    k.delta2 = 0.5 * std::arg(k.b2);
    k.d = std::conj(c.k1 * c.n2 + c.m1 * c.l2);
    k.chi = std::arg(k.d);
    k.cbar = std::conj(c.l2) * c.n1 + std::conj(c.n2) * c.l1;
    k.gamma = std::arg(k.cbar);
    k.alpha_bar_1 = mean_amplitude(c, st, 1);
    k.alpha_bar_2 = mean_amplitude(c, st, 2);
    k.e1 = (k.alpha_bar_1 - alpha1) * std::exp(complexd(0.0, k.delta1));
    k.e2 = (k.alpha_bar_2 - alpha2) * std::exp(complexd(0.0, k.delta2));

    const double ad = std::abs(k.d), ac = std::abs(k.cbar);
    k.f_plus = ad * std::sin(k.delta1 + k.delta2 - k.chi) +
               ac * std::sin(k.delta1 - k.delta2 + k.gamma);
    k.f_minus = ad * std::sin(k.delta1 + k.delta2 - k.chi) -
                ac * std::sin(k.delta1 - k.delta2 + k.gamma);
    k.r_plus = ad * std::cos(k.delta1 + k.delta2 - k.chi) +
               ac * std::cos(k.delta1 - k.delta2 + k.gamma);
    k.r_minus = ad * std::cos(k.delta1 + k.delta2 - k.chi) -
                ac * std::cos(k.delta1 - k.delta2 + k.gamma);

    const double b1m = std::abs(k.b1), b2m = std::abs(k.b2);
    k.s_plus = k.a2 + b2m - k.f_plus * k.f_plus / (k.a1 - b1m) -
               k.r_plus * k.r_plus / (k.a1 + b1m);
    k.s_minus = k.a2 - b2m - k.r_minus * k.r_minus / (k.a1 - b1m) -
                k.f_minus * k.f_minus / (k.a1 + b1m);
    k.t_cross = k.r_minus * k.f_plus / (k.a1 - b1m) - k.r_plus * k.f_minus / (k.a1 + b1m);

    const complexd i1(0.0, 1.0);
    k.x_plus = i1 * (k.e2 + std::conj(k.e2)) +
               k.f_plus * (std::conj(k.e1) - k.e1) / (k.a1 - b1m) -
               i1 * k.r_plus * (std::conj(k.e1) + k.e1) / (k.a1 + b1m);
    k.x_minus = (std::conj(k.e2) - k.e2) +
                k.r_minus * (std::conj(k.e1) - k.e1) / (k.a1 - b1m) +
                i1 * k.f_minus * (std::conj(k.e1) + k.e1) / (k.a1 + b1m);

    k.p_exists_1 = k.a1 > b1m;
    k.p_exists_2 = k.a2 > b2m;
    return k;
}

/// Kernel quantities of the thermal quasiprobability functions, with the
/// P-existence flags |Abar_j| > |C_j| (two-mode) and J - s/2 > |U| (single).
struct ThermalKernels {
    double abar1 = 0.0, abar2 = 0.0;
    complexd c1, c2;
    complexd dcal;        // D_1 at the evaluation point alpha1
    complexd l1, l2;
    complexd u;           // zeta*^2-coefficient of the single-mode Gaussian
    double jq = 0.0;      // J
    bool p_exists_1 = false, p_exists_2 = false, p_exists_single = false;
};

ThermalKernels thermal_kernels(const EvolutionCoefficients& c, const Thermal& th, double s,
                               const complexd& alpha1 = complexd(0.0)) {
    const double h1 = th.nbar1 + 0.5, h2 = th.nbar2 + 0.5;
    ThermalKernels k;
    k.abar1 = h1 * (std::norm(c.l1) + std::norm(c.k1)) +
              h2 * (std::norm(c.m1) + std::norm(c.n1)) - 0.5 * s;
    k.abar2 = h1 * (std::norm(c.m2) + std::norm(c.n2)) +
              h2 * (std::norm(c.k2) + std::norm(c.l2)) - 0.5 * s;
    k.c1 = 2.0 * (h1 * std::conj(c.l1 * c.k1) + h2 * std::conj(c.m1 * c.n1));
    k.l1 = (th.nbar1 + th.nbar2 + 1.0) * (std::conj(c.l1 * c.m2) + std::conj(c.k1 * c.n2));
    k.l2 = h1 * (std::conj(c.l1 * c.n2) + std::conj(c.k1 * c.m2)) +
           h2 * (std::conj(c.m1) * c.k2 + std::conj(c.n1) * c.l2);
    const double det1 = k.abar1 * k.abar1 - std::norm(k.c1);
    k.c2 = (k.c1 * std::conj(k.l1) * std::conj(k.l1) + std::conj(k.c1) * k.l2 * k.l2 -
            2.0 * k.abar1 * std::conj(k.l1) * k.l2) /
               det1 +
           2.0 * (h2 * c.l2 * c.k2 + h1 * c.m2 * c.n2);
    k.dcal = (k.abar1 * (alpha1 * k.l1 + std::conj(alpha1) * std::conj(k.l2)) -
              alpha1 * std::conj(k.l2) * k.c1 - std::conj(alpha1) * k.l1 * std::conj(k.c1)) /
             det1;
    // The single-mode Gaussian is exp[-|z|^2 (J - s/2) + z*^2 U/2 + z^2 U*/2];
    // U carries the phase of the evolved <e^2>.
    k.u = (2.0 * th.nbar1 + 1.0) * c.l1 * c.k1 + (2.0 * th.nbar2 + 1.0) * c.m1 * c.n1;
    k.jq = th.nbar1 * (std::norm(c.l1) + std::norm(c.k1)) +
           th.nbar2 * (std::norm(c.m1) + std::norm(c.n1)) + 0.5 + std::norm(c.l1) +
           std::norm(c.n1);
    k.p_exists_1 = k.abar1 > std::abs(k.c1);
    k.p_exists_2 = k.abar2 > std::abs(k.c2);
    k.p_exists_single = (k.jq - 0.5 * s) > std::abs(k.u);
    return k;
}

/// Result of the P-representability test: condition truth plus the
/// smallest gap; a false verdict is a nonclassicality witness.
struct PRepresentability {
    bool representable = false;
    double margin = 0.0;
};

PRepresentability p_representable(const EvolutionCoefficients& c, const InputState& state,
                                  const Selection& sel, double s = 1.0) {
    validate(state);
    if (std::holds_alternative<Fock>(state))
        throw UnsupportedState("p_representable: no condition for Fock inputs");

    PRepresentability r;
    if (const auto* coh = std::get_if<Coherent>(&state)) {
        const auto k = coherent_quasi_kernel(c, *coh, s, complexd(0.0), complexd(0.0));
        if (sel.joint) {
            r.margin = std::min(k.a1 - std::abs(k.b1), k.a2 - std::abs(k.b2));
        } else {
            r.margin = sel.mode == 1 ? k.a1 - std::abs(k.b1) : k.a2 - std::abs(k.b2);
        }
    } else {
        const auto& th = std::get<Thermal>(state);
        if (sel.joint) {
            const auto k = thermal_kernels(c, th, s);
            r.margin = std::min(k.abar1 - std::abs(k.c1), k.abar2 - std::abs(k.c2));
        } else if (sel.mode == 1) {
            const auto k = thermal_kernels(c, th, s);
            r.margin = (k.jq - 0.5 * s) - std::abs(k.u);
        } else {
            // Interchange 1 <-> 2: swap both the input occupations and the
            // coefficient rows.
            EvolutionCoefficients cs;
            cs.t = c.t;
            cs.k1 = c.k2; cs.l1 = c.l2; cs.m1 = c.m2; cs.n1 = c.n2;
            cs.k2 = c.k1; cs.l2 = c.l1; cs.m2 = c.m1; cs.n2 = c.n1;
            const auto k = thermal_kernels(cs, Thermal{th.nbar2, th.nbar1}, s);
            r.margin = (k.jq - 0.5 * s) - std::abs(k.u);
        }
    }
    r.representable = r.margin >= 0.0;
    return r;
}

} // namespace nlcoupler

#endif
