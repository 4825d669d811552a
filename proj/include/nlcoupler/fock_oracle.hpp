#ifndef NLCOUPLER_FOCK_ORACLE_HPP
#define NLCOUPLER_FOCK_ORACLE_HPP

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "nlcoupler/char_fn.hpp"
#include "nlcoupler/detail/rk45.hpp"
#include "nlcoupler/errors.hpp"
#include "nlcoupler/evolution.hpp"
#include "nlcoupler/polynomials.hpp"
#include "nlcoupler/states.hpp"

namespace nlcoupler {

/// Brute-force route for the evolution coefficients: adaptive integration of
/// the 4x4 linear Heisenberg system, local tolerance 1e-12.
EvolutionCoefficients ode_coefficients(const CouplerParams& p, double t) {
    p.validate();
    const auto G = heisenberg_generator(p);
    std::vector<complexd> y(16, complexd(0.0));
    for (int i = 0; i < 4; ++i) y[i * 4 + i] = 1.0;
    auto deriv = [&](double, const std::vector<complexd>& v, std::vector<complexd>& dv) {
        const complexd mi(0.0, -1.0);
        for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 4; ++col) {
                complexd acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += G[r][k] * v[k * 4 + col];
                dv[r * 4 + col] = mi * acc;
            }
    };
    detail::integrate_rk45(y, 0.0, t, deriv, 1e-12);
    EvolutionCoefficients c;
    c.t = t;
    c.k1 = y[0];
    c.l1 = y[1];
    c.m1 = y[2];
    c.n1 = y[3];
    c.m2 = y[8];
    c.n2 = y[9];
    c.k2 = y[10];
    c.l2 = y[11];
    return c;
}

/// Dense effective Hamiltonian on the truncated two-mode product basis
/// |n1>|n2>, index n1*(cutoff+1) + n2:
///   H = d1 n1 + d2 n2 + l1 (a1+^2 + a1^2) + l2 (a2+^2 + a2^2)
///       + l3 (a1+ a2 + a1 a2+) + l4 (a1+ a2+ + a1 a2).
struct EffectiveHamiltonian {
    int cutoff = 0;
    Eigen::MatrixXd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }

    static EffectiveHamiltonian build(const CouplerParams& p, int cutoff) {
        p.validate();
        if (cutoff < 1) throw ConfigError("EffectiveHamiltonian: cutoff must be >= 1");
        const int nb = cutoff + 1;
        const int d = nb * nb;
        EffectiveHamiltonian h;
        h.cutoff = cutoff;
        h.matrix = Eigen::MatrixXd::Zero(d, d);
        auto idx = [nb](int n1, int n2) { return n1 * nb + n2; };
        for (int n1 = 0; n1 <= cutoff; ++n1)
            for (int n2 = 0; n2 <= cutoff; ++n2) {
                const int i = idx(n1, n2);
                h.matrix(i, i) = p.delta1() * n1 + p.delta2() * n2;
                if (n1 + 2 <= cutoff) {
                    const double v = p.lambda1 * std::sqrt((n1 + 1.0) * (n1 + 2.0));
                    h.matrix(idx(n1 + 2, n2), i) += v;
                    h.matrix(i, idx(n1 + 2, n2)) += v;
                }
                if (n2 + 2 <= cutoff) {
                    const double v = p.lambda2 * std::sqrt((n2 + 1.0) * (n2 + 2.0));
                    h.matrix(idx(n1, n2 + 2), i) += v;
                    h.matrix(i, idx(n1, n2 + 2)) += v;
                }
                if (n1 + 1 <= cutoff && n2 >= 1) {
                    const double v = p.lambda3 * std::sqrt((n1 + 1.0) * n2);
                    h.matrix(idx(n1 + 1, n2 - 1), i) += v;
                    h.matrix(i, idx(n1 + 1, n2 - 1)) += v;
                }
                if (n1 + 1 <= cutoff && n2 + 1 <= cutoff) {
                    const double v = p.lambda4 * std::sqrt((n1 + 1.0) * (n2 + 1.0));
                    h.matrix(idx(n1 + 1, n2 + 1), i) += v;
                    h.matrix(i, idx(n1 + 1, n2 + 1)) += v;
                }
            }
        return h;
    }
};

/// Truncated two-mode state as a weighted mixture of pure vectors (a pure
/// state is a single component; a thermal state is the diagonal mixture of
/// its retained Bose-Einstein weights).
struct OracleState {
    int cutoff = 0;
    std::vector<double> weights;
    std::vector<Eigen::VectorXcd> components;
    double discarded_weight = 0.0;  // truncated thermal remainder, not renormalized
    double tail_mass = 0.0;         // probability in the top two levels of either mode

    bool reliable() const { return tail_mass <= 1e-8; }
    double total_weight() const {
        double w = 0.0;
        for (double x : weights) w += x;
        return w;
    }
};

/// Propagates truncated states under the effective Hamiltonian: dense
/// eigendecomposition up to dimension ~3800 (reused across times and
/// components), matrix-free adaptive integration above that.
class FockPropagator {
public:
    FockPropagator(const CouplerParams& p, int cutoff) : params_(p), cutoff_(cutoff) {
        const int d = (cutoff + 1) * (cutoff + 1);
        use_eigen_ = d <= 3800;
        if (use_eigen_) {
            EffectiveHamiltonian h = EffectiveHamiltonian::build(p, cutoff);
            evals_.resize(d);
            const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', d, h.matrix.data(), d,
                                            evals_.data());
            if (info != 0)
                throw IntegratorFailure("FockPropagator: eigendecomposition failed");
            evecs_ = std::move(h.matrix);
        }
    }

    int cutoff() const { return cutoff_; }
    const CouplerParams& params() const { return params_; }
    bool eigenbasis() const { return use_eigen_; }

    Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const {
        if (use_eigen_) {
            Eigen::VectorXcd coef = evecs_.transpose() * psi0;
            for (int i = 0; i < coef.size(); ++i)
                coef(i) *= std::exp(complexd(0.0, -evals_(i) * t));
            return evecs_ * coef;
        }
        std::vector<complexd> y(psi0.data(), psi0.data() + psi0.size());
        const int nb = cutoff_ + 1;
        const CouplerParams p = params_;
        auto deriv = [p, nb](double, const std::vector<complexd>& v,
                             std::vector<complexd>& dv) {
            apply_hamiltonian(p, nb, v, dv);
            const complexd mi(0.0, -1.0);
            for (auto& z : dv) z *= mi;
        };
        detail::integrate_rk45(y, 0.0, t, deriv, 1e-12);
        return Eigen::Map<Eigen::VectorXcd>(y.data(), psi0.size());
    }

    /// Batched evolution of basis states (columns ordered as `seeds`);
    /// one pair of real GEMMs instead of per-component matvecs.
    Eigen::MatrixXcd evolve_basis(const std::vector<int>& seeds, double t) const {
        const int d = (cutoff_ + 1) * (cutoff_ + 1);
        const int nk = static_cast<int>(seeds.size());
        if (!use_eigen_) {
            Eigen::MatrixXcd out(d, nk);
            for (int k = 0; k < nk; ++k) {
                Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
                v(seeds[k]) = 1.0;
                out.col(k) = evolve(v, t);
            }
            return out;
        }
        Eigen::MatrixXd a(d, nk), b(d, nk);
        for (int k = 0; k < nk; ++k)
            for (int i = 0; i < d; ++i) {
                const double c = evecs_(seeds[k], i);
                const double ph = -evals_(i) * t;
                a(i, k) = c * std::cos(ph);
                b(i, k) = c * std::sin(ph);
            }
        Eigen::MatrixXcd out(d, nk);
        out.real() = evecs_ * a;
        out.imag() = evecs_ * b;
        return out;
    }

private:
    static void apply_hamiltonian(const CouplerParams& p, int nb,
                                  const std::vector<complexd>& v, std::vector<complexd>& out) {
        const int cutoff = nb - 1;
        auto idx = [nb](int n1, int n2) { return n1 * nb + n2; };
        for (int n1 = 0; n1 <= cutoff; ++n1)
            for (int n2 = 0; n2 <= cutoff; ++n2) {
                const int i = idx(n1, n2);
                complexd acc = (p.delta1() * n1 + p.delta2() * n2) * v[i];
                if (n1 >= 2) acc += p.lambda1 * std::sqrt(n1 * (n1 - 1.0)) * v[idx(n1 - 2, n2)];
                if (n1 + 2 <= cutoff)
                    acc += p.lambda1 * std::sqrt((n1 + 1.0) * (n1 + 2.0)) * v[idx(n1 + 2, n2)];
                if (n2 >= 2) acc += p.lambda2 * std::sqrt(n2 * (n2 - 1.0)) * v[idx(n1, n2 - 2)];
                if (n2 + 2 <= cutoff)
                    acc += p.lambda2 * std::sqrt((n2 + 1.0) * (n2 + 2.0)) * v[idx(n1, n2 + 2)];
                if (n1 >= 1 && n2 + 1 <= cutoff)
                    acc += p.lambda3 * std::sqrt(n1 * (n2 + 1.0)) * v[idx(n1 - 1, n2 + 1)];
                if (n1 + 1 <= cutoff && n2 >= 1)
                    acc += p.lambda3 * std::sqrt((n1 + 1.0) * n2) * v[idx(n1 + 1, n2 - 1)];
                if (n1 >= 1 && n2 >= 1)
                    acc += p.lambda4 * std::sqrt(static_cast<double>(n1) * n2) *
                           v[idx(n1 - 1, n2 - 1)];
                if (n1 + 1 <= cutoff && n2 + 1 <= cutoff)
                    acc += p.lambda4 * std::sqrt((n1 + 1.0) * (n2 + 1.0)) * v[idx(n1 + 1, n2 + 1)];
                out[i] = acc;
            }
    }

    CouplerParams params_;
    int cutoff_ = 0;
    bool use_eigen_ = false;
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd evals_;
};

namespace detail {

// Initial mixture: either a list of weighted basis seeds (Fock, thermal) or
// one dense vector (coherent).  Thermal Bose-Einstein weights are kept until
// the cumulative remainder per mode drops below 1e-10 and the remainder is
// discarded (recorded, not renormalized).
struct InitialMixture {
    std::vector<double> weights;
    std::vector<int> seeds;            // basis indices, empty for dense input
    Eigen::VectorXcd dense;            // used when seeds is empty
    double discarded = 0.0;
};

inline InitialMixture initial_components(const InputState& state, int cutoff) {
    validate(state);
    const int nb = cutoff + 1;
    const int dim = nb * nb;
    InitialMixture mix;

    if (const auto* f = std::get_if<Fock>(&state)) {
        if (f->n > cutoff || f->m > cutoff)
            throw CutoffExceeded("initial Fock occupation exceeds the cutoff", 1.0);
        mix.weights.push_back(1.0);
        mix.seeds.push_back(f->n * nb + f->m);
    } else if (const auto* coh = std::get_if<Coherent>(&state)) {
        Eigen::VectorXcd c1(nb), c2(nb);
        for (int k = 0; k < nb; ++k) {
            c1(k) = k == 0 ? complexd(1.0) : c1(k - 1) * coh->alpha1 / std::sqrt(double(k));
            c2(k) = k == 0 ? complexd(1.0) : c2(k - 1) * coh->alpha2 / std::sqrt(double(k));
        }
        mix.dense.resize(dim);
        for (int n1 = 0; n1 < nb; ++n1)
            for (int n2 = 0; n2 < nb; ++n2) mix.dense(n1 * nb + n2) = c1(n1) * c2(n2);
        const double norm = mix.dense.norm();
        if (norm < 0.5)
            throw CutoffExceeded("coherent amplitudes too large for the cutoff", 1.0 - norm);
        mix.dense /= norm;
        mix.weights.push_back(1.0);
    } else {
        const auto& th = std::get<Thermal>(state);
        auto weights_for = [cutoff](double nbar, std::vector<double>& out) {
            out.clear();
            if (nbar == 0.0) {
                out.push_back(1.0);
                return 0.0;
            }
            const double ratio = nbar / (nbar + 1.0);
            double wgt = 1.0 / (nbar + 1.0);
            double kept = 0.0;
            for (int n = 0; n <= cutoff; ++n) {
                out.push_back(wgt);
                kept += wgt;
                if (1.0 - kept < 1e-10) break;
                wgt *= ratio;
            }
            return 1.0 - kept;
        };
        std::vector<double> w1, w2;
        const double rem1 = weights_for(th.nbar1, w1);
        const double rem2 = weights_for(th.nbar2, w2);
        if (rem1 > 1e-8 || rem2 > 1e-8)
            throw CutoffExceeded("thermal occupation too large for the cutoff",
                                 std::max(rem1, rem2));
        mix.discarded = 1.0 - (1.0 - rem1) * (1.0 - rem2);
        for (std::size_t n1 = 0; n1 < w1.size(); ++n1)
            for (std::size_t n2 = 0; n2 < w2.size(); ++n2) {
                mix.weights.push_back(w1[n1] * w2[n2]);
                mix.seeds.push_back(static_cast<int>(n1) * nb + static_cast<int>(n2));
            }
    }
    return mix;
}

inline double component_tail_mass(const Eigen::VectorXcd& v, int cutoff) {
    const int nb = cutoff + 1;
    double tail = 0.0;
    for (int n1 = 0; n1 < nb; ++n1)
        for (int n2 = 0; n2 < nb; ++n2)
            if (n1 >= cutoff - 1 || n2 >= cutoff - 1) tail += std::norm(v(n1 * nb + n2));
    return tail;
}

} // namespace detail

/// Evolves an input state to time t with an existing propagator.
OracleState evolve_state(const FockPropagator& prop, const InputState& state, double t,
                         bool strict = true) {
    OracleState s;
    s.cutoff = prop.cutoff();
    detail::InitialMixture mix = detail::initial_components(state, prop.cutoff());
    s.weights = std::move(mix.weights);
    s.discarded_weight = mix.discarded;
    if (mix.seeds.empty()) {
        s.components.push_back(prop.evolve(mix.dense, t));
    } else {
        const Eigen::MatrixXcd evolved = prop.evolve_basis(mix.seeds, t);
        s.components.resize(mix.seeds.size());
        for (std::size_t i = 0; i < mix.seeds.size(); ++i)
            s.components[i] = evolved.col(static_cast<int>(i));
    }
    double tail = 0.0;
    for (std::size_t i = 0; i < s.components.size(); ++i)
        tail += s.weights[i] * detail::component_tail_mass(s.components[i], s.cutoff);
    s.tail_mass = tail + s.discarded_weight;
    if (strict && !s.reliable())
        throw CutoffExceeded("truncated basis cannot follow the state", s.tail_mass);
    return s;
}

/// Convenience single-shot evolution (builds a propagator internally).
OracleState evolve_state(const CouplerParams& p, const InputState& state, double t, int cutoff,
                         bool strict = true) {
    return evolve_state(FockPropagator(p, cutoff), state, t, strict);
}

/// Direct operator averages on the truncated state.
struct OracleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double g2 = 0.0;
    double squeeze_s = 0.0;  // 4 Var(X) - 1
    double squeeze_q = 0.0;  // 4 Var(Y) - 1
};

OracleMoments oracle_moments(const OracleState& st, int mode) {
    if (mode != 1 && mode != 2) throw ConfigError("oracle_moments: mode must be 1 or 2");
    const int nb = st.cutoff + 1;
    double n_mean = 0.0, n2_mean = 0.0;
    complexd a_mean = 0.0, a2_mean = 0.0;
    for (std::size_t ci = 0; ci < st.components.size(); ++ci) {
        const Eigen::VectorXcd& v = st.components[ci];
        const double wgt = st.weights[ci];
        for (int n1 = 0; n1 < nb; ++n1)
            for (int n2 = 0; n2 < nb; ++n2) {
                const int i = n1 * nb + n2;
                const double pop = std::norm(v(i));
                const int own = mode == 1 ? n1 : n2;
                n_mean += wgt * pop * own;
                n2_mean += wgt * pop * static_cast<double>(own) * own;
                // <a> and <a^2> couple neighbouring occupation numbers
                if (mode == 1) {
                    if (n1 >= 1)
                        a_mean += wgt * std::conj(v((n1 - 1) * nb + n2)) * std::sqrt(double(n1)) *
                                  v(i);
                    if (n1 >= 2)
                        a2_mean += wgt * std::conj(v((n1 - 2) * nb + n2)) *
                                   std::sqrt(n1 * (n1 - 1.0)) * v(i);
                } else {
                    if (n2 >= 1)
                        a_mean += wgt * std::conj(v(n1 * nb + n2 - 1)) * std::sqrt(double(n2)) *
                                  v(i);
                    if (n2 >= 2)
                        a2_mean += wgt * std::conj(v(n1 * nb + n2 - 2)) *
                                   std::sqrt(n2 * (n2 - 1.0)) * v(i);
                }
            }
    }
    OracleMoments m;
    m.mean = n_mean;
    m.variance = n2_mean - n_mean * n_mean;
    m.g2 = n_mean > 1e-30 ? (n2_mean - n_mean) / (n_mean * n_mean) : 0.0;
    m.squeeze_s = 2.0 * n_mean + 2.0 * a2_mean.real() - 4.0 * a_mean.real() * a_mean.real();
    m.squeeze_q = 2.0 * n_mean - 2.0 * a2_mean.real() - 4.0 * a_mean.imag() * a_mean.imag();
    return m;
}

namespace detail {

// <m|D(beta)|n> on the truncated basis.
inline Eigen::MatrixXcd displacement_matrix(const complexd& beta, int nb) {
    Eigen::MatrixXcd d(nb, nb);
    const double q = std::norm(beta);
    const double pref = std::exp(-0.5 * q);
    for (int mm = 0; mm < nb; ++mm)
        for (int n = 0; n < nb; ++n) {
            if (mm >= n) {
                // sqrt(n!/m!) = sqrt(prod_{k=n+1..m} 1/k)
                double fr = 1.0;
                for (int k = n + 1; k <= mm; ++k) fr /= k;
                d(mm, n) = pref * std::sqrt(fr) * std::pow(beta, mm - n) *
                           laguerre_assoc(n, mm - n, q);
            } else {
                double fr = 1.0;
                for (int k = mm + 1; k <= n; ++k) fr /= k;
                d(mm, n) = pref * std::sqrt(fr) * std::pow(-std::conj(beta), n - mm) *
                           laguerre_assoc(mm, n - mm, q);
            }
        }
    return d;
}

// Reduced single-mode density matrix of the mixture.
inline Eigen::MatrixXcd reduced_density(const OracleState& st, int mode) {
    const int nb = st.cutoff + 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(nb, nb);
    for (std::size_t ci = 0; ci < st.components.size(); ++ci) {
        const Eigen::VectorXcd& v = st.components[ci];
        const double wgt = st.weights[ci];
        for (int a = 0; a < nb; ++a)
            for (int b = 0; b < nb; ++b) {
                complexd acc = 0.0;
                for (int k = 0; k < nb; ++k)
                    acc += (mode == 1 ? v(a * nb + k) * std::conj(v(b * nb + k))
                                      : v(k * nb + a) * std::conj(v(k * nb + b)));
                rho(a, b) += wgt * acc;
            }
    }
    return rho;
}

} // namespace detail

/// Wigner value by displaced parity, W = (2/pi) Tr[rho D(2a) Pi] per mode.
double oracle_wigner(const OracleState& st, const Selection& sel, const complexd& alpha1,
                     const complexd& alpha2 = complexd(0.0)) {
    const int nb = st.cutoff + 1;
    if (!sel.joint) {
        const Eigen::MatrixXcd rho = detail::reduced_density(st, sel.mode);
        const Eigen::MatrixXcd d = detail::displacement_matrix(2.0 * alpha1, nb);
        complexd tr = 0.0;
        for (int n = 0; n < nb; ++n) {
            const double par = (n % 2 == 0) ? 1.0 : -1.0;
            for (int np = 0; np < nb; ++np) tr += rho(n, np) * par * d(np, n);
        }
        return 2.0 / M_PI * tr.real();
    }
    const Eigen::MatrixXcd d1 = detail::displacement_matrix(2.0 * alpha1, nb);
    const Eigen::MatrixXcd d2 = detail::displacement_matrix(2.0 * alpha2, nb);
    Eigen::VectorXd par(nb);
    for (int n = 0; n < nb; ++n) par(n) = (n % 2 == 0) ? 1.0 : -1.0;
    const Eigen::MatrixXcd d1p = d1 * par.asDiagonal();
    const Eigen::MatrixXcd d2p = d2 * par.asDiagonal();
    complexd acc = 0.0;
    for (std::size_t ci = 0; ci < st.components.size(); ++ci) {
        const Eigen::Map<const Eigen::MatrixXcd> psi(st.components[ci].data(), nb, nb);
        // basis index is n1*nb + n2 and Eigen maps are column-major, so the
        // mapped matrix is psi(n2, n1); apply D2P on rows, D1P on columns.
        const Eigen::MatrixXcd phi = d2p * psi.eval() * d1p.transpose();
        acc += st.weights[ci] * (psi.conjugate().cwiseProduct(phi)).sum();
    }
    return 4.0 / (M_PI * M_PI) * acc.real();
}

/// s-parametrized characteristic function from the truncated state.
complexd oracle_char_fn(const OracleState& st, double s, const complexd& z1,
                        const complexd& z2) {
    const int nb = st.cutoff + 1;
    const Eigen::MatrixXcd d1 = detail::displacement_matrix(z1, nb);
    const Eigen::MatrixXcd d2 = detail::displacement_matrix(z2, nb);
    complexd acc = 0.0;
    for (std::size_t ci = 0; ci < st.components.size(); ++ci) {
        const Eigen::Map<const Eigen::MatrixXcd> psi(st.components[ci].data(), nb, nb);
        const Eigen::MatrixXcd phi = d2 * psi.eval() * d1.transpose();
        acc += st.weights[ci] * (psi.conjugate().cwiseProduct(phi)).sum();
    }
    return std::exp(0.5 * s * (std::norm(z1) + std::norm(z2))) * acc;
}

} // namespace nlcoupler

#endif
