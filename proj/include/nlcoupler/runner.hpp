#ifndef NLCOUPLER_RUNNER_HPP
#define NLCOUPLER_RUNNER_HPP

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlcoupler/config.hpp"
#include "nlcoupler/errors.hpp"
#include "nlcoupler/evolution.hpp"
#include "nlcoupler/fock_oracle.hpp"
#include "nlcoupler/photon_stats.hpp"
#include "nlcoupler/quasiprob.hpp"

namespace nlcoupler {

// 17 significant digits, locale-independent; round-trips doubles exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Tabular scan output: one row per time step.
struct ScanResult {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

ScanResult run_scan(const RunConfig& rc) {
    ScanResult res;
    res.header.push_back("t");
    for (Observable ob : rc.observables) {
        switch (ob) {
            case Observable::Squeezing:
                for (const char* h : {"S1", "Q1", "S2", "Q2"}) res.header.push_back(h);
                break;
            case Observable::Mean:
                for (const char* h : {"n1_mean", "n2_mean"}) res.header.push_back(h);
                break;
            case Observable::Variance:
                for (const char* h : {"n1_var", "n2_var"}) res.header.push_back(h);
                break;
            case Observable::G2:
                for (const char* h : {"g2_1", "g2_2"}) res.header.push_back(h);
                break;
            case Observable::Coeffs:
                for (const char* h :
                     {"K1_re", "K1_im", "L1_re", "L1_im", "M1_re", "M1_im", "N1_re", "N1_im",
                      "K2_re", "K2_im", "L2_re", "L2_im", "M2_re", "M2_im", "N2_re", "N2_im"})
                    res.header.push_back(h);
                break;
            default:
                throw ConfigError(
                    "scan supports squeezing, g2, mean, variance and coeffs observables");
        }
    }

    res.rows.reserve(rc.time_grid.steps);
    for (int k = 0; k < rc.time_grid.steps; ++k) {
        const double t = rc.time_grid.at(k);
        const EvolutionCoefficients c = evolution_coefficients(rc.params, t);
        std::vector<double> row;
        row.push_back(t);
        for (Observable ob : rc.observables) {
            switch (ob) {
                case Observable::Squeezing: {
                    const QuadratureReport q = squeezing(c, rc.state);
                    row.insert(row.end(), {q.s1, q.q1, q.s2, q.q2});
                    break;
                }
                case Observable::Mean:
                    row.push_back(mean_photon(c, rc.state, 1));
                    row.push_back(mean_photon(c, rc.state, 2));
                    break;
                case Observable::Variance:
                    row.push_back(photon_variance(c, rc.state, 1));
                    row.push_back(photon_variance(c, rc.state, 2));
                    break;
                case Observable::G2:
                    row.push_back(g2(c, rc.state, 1));
                    row.push_back(g2(c, rc.state, 2));
                    break;
                case Observable::Coeffs:
                    for (const complexd z : {c.k1, c.l1, c.m1, c.n1, c.k2, c.l2, c.m2, c.n2}) {
                        row.push_back(z.real());
                        row.push_back(z.imag());
                    }
                    break;
                default:
                    break;
            }
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

inline std::string to_csv(const ScanResult& r) {
    std::ostringstream out;
    for (std::size_t i = 0; i < r.header.size(); ++i)
        out << (i ? "," : "") << r.header[i];
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
        out << "\n";
    }
    return out.str();
}

/// Field output for a single figure-style grid request.
QuasiField run_grid(const RunConfig& rc) {
    if (rc.observables.size() != 1)
        throw ConfigError("grid requires exactly one observable (wigner, qfunc, pfunc, charfn)");
    const Observable ob = rc.observables[0];
    const EvolutionCoefficients c = evolution_coefficients(rc.params, rc.grid_time);

    double s = rc.s;
    if (ob == Observable::Wigner) s = 0.0;
    if (ob == Observable::QFunc) s = -1.0;
    if (ob == Observable::PFunc) s = 1.0;

    if (ob == Observable::CharFn) {
        // direct sampling of the characteristic function (complex field)
        QuasiField f;
        f.grid = rc.grid;
        f.meta.state = describe(rc.state);
        f.meta.sel = rc.sel;
        f.meta.s = s;
        f.meta.t = rc.grid_time;
        f.meta.method = EvalMethod::ClosedForm;
        const PhaseRect& ra = rc.grid.mode_a;
        f.cvalues.resize(ra.count());
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j)
                f.cvalues[i * ra.n_im + j] = char_fn(c, rc.state, rc.sel, s, ra.point(i, j));
        return f;
    }
    if (ob != Observable::Wigner && ob != Observable::QFunc && ob != Observable::PFunc)
        throw ConfigError("grid observable must be wigner, qfunc, pfunc or charfn");

    if (ob == Observable::PFunc && !std::holds_alternative<Fock>(rc.state)) {
        const PRepresentability pr = p_representable(c, rc.state, rc.sel, 1.0);
        if (!pr.representable)
            throw PNotRepresentable("P-function is not an ordinary function here (margin " +
                                    fmt17(pr.margin) + ")");
    }
    // Closed form everywhere it exists; the transform covers the one gap
    // (joint Fock at s != 0).
    if (std::holds_alternative<Fock>(rc.state) && rc.sel.joint && s != 0.0)
        return quasi_transform(c, rc.state, rc.sel, s, rc.grid);
    return quasi_closed_form_field(c, rc.state, rc.sel, s, rc.grid);
}

inline std::string to_matrix(const QuasiField& f) {
    std::ostringstream out;
    out << "# state: " << f.meta.state << "\n";
    out << "# selection: " << (f.meta.sel.joint ? "joint" : (f.meta.sel.mode == 1 ? "mode1" : "mode2"))
        << "\n";
    out << "# s: " << fmt17(f.meta.s) << "\n";
    out << "# t: " << fmt17(f.meta.t) << "\n";
    out << "# method: "
        << (f.meta.method == EvalMethod::ClosedForm ? "closed-form" : "transform") << "\n";
    if (!f.is_complex()) {
        out << "# normalization: " << fmt17(f.meta.norm_check) << "\n";
        out << "# norm_tol: " << fmt17(f.meta.norm_tol) << "\n";
        out << "# min: " << fmt17(f.meta.min_value) << "\n";
        out << "# max: " << fmt17(f.meta.max_value) << "\n";
    }
    if (f.meta.method == EvalMethod::Transform)
        out << "# conv_error: " << fmt17(f.meta.conv_error) << "\n";

    const PhaseRect& ra = f.grid.mode_a;
    out << "axis_re:";
    for (int i = 0; i < ra.n_re; ++i) out << " " << fmt17(ra.re_min + i * ra.dre());
    out << "\naxis_im:";
    for (int j = 0; j < ra.n_im; ++j) out << " " << fmt17(ra.im_min + j * ra.dim());
    out << "\n";
    if (f.grid.mode_b) {
        const PhaseRect& rb = *f.grid.mode_b;
        out << "axis2_re:";
        for (int i = 0; i < rb.n_re; ++i) out << " " << fmt17(rb.re_min + i * rb.dre());
        out << "\naxis2_im:";
        for (int j = 0; j < rb.n_im; ++j) out << " " << fmt17(rb.im_min + j * rb.dim());
        out << "\n";
    }
    if (f.is_complex()) {
        for (int i = 0; i < ra.n_re; ++i) {
            for (int j = 0; j < ra.n_im; ++j) {
                const complexd z = f.cvalues[i * ra.n_im + j];
                out << (j ? " " : "") << fmt17(z.real()) << " " << fmt17(z.imag());
            }
            out << "\n";
        }
        return out.str();
    }
    const int cols = f.grid.mode_b ? f.grid.mode_b->count() : ra.n_im;
    const int rows = static_cast<int>(f.values.size()) / cols;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j)
            out << (j ? " " : "") << fmt17(f.values[static_cast<std::size_t>(i) * cols + j]);
        out << "\n";
    }
    return out.str();
}

/// Long-form CSV of a field: one row per phase-space point.
inline std::string to_field_csv(const QuasiField& f) {
    std::ostringstream out;
    const PhaseRect& ra = f.grid.mode_a;
    if (f.is_complex()) {
        out << "re,im,value_re,value_im\n";
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j) {
                const complexd a = ra.point(i, j);
                const complexd v = f.cvalues[i * ra.n_im + j];
                out << fmt17(a.real()) << "," << fmt17(a.imag()) << "," << fmt17(v.real())
                    << "," << fmt17(v.imag()) << "\n";
            }
        return out.str();
    }
    if (!f.grid.mode_b) {
        out << "re,im,value\n";
        for (int i = 0; i < ra.n_re; ++i)
            for (int j = 0; j < ra.n_im; ++j) {
                const complexd a = ra.point(i, j);
                out << fmt17(a.real()) << "," << fmt17(a.imag()) << ","
                    << fmt17(f.values[i * ra.n_im + j]) << "\n";
            }
        return out.str();
    }
    const PhaseRect& rb = *f.grid.mode_b;
    out << "re1,im1,re2,im2,value\n";
    std::size_t idx = 0;
    for (int i = 0; i < ra.n_re; ++i)
        for (int j = 0; j < ra.n_im; ++j) {
            const complexd a = ra.point(i, j);
            for (int i2 = 0; i2 < rb.n_re; ++i2)
                for (int j2 = 0; j2 < rb.n_im; ++j2) {
                    const complexd b = rb.point(i2, j2);
                    out << fmt17(a.real()) << "," << fmt17(a.imag()) << "," << fmt17(b.real())
                        << "," << fmt17(b.imag()) << "," << fmt17(f.values[idx++]) << "\n";
                }
        }
    return out.str();
}

/// Re-reads a matrix file produced by to_matrix (round-trip support).
struct MatrixFile {
    std::map<std::string, std::string> meta;
    std::vector<double> axis_re, axis_im, axis2_re, axis2_im;
    std::vector<double> values;  // row-major, real fields only
};

inline MatrixFile parse_matrix(const std::string& text) {
    MatrixFile m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                std::string key = line.substr(2, colon - 2);
                std::string val = line.substr(colon + 1);
                while (!val.empty() && val.front() == ' ') val.erase(val.begin());
                m.meta[key] = val;
            }
            continue;
        }
        auto parse_axis = [&](const char* tag, std::vector<double>& out) {
            const std::string prefix = std::string(tag) + ":";
            if (line.rfind(prefix, 0) != 0) return false;
            std::istringstream vals(line.substr(prefix.size()));
            double v;
            while (vals >> v) out.push_back(v);
            return true;
        };
        if (parse_axis("axis_re", m.axis_re) || parse_axis("axis_im", m.axis_im) ||
            parse_axis("axis2_re", m.axis2_re) || parse_axis("axis2_im", m.axis2_im))
            continue;
        std::istringstream vals(line);
        double v;
        while (vals >> v) m.values.push_back(v);
    }
    return m;
}

/// One verification suite outcome.
struct VerifySuiteResult {
    enum class Status { Pass, Fail, Skip };
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    Status status = Status::Pass;
    std::string note;
};

struct VerifyReport {
    std::vector<VerifySuiteResult> suites;

    bool all_passed() const {
        for (const auto& s : suites)
            if (s.status == VerifySuiteResult::Status::Fail) return false;
        return true;
    }
};

namespace detail {

inline bool suite_selected(const std::string& suites, const char* name) {
    if (suites == "all") return true;
    std::istringstream in(suites);
    std::string item;
    while (std::getline(in, item, ','))
        if (item == name) return true;
    return false;
}

} // namespace detail

/// Runs the cross-module invariant suites.  CutoffExceeded refusals are
/// reported as skipped entries, not failures.
VerifyReport run_verify(const RunConfig& rc) {
    VerifyReport rep;
    std::mt19937 rng(rc.verify_seed);
    std::uniform_real_distribution<double> lam(0.0, 2.0), det(-1.0, 1.0), tdraw(0.0, 10.0);

    const std::vector<CouplerParams> figure_sets = {
        {0.25, 0.25, 1.0, 0.25}, {0.2, 0.2, 1.0, 0.2}, {0.17, 0.2, 1.0, 0.2},
        {0.17, 0.2, 1.0, 2.0}};

    if (detail::suite_selected(rc.verify_suites, "symplectic")) {
        VerifySuiteResult r;
        r.name = "symplectic";
        r.tolerance = 1e-9;
        double worst = 0.0;
        for (int i = 0; i < rc.verify_sets; ++i) {
            CouplerParams p{lam(rng), lam(rng), lam(rng), lam(rng),
                            det(rng), det(rng), 0.0,      0.0};
            for (int k = 0; k < 5; ++k)
                worst = std::max(worst, check_symplectic(evolution_coefficients(p, tdraw(rng))).max());
        }
        if (rc.verify_corrupt) {
            EvolutionCoefficients c = evolution_coefficients(figure_sets[0], 1.0);
            c.k1 += 0.1;
            worst = std::max(worst, check_symplectic(c).max());
            r.note = "corrupted-coefficient injection active";
        }
        r.max_residual = worst;
        r.status = worst < r.tolerance ? VerifySuiteResult::Status::Pass
                                       : VerifySuiteResult::Status::Fail;
        rep.suites.push_back(r);
    }

    if (detail::suite_selected(rc.verify_suites, "closed-vs-ode")) {
        VerifySuiteResult r;
        r.name = "closed-vs-ode";
        r.tolerance = 1e-8;
        double worst = 0.0;
        for (const auto& p : figure_sets)
            for (int k = 0; k <= 50; ++k) {
                const double t = M_PI * k / 50.0;
                const auto cf = evolution_coefficients(p, t);
                const auto od = ode_coefficients(p, t);
                for (auto [a, b] : {std::pair{cf.k1, od.k1}, {cf.l1, od.l1}, {cf.m1, od.m1},
                                    {cf.n1, od.n1}, {cf.k2, od.k2}, {cf.l2, od.l2},
                                    {cf.m2, od.m2}, {cf.n2, od.n2}})
                    worst = std::max(worst, std::abs(a - b));
            }
        r.max_residual = worst;
        r.status = worst < r.tolerance ? VerifySuiteResult::Status::Pass
                                       : VerifySuiteResult::Status::Fail;
        rep.suites.push_back(r);
    }

    if (detail::suite_selected(rc.verify_suites, "transform")) {
        VerifySuiteResult r;
        r.name = "closed-vs-transform";
        r.tolerance = 1e-5;
        double worst = 0.0;
        const auto c = evolution_coefficients(figure_sets[0], 1.0);
        PhaseSpaceGrid g;
        g.mode_a = PhaseRect{-2.5, 2.5, -2.5, 2.5, 15, 15};
        const std::vector<InputState> states = {Coherent{{0.5, 0.0}, {0.0, 0.3}},
                                                Thermal{0.5, 0.5}, Fock{1, 0}};
        for (const auto& st : states) {
            const auto ft = quasi_transform(c, st, Selection::single(1), 0.0, g);
            const auto fc = quasi_closed_form_field(c, st, Selection::single(1), 0.0, g);
            for (std::size_t i = 0; i < ft.values.size(); ++i)
                worst = std::max(worst, std::abs(ft.values[i] - fc.values[i]));
        }
        r.max_residual = worst;
        r.status = worst < r.tolerance ? VerifySuiteResult::Status::Pass
                                       : VerifySuiteResult::Status::Fail;
        rep.suites.push_back(r);
    }

    if (detail::suite_selected(rc.verify_suites, "oracle")) {
        VerifySuiteResult r;
        r.name = "analytic-vs-oracle";
        r.tolerance = 1e-4;
        double worst = 0.0;
        const CouplerParams& pA = figure_sets[0];
        const double t = 0.5;
        const auto c = evolution_coefficients(pA, t);
        try {
            FockPropagator prop(pA, 40);
            for (const InputState& st :
                 {InputState(Coherent{{0.5, 0.0}, {0.3, 0.0}}), InputState(Fock{1, 0}),
                  InputState(Thermal{0.5, 0.5})}) {
                const auto os = evolve_state(prop, st, t);
                for (int mode : {1, 2}) {
                    const auto om = oracle_moments(os, mode);
                    worst = std::max(worst, std::abs(om.mean - mean_photon(c, st, mode)));
                    worst =
                        std::max(worst, std::abs(om.variance - photon_variance(c, st, mode)));
                }
                const auto sq = squeezing(c, st);
                const auto o1 = oracle_moments(os, 1);
                worst = std::max(worst, std::abs(sq.s1 - o1.squeeze_s));
                worst = std::max(worst, std::abs(sq.q1 - o1.squeeze_q));
            }
            r.max_residual = worst;
            r.status = worst < r.tolerance ? VerifySuiteResult::Status::Pass
                                           : VerifySuiteResult::Status::Fail;
        } catch (const CutoffExceeded& e) {
            r.status = VerifySuiteResult::Status::Skip;
            r.note = std::string("CutoffExceeded: ") + e.what();
        }
        rep.suites.push_back(r);

        // amplifying regime at large t: the truncation cannot follow the
        // exponential growth and the oracle must refuse
        VerifySuiteResult ra;
        ra.name = "oracle-amplifying";
        ra.tolerance = 1e-4;
        try {
            FockPropagator prop(figure_sets[3], 24);
            const auto os = evolve_state(prop, InputState(Fock{1, 0}), 6.0);
            ra.max_residual = os.tail_mass;
            ra.status = VerifySuiteResult::Status::Fail;
            ra.note = "expected a truncation refusal but none occurred";
        } catch (const CutoffExceeded& e) {
            ra.status = VerifySuiteResult::Status::Skip;
            ra.note = std::string("CutoffExceeded: ") + e.what();
        }
        rep.suites.push_back(ra);
    }
    return rep;
}

inline std::string to_text(const VerifyReport& rep) {
    std::ostringstream out;
    for (const auto& s : rep.suites) {
        const char* tag = s.status == VerifySuiteResult::Status::Pass   ? "PASS"
                          : s.status == VerifySuiteResult::Status::Fail ? "FAIL"
                                                                        : "SKIP";
        out << tag << "  " << s.name;
        if (s.status != VerifySuiteResult::Status::Skip)
            out << "  max residual " << fmt17(s.max_residual) << " (tol " << fmt17(s.tolerance)
                << ")";
        if (!s.note.empty()) out << "  [" << s.note << "]";
        out << "\n";
    }
    return out.str();
}

/// Spectral data plus the coefficient table over the time grid.
inline std::string run_coeffs(const RunConfig& rc) {
    std::ostringstream out;
    const SpectralData sd = derive_spectral(rc.params);
    const Regime reg = classify_regime(sd);
    out << "# lambda_plus: " << fmt17(sd.lambda_plus) << "\n";
    out << "# lambda_minus: " << fmt17(sd.lambda_minus) << "\n";
    out << "# k_plus: " << fmt17(sd.k_plus) << "\n# k_minus: " << fmt17(sd.k_minus) << "\n";
    out << "# j_plus: " << fmt17(sd.j_plus) << "\n# j_minus: " << fmt17(sd.j_minus) << "\n";
    out << "# g1: " << fmt17(sd.g1) << "\n# g2: " << fmt17(sd.g2) << "\n";
    out << "# theta: " << fmt17(sd.theta.real()) << " " << fmt17(sd.theta.imag()) << "\n";
    out << "# omega1_sq: " << fmt17(sd.omega1_sq) << "\n# omega2_sq: " << fmt17(sd.omega2_sq)
        << "\n";
    out << "# omega_bar_1: " << fmt17(sd.omega_bar_1.real()) << " "
        << fmt17(sd.omega_bar_1.imag()) << "\n";
    out << "# omega_bar_2: " << fmt17(sd.omega_bar_2.real()) << " "
        << fmt17(sd.omega_bar_2.imag()) << "\n";
    out << "# regime: " << to_string(reg.tag) << " (" << reg.detail << ")\n";

    RunConfig scan = rc;
    scan.observables = {Observable::Coeffs};
    out << to_csv(run_scan(scan));
    return out.str();
}

} // namespace nlcoupler

#endif
