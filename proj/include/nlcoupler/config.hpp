#ifndef NLCOUPLER_CONFIG_HPP
#define NLCOUPLER_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlcoupler/errors.hpp"
#include "nlcoupler/params.hpp"
#include "nlcoupler/quasiprob.hpp"
#include "nlcoupler/states.hpp"

namespace nlcoupler {

/// Flat dotted-key configuration file: one `section.key = value` per line,
/// `#` starts a comment.  Accessors record which keys were consumed so that
/// unknown keys can be reported with their line numbers.
class KeyValueConfig {
public:
    static KeyValueConfig parse_string(const std::string& text,
                                       const std::string& name = "<config>") {
        KeyValueConfig cfg;
        cfg.name_ = name;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + trimmed + "'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
            cfg.entries_[key] = Entry{value, lineno, false};
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream all;
        all << in.rdbuf();
        return parse_string(all.str(), path);
    }

    void set(const std::string& key, const std::string& value) {
        entries_[key] = Entry{value, 0, false};
    }

    /// Applies a repeatable `key=value` override.
    void apply_override(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + kv + "' is not of the form key=value");
        set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt = "") const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.used = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(diag(key, it->second) + ": expected a number, got '" +
                              it->second.value + "'");
        }
    }

    int get_int(const std::string& key, int dflt) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const int v = std::stoi(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(diag(key, it->second) + ": expected an integer, got '" +
                              it->second.value + "'");
        }
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.used = true;
        const std::string& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(diag(key, it->second) + ": expected a boolean, got '" + v + "'");
    }

    /// Reports any key that was never consumed (typo detection).
    void reject_unused() const {
        for (const auto& [key, e] : entries_)
            if (!e.used)
                throw ConfigError(diag(key, e) + ": unknown configuration key '" + key + "'");
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    std::string diag(const std::string& key, const Entry& e) const {
        return name_ + ":" + std::to_string(e.line) + ": key '" + key + "'";
    }

    static std::string trim(const std::string& s) {
        auto b = s.begin(), e = s.end();
        while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
        while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
        return std::string(b, e);
    }

    std::map<std::string, Entry> entries_;
    std::string name_;
};

enum class Observable { Coeffs, Spectral, Squeezing, G2, Mean, Variance, Wigner, QFunc, PFunc, CharFn };

struct TimeGrid {
    double t_min = 0.0;
    double t_max = 4.0;
    int steps = 400;  // number of rows; t_k = t_min + k (t_max-t_min)/(steps-1)

    void validate() const {
        if (!(t_max > t_min) || steps < 2 || !std::isfinite(t_min) || !std::isfinite(t_max))
            throw ConfigError("time grid must be strictly increasing with at least 2 steps");
    }
    double at(int k) const { return t_min + k * (t_max - t_min) / (steps - 1); }
};

/// One fully-specified run.
struct RunConfig {
    CouplerParams params;
    InputState state = Coherent{};
    TimeGrid time_grid;
    std::vector<Observable> observables{Observable::Squeezing};
    PhaseSpaceGrid grid;
    Selection sel = Selection::single(1);
    double s = 0.0;          // ordering for grid/charfn output
    double grid_time = 0.0;  // evaluation time for grid output
    std::string format;      // csv | matrix (empty: command default)

    // verification options
    unsigned verify_seed = 20240801u;
    int verify_sets = 300;
    bool verify_corrupt = false;
    std::string verify_suites = "all";

    static Observable parse_observable(const std::string& name) {
        if (name == "coeffs") return Observable::Coeffs;
        if (name == "spectral") return Observable::Spectral;
        if (name == "squeezing") return Observable::Squeezing;
        if (name == "g2") return Observable::G2;
        if (name == "mean") return Observable::Mean;
        if (name == "variance") return Observable::Variance;
        if (name == "wigner") return Observable::Wigner;
        if (name == "qfunc") return Observable::QFunc;
        if (name == "pfunc") return Observable::PFunc;
        if (name == "charfn") return Observable::CharFn;
        throw ConfigError("unknown observable '" + name + "'");
    }

    static RunConfig from_config(const KeyValueConfig& cfg) {
        RunConfig rc;
        rc.params.lambda1 = cfg.get_double("params.lambda1", 0.0);
        rc.params.lambda2 = cfg.get_double("params.lambda2", 0.0);
        rc.params.lambda3 = cfg.get_double("params.lambda3", 0.0);
        rc.params.lambda4 = cfg.get_double("params.lambda4", 0.0);
        rc.params.omega1 = cfg.get_double("params.omega1", 0.0);
        rc.params.omega2 = cfg.get_double("params.omega2", 0.0);
        rc.params.mu1 = cfg.get_double("params.mu1", 0.0);
        rc.params.mu2 = cfg.get_double("params.mu2", 0.0);
        rc.params.validate();

        const std::string kind = cfg.get_string("state.kind", "coherent");
        if (kind == "coherent") {
            rc.state = Coherent{{cfg.get_double("state.alpha1_re", 0.0),
                                 cfg.get_double("state.alpha1_im", 0.0)},
                                {cfg.get_double("state.alpha2_re", 0.0),
                                 cfg.get_double("state.alpha2_im", 0.0)}};
        } else if (kind == "fock") {
            rc.state = Fock{cfg.get_int("state.n", 0), cfg.get_int("state.m", 0)};
        } else if (kind == "thermal") {
            rc.state = Thermal{cfg.get_double("state.nbar1", 0.0),
                               cfg.get_double("state.nbar2", 0.0)};
        } else {
            throw ConfigError("state.kind must be coherent, fock or thermal, got '" + kind +
                              "'");
        }
        validate(rc.state);

        rc.time_grid.t_min = cfg.get_double("scan.t_min", 0.0);
        rc.time_grid.t_max = cfg.get_double("scan.t_max", 4.0);
        rc.time_grid.steps = cfg.get_int("scan.steps", 400);
        rc.time_grid.validate();

        if (cfg.has("scan.observables")) {
            rc.observables.clear();
            std::istringstream obs(cfg.get_string("scan.observables", ""));
            std::string item;
            while (std::getline(obs, item, ','))
                if (!item.empty()) rc.observables.push_back(parse_observable(item));
            if (rc.observables.empty()) throw ConfigError("scan.observables is empty");
        }

        rc.grid.mode_a.re_min = cfg.get_double("grid.re_min", -3.0);
        rc.grid.mode_a.re_max = cfg.get_double("grid.re_max", 3.0);
        rc.grid.mode_a.im_min = cfg.get_double("grid.im_min", -3.0);
        rc.grid.mode_a.im_max = cfg.get_double("grid.im_max", 3.0);
        rc.grid.mode_a.n_re = cfg.get_int("grid.n_re", 61);
        rc.grid.mode_a.n_im = cfg.get_int("grid.n_im", 61);
        const std::string mode = cfg.get_string("grid.mode", "1");
        if (mode == "joint") {
            rc.sel = Selection::both();
            PhaseRect rb;
            rb.re_min = cfg.get_double("grid2.re_min", rc.grid.mode_a.re_min);
            rb.re_max = cfg.get_double("grid2.re_max", rc.grid.mode_a.re_max);
            rb.im_min = cfg.get_double("grid2.im_min", rc.grid.mode_a.im_min);
            rb.im_max = cfg.get_double("grid2.im_max", rc.grid.mode_a.im_max);
            rb.n_re = cfg.get_int("grid2.n_re", 9);
            rb.n_im = cfg.get_int("grid2.n_im", 9);
            rc.grid.mode_b = rb;
        } else if (mode == "1" || mode == "2") {
            rc.sel = Selection::single(mode == "1" ? 1 : 2);
        } else {
            throw ConfigError("grid.mode must be 1, 2 or joint, got '" + mode + "'");
        }
        rc.s = cfg.get_double("grid.s", 0.0);
        if (!(rc.s >= -1.0 && rc.s <= 1.0))
            throw ConfigError("grid.s must lie in [-1, 1]");
        rc.grid_time = cfg.get_double("grid.t", 0.0);
        if (!std::isfinite(rc.grid_time)) throw ConfigError("grid.t must be finite");

        rc.format = cfg.get_string("output.format", "");
        if (!rc.format.empty() && rc.format != "csv" && rc.format != "matrix")
            throw ConfigError("output.format must be csv or matrix");

        rc.verify_seed = static_cast<unsigned>(cfg.get_int("verify.seed", 20240801));
        rc.verify_sets = cfg.get_int("verify.sets", 300);
        rc.verify_corrupt = cfg.get_bool("verify.inject_corruption", false);
        rc.verify_suites = cfg.get_string("verify.suites", "all");

        cfg.reject_unused();
        return rc;
    }
};

} // namespace nlcoupler

#endif
