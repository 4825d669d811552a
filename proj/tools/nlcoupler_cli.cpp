// Command-line front end: time scans, phase-space grids, coefficient dumps
// and the oracle-verification suites.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nlcoupler/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string output_path;
    std::string format;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file");
    cmd->add_option("--output", opts.output_path, "output path (default: stdout)");
    cmd->add_option("--format", opts.format, "output format: csv or matrix");
    cmd->add_option("--override", opts.overrides, "override a config key, key=value")
        ->take_all();
}

nlcoupler::RunConfig load(const CommonOpts& opts) {
    nlcoupler::KeyValueConfig cfg =
        opts.config_path.empty() ? nlcoupler::KeyValueConfig::parse_string("", "<defaults>")
                                 : nlcoupler::KeyValueConfig::parse_file(opts.config_path);
    for (const auto& kv : opts.overrides) cfg.apply_override(kv);
    nlcoupler::RunConfig rc = nlcoupler::RunConfig::from_config(cfg);
    if (!opts.format.empty()) {
        if (opts.format != "csv" && opts.format != "matrix")
            throw nlcoupler::ConfigError("--format must be csv or matrix");
        rc.format = opts.format;
    }
    return rc;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nlcoupler::ConfigError("cannot open output file '" + path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact quantum statistics of a two-waveguide nonlinear coupler"};
    app.require_subcommand(1);

    CommonOpts scan_opts, grid_opts, verify_opts, coeffs_opts;
    CLI::App* scan = app.add_subcommand("scan", "time scan of requested observables (CSV)");
    add_common(scan, scan_opts);
    CLI::App* grid = app.add_subcommand("grid", "phase-space field at one time (matrix)");
    add_common(grid, grid_opts);
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
    add_common(verify, verify_opts);
    CLI::App* coeffs = app.add_subcommand("coeffs", "dump spectral data and K/L/M/N");
    add_common(coeffs, coeffs_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (scan->parsed()) {
            const auto rc = load(scan_opts);
            emit(nlcoupler::to_csv(nlcoupler::run_scan(rc)), scan_opts.output_path);
        } else if (grid->parsed()) {
            const auto rc = load(grid_opts);
            const nlcoupler::QuasiField f = nlcoupler::run_grid(rc);
            emit(rc.format == "csv" ? nlcoupler::to_field_csv(f) : nlcoupler::to_matrix(f),
                 grid_opts.output_path);
        } else if (coeffs->parsed()) {
            const auto rc = load(coeffs_opts);
            emit(nlcoupler::run_coeffs(rc), coeffs_opts.output_path);
        } else if (verify->parsed()) {
            const auto rc = load(verify_opts);
            const auto rep = nlcoupler::run_verify(rc);
            emit(nlcoupler::to_text(rep), verify_opts.output_path);
            if (!rep.all_passed()) return 2;
        }
    } catch (const nlcoupler::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const nlcoupler::PNotRepresentable& e) {
        std::fprintf(stderr, "numeric refusal: %s\n", e.what());
        return 3;
    } catch (const nlcoupler::TruncatedTransform& e) {
        std::fprintf(stderr, "numeric refusal: %s\n", e.what());
        return 3;
    } catch (const nlcoupler::CutoffExceeded& e) {
        std::fprintf(stderr, "numeric refusal: %s\n", e.what());
        return 3;
    } catch (const nlcoupler::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
