// Command-line driver: single-point analysis and simulation, sweeps from config files,
// localisation studies, and grid export.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "carbuncle/experiments.hpp"

namespace fs = std::filesystem;
using namespace carbuncle;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    // list-valued flags take comma-separated values and a:b[:step] ranges
    std::map<std::string, std::string> values;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "flat key = value experiment file")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)");
    const std::pair<const char*, const char*> keys[] = {
        {"m0", "upstream Mach number(s)"},
        {"epsilon", "shock position(s) along the Hugoniot curve"},
        {"solver", "roe, hll, hllc, vanleer, ausm+"},
        {"limiter", "superbee, vanleer, vanalbada, minmod"},
        {"order", "1, 2 or 1,2"},
        {"vars", "reconstruction variables: cons or prim"},
        {"form", "stability matrix variables: cons or prim"},
        {"grid", "cartesian, aspect or distorted"},
        {"nx", "cells in x"},
        {"ny", "cells in y"},
        {"alpha", "distortion angle(s) in degrees"},
        {"delta-aspect", "aspect ratio(s) dy/dx"},
        {"cfl", "CFL number"},
        {"seed", "perturbation seed"},
        {"t-end", "simulation end time"},
        {"strategy", "distortion layout: row-sawtooth, row-shear, column-sawtooth"},
        {"localization", "upstream, shock-structure, downstream"},
    };
    for (const auto& [name, help] : keys) {
        std::string key = name;
        std::replace(key.begin(), key.end(), '-', '_');
        cmd->add_option_function<std::string>(
            std::string("--") + name, [&f, key](const std::string& v) { f.values[key] = v; }, help);
    }
}

ExperimentSpec build_spec(const CommonFlags& f, const std::string& name, ExperimentMode mode)
{
    KeyValueConfig kv = f.config.empty() ? KeyValueConfig{} : KeyValueConfig::parse_file(f.config);
    if (!kv.has("name")) kv.set("name", name);
    for (const auto& [k, v] : f.values) kv.set(k, v);
    ExperimentSpec e = experiment_from_config(kv);
    // subcommands fix the mode; a sweep keeps the one in its file
    if (!(name == "sweep" && kv.has("mode"))) e.mode = mode;
    if (f.threads > 0) e.threads = f.threads;
    return e;
}

std::string show(const std::optional<double>& v)
{
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
}

void print_summary(const std::vector<ResultRecord>& recs)
{
    for (const ResultRecord& r : recs) {
        std::cout << r.key << "  max_real=" << show(r.max_real) << "  lambda_num=" << show(r.lambda_num);
        if (!r.fit_class.empty()) std::cout << " (" << r.fit_class << ")";
        if (!r.error.empty()) std::cout << "  ERROR: " << r.error;
        std::cout << '\n';
    }
}

int finish(const ExperimentSpec& e, const CommonFlags& f, const std::string& default_out)
{
    const std::vector<ResultRecord> recs = run_experiment(e);
    print_summary(recs);
    const fs::path out = f.out.empty() ? fs::path("results") / (e.name.empty() ? default_out : e.name) : fs::path(f.out);
    emit_plotdata(out, recs);
    std::cout << "wrote " << recs.size() << " record(s) to " << out.string() << '\n';
    int failures = 0;
    for (const auto& r : recs) failures += !r.error.empty();
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrix stability analysis of planar shocks captured by finite-volume Euler schemes"};
    app.require_subcommand(1);

    CommonFlags analyze_f, simulate_f, validate_f, sweep_f, localize_f, grid_f;
    bool spectra = false, modes = false;
    auto* analyze = app.add_subcommand("analyze", "eigenvalues of the stability matrix");
    add_common(analyze, analyze_f);
    analyze->add_flag("--spectra", spectra, "write the full spectrum per point");
    analyze->add_flag("--modes", modes, "write the leading eigenvector per point");

    bool fields = false;
    auto* simulate = app.add_subcommand("simulate", "perturbed time march and growth-rate fit");
    add_common(simulate, simulate_f);
    simulate->add_flag("--fields", fields, "write the final perturbed field");

    double tolerance = 0.15;
    auto* validate = app.add_subcommand("validate", "compare max_real with the fitted growth rate");
    add_common(validate, validate_f);
    validate->add_option("--tolerance", tolerance, "relative agreement required in unstable cases");

    auto* sweep = app.add_subcommand("sweep", "run an experiment file");
    add_common(sweep, sweep_f);

    auto* localize = app.add_subcommand("localize", "spectra with parts of the domain frozen");
    add_common(localize, localize_f);

    auto* grid = app.add_subcommand("grid-export", "write grid nodes and cell centres");
    add_common(grid, grid_f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            ExperimentSpec e = build_spec(analyze_f, "analyze", ExperimentMode::Analysis);
            e.write_spectra = e.write_spectra || spectra;
            e.write_modes = e.write_modes || modes;
            return finish(e, analyze_f, "analyze");
        }
        if (*simulate) {
            ExperimentSpec e = build_spec(simulate_f, "simulate", ExperimentMode::Simulation);
            e.write_histories = true;
            e.write_fields = e.write_fields || fields;
            return finish(e, simulate_f, "simulate");
        }
        if (*validate) {
            ExperimentSpec e = build_spec(validate_f, "validate", ExperimentMode::Both);
            if (validate->count("--tolerance")) e.lambda_tolerance = tolerance;
            e.write_histories = true;
            const std::vector<ResultRecord> recs = run_experiment(e);
            int bad = 0;
            for (const ResultRecord& r : recs) {
                if (!r.error.empty() || !r.max_real || !r.lambda_num) {
                    std::cout << r.key << "  ERROR: " << r.error << '\n';
                    ++bad;
                    continue;
                }
                const double mr = *r.max_real, ln = *r.lambda_num;
                const bool signs = (mr > 0.0) == (ln > 0.0);
                const bool close = mr <= 0.0 || std::abs(mr - ln) <= e.lambda_tolerance * std::abs(ln);
                std::cout << r.key << "  max_real=" << show(mr) << "  lambda_num=" << show(ln)
                          << (signs ? "  sign ok" : "  SIGN MISMATCH")
                          << (mr > 0.0 ? (close ? "  magnitude ok" : "  MAGNITUDE OFF") : "") << '\n';
                bad += !(signs && close);
            }
            const fs::path out = validate_f.out.empty() ? fs::path("results") / e.name : fs::path(validate_f.out);
            emit_plotdata(out, recs);
            std::cout << (bad ? "validation failed for " + std::to_string(bad) + " point(s)\n" : "validation passed\n");
            return bad ? 1 : 0;
        }
        if (*sweep) {
            if (sweep_f.config.empty()) throw std::invalid_argument("sweep needs --config FILE");
            ExperimentSpec e = build_spec(sweep_f, "sweep", ExperimentMode::Analysis);
            return finish(e, sweep_f, "sweep");
        }
        if (*localize) {
            ExperimentSpec e = build_spec(localize_f, "localize", ExperimentMode::Analysis);
            if (e.localization.empty())
                e.localization = {LocalizationKind::Upstream, LocalizationKind::ShockStructure,
                                  LocalizationKind::Downstream};
            e.write_spectra = true;
            e.write_modes = true;
            return finish(e, localize_f, "localize");
        }
        if (*grid) {
            ExperimentSpec e = build_spec(grid_f, "grid", ExperimentMode::Analysis);
            const fs::path out = grid_f.out.empty() ? fs::path("results") / "grid" : fs::path(grid_f.out);
            fs::create_directories(out);
            for (const SweepPoint& p : expand(e)) {
                const StructuredGrid g = make_grid(p.config.grid);
                std::ofstream nodes(out / ("nodes_" + p.key + ".csv"), std::ios::binary);
                g.write_nodes_csv(nodes);
                std::ofstream cells(out / ("cells_" + p.key + ".csv"), std::ios::binary);
                cells << "i,j,x,y,volume\n" << std::setprecision(17);
                for (int j = 0; j < g.ny(); ++j)
                    for (int i = 0; i < g.nx(); ++i) {
                        const Vec2 c = g.cell_center(i, j);
                        cells << i << ',' << j << ',' << c.x << ',' << c.y << ',' << g.volume(i, j) << '\n';
                    }
                std::cout << "wrote grid " << p.key << " to " << out.string() << '\n';
            }
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
