#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "carbuncle/stability.hpp"

namespace carbuncle {

/// Flat `key = value` configuration text; `#` starts a comment, blank lines are ignored.
/// Later keys override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>")
    {
        KeyValueConfig cfg;
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(origin + ":" + std::to_string(number) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw std::invalid_argument(origin + ":" + std::to_string(number) + ": empty key");
            cfg.values_[key] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    static KeyValueConfig parse_string(const std::string& text)
    {
        std::istringstream in(text);
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key, const std::string& fallback) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const
    {
        return has(key) ? to_double(key, values_.at(key)) : fallback;
    }

    long get_long(const std::string& key, long fallback) const
    {
        if (!has(key)) return fallback;
        const double v = to_double(key, values_.at(key));
        if (v != std::floor(v)) throw std::invalid_argument("config key '" + key + "' must be an integer");
        return static_cast<long>(v);
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const std::string v = values_.at(key);
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + v + "'");
    }

    /// Comma-separated list; numeric items may be ranges `a:b` (step 1) or `a:b:step`.
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const
    {
        if (!has(key)) return fallback;
        std::vector<std::string> out;
        std::stringstream ss(values_.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        if (out.empty()) throw std::invalid_argument("config key '" + key + "' is an empty list");
        return out;
    }

    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const
    {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const std::string& item : get_list(key, {})) {
            std::vector<std::string> parts;
            std::stringstream ss(item);
            std::string p;
            while (std::getline(ss, p, ':')) parts.push_back(trim(p));
            if (parts.size() == 1) {
                out.push_back(to_double(key, parts[0]));
                continue;
            }
            if (parts.size() > 3) throw std::invalid_argument("config key '" + key + "': bad range '" + item + "'");
            const double a = to_double(key, parts[0]), b = to_double(key, parts[1]);
            const double step = parts.size() == 3 ? to_double(key, parts[2]) : 1.0;
            if (!(step > 0.0) || b < a) throw std::invalid_argument("config key '" + key + "': bad range '" + item + "'");
            const long n = std::lround(std::floor((b - a) / step + 1e-9));
            for (long k = 0; k <= n; ++k) out.push_back(a + k * step);
        }
        return out;
    }

private:
    static std::string trim(const std::string& s)
    {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static double to_double(const std::string& key, const std::string& v)
    {
        size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != v.size() || v.empty())
            throw std::invalid_argument("config key '" + key + "' expects a number, got '" + v + "'");
        return d;
    }

    std::map<std::string, std::string> values_;
};

enum class ExperimentMode { Analysis, Simulation, Both };

inline std::string to_string(ExperimentMode m)
{
    switch (m) {
    case ExperimentMode::Analysis: return "analysis";
    case ExperimentMode::Simulation: return "simulation";
    case ExperimentMode::Both: return "both";
    }
    return "?";
}

inline ExperimentMode parse_experiment_mode(const std::string& s)
{
    if (s == "analysis") return ExperimentMode::Analysis;
    if (s == "simulation") return ExperimentMode::Simulation;
    if (s == "both") return ExperimentMode::Both;
    throw std::invalid_argument("unknown experiment mode '" + s + "'");
}

inline LocalizationKind parse_localization(const std::string& s)
{
    if (s == "upstream") return LocalizationKind::Upstream;
    if (s == "downstream") return LocalizationKind::Downstream;
    if (s == "shock-structure" || s == "shock") return LocalizationKind::ShockStructure;
    throw std::invalid_argument("unknown localization case '" + s + "'");
}

/// A sweep: the cartesian product of the parameter lists applied on top of `base`.
struct ExperimentSpec {
    std::string name = "experiment";
    ExperimentMode mode = ExperimentMode::Analysis;
    SteadyShockConfig base;
    StabilityOptions stability;

    std::vector<double> m0_list{20.0};
    std::vector<double> eps_list{0.1};
    std::vector<RiemannSolverKind> solvers{RiemannSolverKind::Roe};
    std::vector<LimiterKind> limiters{LimiterKind::VanAlbada};   // None = first order
    std::vector<double> aspect_list{1.0};
    std::vector<double> alpha_list{0.0};
    std::vector<LocalizationKind> localization;   // empty: whole domain

    bool write_spectra = false;
    bool write_modes = false;
    bool write_histories = false;
    bool write_fields = false;       // final perturbed field of each simulation
    int threads = 0;                 // 0: hardware concurrency
    double lambda_tolerance = 0.15;  // relative max_real vs lambda_num agreement
    double budget_seconds = 0.0;     // declared runtime budget, 0 = none
};

/// Reads an experiment from flat key/value text. Unknown keys are rejected.
inline ExperimentSpec experiment_from_config(const KeyValueConfig& kv)
{
    static const std::vector<std::string> known = {
        "name", "mode", "m0", "epsilon", "solver", "limiter", "order", "vars", "form", "grid", "nx", "ny", "dx",
        "delta_aspect", "alpha", "strategy", "shock_cell", "cfl", "seed", "perturbation", "t_end", "steady_tol",
        "steady_max_steps", "quasi_steady_tol", "mass_flux_fix", "mass_flux_fix_kind", "frozen_zero_floor",
        "exclude_steady_family", "neutral_tol", "zero_ghost_perturbation", "localization", "spectra", "modes",
        "histories", "fields", "threads", "lambda_tolerance", "budget_seconds", "fit_slope_band", "fit_min_growth_decades",
        "fit_min_decay_decades", "fit_noise_floor", "roe_entropy_fix", "ausm_alpha", "ausm_beta", "gamma"};
    for (const auto& [k, v] : kv.values())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw std::invalid_argument("unknown config key '" + k + "'");

    ExperimentSpec e;
    e.name = kv.get("name", e.name);
    e.mode = parse_experiment_mode(kv.get("mode", "analysis"));
    SteadyShockConfig& b = e.base;
    b.gas.gamma = kv.get_double("gamma", b.gas.gamma);
    b.grid.kind = parse_grid_kind(kv.get("grid", "cartesian"));
    b.grid.nx = static_cast<int>(kv.get_long("nx", b.grid.nx));
    b.grid.ny = static_cast<int>(kv.get_long("ny", b.grid.ny));
    b.grid.dx = kv.get_double("dx", b.grid.dx);
    b.grid.strategy = parse_distortion_strategy(kv.get("strategy", to_string(b.grid.strategy)));
    if (kv.has("shock_cell")) b.shock_cell = static_cast<int>(kv.get_long("shock_cell", 0));
    b.muscl.vars = parse_reconstruction_variables(kv.get("vars", to_string(b.muscl.vars)));
    b.cfl = kv.get_double("cfl", b.cfl);
    b.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(b.seed)));
    b.perturbation = kv.get_double("perturbation", b.perturbation);
    b.t_end = kv.get_double("t_end", b.t_end);
    b.steady_tol = kv.get_double("steady_tol", b.steady_tol);
    b.steady_max_steps = kv.get_long("steady_max_steps", b.steady_max_steps);
    b.quasi_steady_tol = kv.get_double("quasi_steady_tol", b.quasi_steady_tol);
    b.mass_flux_fix = parse_fix_mode(kv.get("mass_flux_fix", "auto"));
    b.mass_flux_fix_kind = parse_mass_flux_fix_kind(kv.get("mass_flux_fix_kind", to_string(b.mass_flux_fix_kind)));
    b.flux.roe_entropy_fix = kv.get_bool("roe_entropy_fix", b.flux.roe_entropy_fix);
    b.flux.ausm_alpha = kv.get_double("ausm_alpha", b.flux.ausm_alpha);
    b.flux.ausm_beta = kv.get_double("ausm_beta", b.flux.ausm_beta);
    b.fit.slope_band = kv.get_double("fit_slope_band", b.fit.slope_band);
    b.fit.min_growth_decades = kv.get_double("fit_min_growth_decades", b.fit.min_growth_decades);
    b.fit.min_decay_decades = kv.get_double("fit_min_decay_decades", b.fit.min_decay_decades);
    b.fit.noise_floor = kv.get_double("fit_noise_floor", b.fit.noise_floor);

    e.stability.form = parse_matrix_form(kv.get("form", to_string(e.stability.form)));
    e.stability.frozen_zero_floor = kv.get_double("frozen_zero_floor", e.stability.frozen_zero_floor);
    e.stability.exclude_steady_family = kv.get_bool("exclude_steady_family", e.stability.exclude_steady_family);
    e.stability.neutral_tol = kv.get_double("neutral_tol", e.stability.neutral_tol);
    e.stability.zero_ghost_perturbation = kv.get_bool("zero_ghost_perturbation", e.stability.zero_ghost_perturbation);

    e.m0_list = kv.get_doubles("m0", e.m0_list);
    e.eps_list = kv.get_doubles("epsilon", e.eps_list);
    e.aspect_list = kv.get_doubles("delta_aspect", e.aspect_list);
    e.alpha_list = kv.get_doubles("alpha", e.alpha_list);
    if (kv.has("solver")) {
        e.solvers.clear();
        for (const auto& s : kv.get_list("solver", {})) e.solvers.push_back(parse_riemann_solver(s));
    }
    if (kv.has("limiter") || kv.has("order")) {
        // order = 1 adds the first-order scheme, order = 2 the listed limiters
        const auto limiters = kv.get_list("limiter", {"vanalbada"});
        const auto orders = kv.get_doubles("order", {2.0});
        e.limiters.clear();
        for (double o : orders) {
            if (o == 1.0)
                e.limiters.push_back(LimiterKind::None);
            else if (o == 2.0)
                for (const auto& l : limiters) e.limiters.push_back(parse_limiter(l));
            else
                throw std::invalid_argument("order must be 1 or 2");
        }
    }
    if (kv.has("localization"))
        for (const auto& s : kv.get_list("localization", {})) e.localization.push_back(parse_localization(s));
    e.write_spectra = kv.get_bool("spectra", e.write_spectra);
    e.write_modes = kv.get_bool("modes", e.write_modes);
    e.write_histories = kv.get_bool("histories", e.write_histories);
    e.write_fields = kv.get_bool("fields", e.write_fields);
    e.threads = static_cast<int>(kv.get_long("threads", e.threads));
    e.lambda_tolerance = kv.get_double("lambda_tolerance", e.lambda_tolerance);
    e.budget_seconds = kv.get_double("budget_seconds", e.budget_seconds);
    return e;
}

/// One sweep point, fully resolved.
struct SweepPoint {
    std::string key;
    SteadyShockConfig config;
    std::optional<LocalizationKind> localization;
};

inline std::string format_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

inline std::string point_key(const SteadyShockConfig& c, const std::optional<LocalizationKind>& loc)
{
    // zero-padded numbers so lexical order follows numeric order
    auto num = [](double v) {
        std::ostringstream os;
        os << (v < 0 ? "-" : "+") << std::setw(9) << std::setfill('0') << std::fixed << std::setprecision(4)
           << std::abs(v);
        return os.str();
    };
    std::ostringstream os;
    os << "m0" << num(c.m0) << "_eps" << num(c.epsilon) << '_' << to_string(c.solver) << '_'
       << to_string(c.muscl.limiter) << "_d" << num(c.grid.aspect) << "_a" << num(c.grid.alpha_deg);
    if (loc) os << '_' << to_string(*loc);
    return os.str();
}

inline std::vector<SweepPoint> expand(const ExperimentSpec& e)
{
    std::vector<SweepPoint> pts;
    std::vector<std::optional<LocalizationKind>> locs;
    if (e.localization.empty())
        locs.push_back(std::nullopt);
    else
        for (auto l : e.localization) locs.emplace_back(l);
    for (double m0 : e.m0_list)
        for (double eps : e.eps_list)
            for (auto solver : e.solvers)
                for (auto lim : e.limiters)
                    for (double d : e.aspect_list)
                        for (double a : e.alpha_list)
                            for (const auto& loc : locs) {
                                SteadyShockConfig c = e.base;
                                c.m0 = m0;
                                c.epsilon = eps;
                                c.solver = solver;
                                c.muscl.limiter = lim;
                                c.grid.aspect = d;
                                c.grid.alpha_deg = a;
                                if (a != 0.0) c.grid.kind = GridKind::Distorted;
                                pts.push_back({point_key(c, loc), c, loc});
                            }
    std::sort(pts.begin(), pts.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.key < b.key; });
    return pts;
}

/// Outcome of one sweep point. Wall time is kept apart from the deterministic fields.
struct ResultRecord {
    std::string key;
    std::map<std::string, std::string> config;   // full echo
    std::optional<double> max_real;
    std::optional<double> max_real_all;
    std::optional<std::complex<double>> leading;
    std::optional<double> lambda_num;
    std::string fit_class;
    double fit_r2 = 0.0;
    double fit_t_begin = 0.0, fit_t_end = 0.0;
    bool fit_trend_fallback = false;
    bool simulation_broke_down = false;
    long presolve_steps = 0;
    double presolve_residual = 0.0;
    bool quasi_steady = false;
    bool started_from_first_order = false;
    bool mass_flux_fix = false;
    double mean_residual = 0.0;
    long first_order_fallbacks = 0;
    int excluded_neutral = 0;
    std::string error;
    double wall_seconds = 0.0;

    // bulky outputs, written to side files when requested
    std::vector<std::complex<double>> eigenvalues;
    std::optional<UnstableMode> mode;
    std::vector<ErrorSample> history;
    std::shared_ptr<const StructuredGrid> grid;
    std::shared_ptr<const FieldState> final_field;
    GasModel gas;
};

inline std::map<std::string, std::string> config_echo(const SteadyShockConfig& c, const StabilityOptions& s,
                                                      const std::optional<LocalizationKind>& loc)
{
    std::map<std::string, std::string> m;
    m["m0"] = format_number(c.m0);
    m["epsilon"] = format_number(c.epsilon);
    m["solver"] = to_string(c.solver);
    m["limiter"] = to_string(c.muscl.limiter);
    m["order"] = c.muscl.second_order() ? "2" : "1";
    m["vars"] = to_string(c.muscl.vars);
    m["form"] = to_string(s.form);
    m["grid"] = to_string(c.grid.kind);
    m["nx"] = std::to_string(c.grid.nx);
    m["ny"] = std::to_string(c.grid.ny);
    m["dx"] = format_number(c.grid.dx);
    m["delta_aspect"] = format_number(c.grid.aspect);
    m["alpha"] = format_number(c.grid.alpha_deg);
    m["strategy"] = to_string(c.grid.strategy);
    m["shock_cell"] = std::to_string(c.shock_index());
    m["cfl"] = format_number(c.cfl);
    m["seed"] = std::to_string(c.seed);
    m["perturbation"] = format_number(c.perturbation);
    m["t_end"] = format_number(c.t_end);
    m["steady_tol"] = format_number(c.steady_tol);
    m["mass_flux_fix"] = to_string(c.mass_flux_fix);
    m["mass_flux_fix_kind"] = to_string(c.mass_flux_fix_kind);
    m["gamma"] = format_number(c.gas.gamma);
    m["roe_entropy_fix"] = c.flux.roe_entropy_fix ? "true" : "false";
    m["ausm_alpha"] = format_number(c.flux.ausm_alpha);
    m["ausm_beta"] = format_number(c.flux.ausm_beta);
    m["frozen_zero_floor"] = format_number(s.frozen_zero_floor);
    m["exclude_steady_family"] = s.exclude_steady_family ? "true" : "false";
    m["localization"] = loc ? to_string(*loc) : "none";
    return m;
}

/// Runs a single point; exceptions are captured in the record.
inline ResultRecord run_point(const SweepPoint& p, const ExperimentSpec& e)
{
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord r;
    r.key = p.key;
    r.config = config_echo(p.config, e.stability, p.localization);
    r.gas = p.config.gas;
    try {
        const Profile1D profile = solve_1d_steady(p.config);
        r.presolve_steps = profile.steps;
        r.presolve_residual = profile.residual;
        r.quasi_steady = profile.quasi_steady;
        r.started_from_first_order = profile.started_from_first_order;
        r.mass_flux_fix = profile.mass_flux_fix;
        if (e.mode != ExperimentMode::Simulation) {
            const bool want_mode = e.write_modes;
            AnalysisResult a = p.localization
                                   ? analyze_localization(p.config, *p.localization, e.stability, want_mode, &profile)
                                   : analyze(p.config, e.stability, want_mode, &profile);
            r.max_real = a.spectrum.max_real;
            r.max_real_all = a.spectrum.max_real_all;
            r.leading = a.spectrum.eigenvalues[a.spectrum.argmax];
            r.mean_residual = a.mean_residual;
            r.excluded_neutral = static_cast<int>(a.spectrum.excluded.size());
            if (e.write_spectra) r.eigenvalues = a.spectrum.eigenvalues;
            r.mode = std::move(a.mode);
            r.grid = std::make_shared<const StructuredGrid>(make_grid(p.config.grid));
        }
        if (e.mode != ExperimentMode::Analysis) {
            if (p.localization) throw std::invalid_argument("localization cases are analysis-only");
            SimulationResult s = run_simulation(p.config);
            const GrowthFit& f = s.history.fitted;
            r.lambda_num = f.lambda_num;
            r.fit_class = to_string(f.classification);
            r.fit_r2 = f.r2;
            r.fit_t_begin = f.t_begin;
            r.fit_t_end = f.t_end;
            r.fit_trend_fallback = f.trend_fallback;
            r.simulation_broke_down = s.broke_down;
            r.first_order_fallbacks = s.march.counters.first_order_fallbacks;
            if (e.write_histories) r.history = std::move(s.history.samples);
            if (e.write_fields) r.final_field = std::make_shared<const FieldState>(std::move(s.final_field));
        }
    } catch (const std::exception& ex) {
        r.error = ex.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Runs every sweep point on a worker pool; records come back sorted by key.
inline std::vector<ResultRecord> run_experiment(const ExperimentSpec& e,
                                                const std::function<void(const ResultRecord&)>& progress = {})
{
    const std::vector<SweepPoint> pts = expand(e);
    std::vector<ResultRecord> out(pts.size());
    std::atomic<size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (size_t k = next++; k < pts.size(); k = next++) {
            out[k] = run_point(pts[k], e);
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(out[k]);
            }
        }
    };
    int n = e.threads > 0 ? e.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n = std::min<int>(n, static_cast<int>(std::max<size_t>(pts.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

namespace detail {

inline std::string csv_number(const std::optional<double>& v)
{
    if (!v) return "";
    std::ostringstream os;
    os << std::setprecision(12) << *v;
    return os.str();
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    return out + "\"";
}

} // namespace detail

inline void write_spectrum_csv(std::ostream& os, const std::vector<std::complex<double>>& ev)
{
    os << "re,im\n" << std::setprecision(17);
    for (const auto& z : ev) os << z.real() << ',' << z.imag() << '\n';
}

/// Mode fields per cell in primitive variables: i, j, x, y, then |.|, Re, Im of rho, u, v, p.
inline void write_mode_csv(std::ostream& os, const UnstableMode& m, const StructuredGrid& grid)
{
    os << "i,j,x,y,rho_abs,rho_re,rho_im,u_abs,u_re,u_im,v_abs,v_re,v_im,p_abs,p_re,p_im\n" << std::setprecision(12);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            const Vec2 c = grid.cell_center(i, j);
            os << i << ',' << j << ',' << c.x << ',' << c.y;
            for (int k = 0; k < 4; ++k) {
                const auto z = m.primitive[k][static_cast<size_t>(j) * m.nx + i];
                os << ',' << std::abs(z) << ',' << z.real() << ',' << z.imag();
            }
            os << '\n';
        }
}

inline const std::vector<std::string>& results_columns()
{
    static const std::vector<std::string> cols = {
        "key", "m0", "epsilon", "solver", "limiter", "order", "vars", "form", "grid", "nx", "ny", "delta_aspect",
        "alpha", "localization", "max_real", "max_real_all", "lead_re", "lead_im", "lambda_num", "fit_class",
        "fit_r2", "fit_t_begin", "fit_t_end", "fit_trend_fallback", "mass_flux_fix", "presolve_steps",
        "presolve_residual", "quasi_steady", "started_from_first_order", "mean_residual", "excluded_neutral",
        "first_order_fallbacks", "simulation_broke_down", "error"};
    return cols;
}

/// Deterministic sweep table (no wall times).
inline void write_results_csv(std::ostream& os, const std::vector<ResultRecord>& recs)
{
    const auto& cols = results_columns();
    for (size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
    os << '\n';
    auto b = [](bool v) { return std::string(v ? "1" : "0"); };
    for (const ResultRecord& r : recs) {
        const auto& c = r.config;
        std::vector<std::string> row = {
            r.key, c.at("m0"), c.at("epsilon"), c.at("solver"), c.at("limiter"), c.at("order"), c.at("vars"),
            c.at("form"), c.at("grid"), c.at("nx"), c.at("ny"), c.at("delta_aspect"), c.at("alpha"),
            c.at("localization"), detail::csv_number(r.max_real), detail::csv_number(r.max_real_all),
            detail::csv_number(r.leading ? std::optional<double>(r.leading->real()) : std::nullopt),
            detail::csv_number(r.leading ? std::optional<double>(r.leading->imag()) : std::nullopt),
            detail::csv_number(r.lambda_num), r.fit_class,
            r.lambda_num ? detail::csv_number(r.fit_r2) : "",
            r.lambda_num ? detail::csv_number(r.fit_t_begin) : "",
            r.lambda_num ? detail::csv_number(r.fit_t_end) : "", b(r.fit_trend_fallback), b(r.mass_flux_fix),
            std::to_string(r.presolve_steps), detail::csv_number(r.presolve_residual), b(r.quasi_steady),
            b(r.started_from_first_order), detail::csv_number(r.mean_residual), std::to_string(r.excluded_neutral),
            std::to_string(r.first_order_fallbacks), b(r.simulation_broke_down), detail::csv_escape(r.error)};
        for (size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
        os << '\n';
    }
}

inline nlohmann::ordered_json record_json(const ResultRecord& r)
{
    nlohmann::ordered_json j;
    j["key"] = r.key;
    j["config"] = r.config;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    j["max_real"] = opt(r.max_real);
    j["max_real_all"] = opt(r.max_real_all);
    j["leading_eigenvalue"] = r.leading ? nlohmann::ordered_json{{"re", r.leading->real()}, {"im", r.leading->imag()}}
                                        : nlohmann::ordered_json();
    j["lambda_num"] = opt(r.lambda_num);
    if (r.lambda_num)
        j["fit"] = {{"class", r.fit_class},      {"r2", r.fit_r2},
                    {"t_begin", r.fit_t_begin},  {"t_end", r.fit_t_end},
                    {"trend_fallback", r.fit_trend_fallback}, {"broke_down", r.simulation_broke_down}};
    j["presolve"] = {{"steps", r.presolve_steps},
                     {"residual", r.presolve_residual},
                     {"quasi_steady", r.quasi_steady},
                     {"started_from_first_order", r.started_from_first_order},
                     {"mass_flux_fix", r.mass_flux_fix}};
    j["mean_residual"] = r.mean_residual;
    j["excluded_neutral"] = r.excluded_neutral;
    j["first_order_fallbacks"] = r.first_order_fallbacks;
    j["error"] = r.error.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.error);
    return j;
}

/// Writes results.csv, results.json, timings.csv and the requested side files under dir.
inline void emit_plotdata(const std::filesystem::path& dir, const std::vector<ResultRecord>& recs)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [](const fs::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
        return f;
    };
    {
        auto f = open(dir / "results.csv");
        write_results_csv(f, recs);
    }
    {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : recs) arr.push_back(record_json(r));
        auto f = open(dir / "results.json");
        f << arr.dump(2) << '\n';
    }
    {
        auto f = open(dir / "timings.csv");
        f << "key,wall_seconds\n";
        for (const auto& r : recs) f << r.key << ',' << std::setprecision(6) << r.wall_seconds << '\n';
    }
    for (const auto& r : recs) {
        if (!r.eigenvalues.empty()) {
            fs::create_directories(dir / "spectra");
            auto f = open(dir / "spectra" / (r.key + ".csv"));
            write_spectrum_csv(f, r.eigenvalues);
        }
        if (r.mode && r.grid) {
            fs::create_directories(dir / "modes");
            auto f = open(dir / "modes" / (r.key + ".csv"));
            write_mode_csv(f, *r.mode, *r.grid);
        }
        if (!r.history.empty()) {
            fs::create_directories(dir / "histories");
            auto f = open(dir / "histories" / (r.key + ".csv"));
            ErrorHistory{r.history, {}}.write_csv(f);
        }
        if (r.final_field) {
            fs::create_directories(dir / "fields");
            auto f = open(dir / "fields" / (r.key + ".csv"));
            write_field_csv(f, *r.final_field, r.gas);
        }
    }
}

} // namespace carbuncle
