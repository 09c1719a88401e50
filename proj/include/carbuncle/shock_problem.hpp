#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "carbuncle/euler.hpp"
#include "carbuncle/fv_solver.hpp"
#include "carbuncle/grid.hpp"
#include "carbuncle/growth_fit.hpp"

namespace carbuncle {

enum class FixMode { Auto, On, Off };

inline std::string to_string(FixMode m)
{
    switch (m) {
    case FixMode::Auto: return "auto";
    case FixMode::On: return "on";
    case FixMode::Off: return "off";
    }
    return "?";
}

inline FixMode parse_fix_mode(const std::string& s)
{
    if (s == "auto") return FixMode::Auto;
    if (s == "on") return FixMode::On;
    if (s == "off") return FixMode::Off;
    throw std::invalid_argument("unknown mass-flux-fix mode '" + s + "'");
}

/// Everything that defines one planar steady-shock run.
struct SteadyShockConfig {
    double m0 = 20.0;
    double epsilon = 0.1;
    std::optional<int> shock_cell;   // 0-based column; defaults to the centre column
    GridSpec grid;
    RiemannSolverKind solver = RiemannSolverKind::Roe;
    MusclOptions muscl{LimiterKind::VanAlbada, ReconstructionVariables::Primitive};
    FluxOptions flux;
    GasModel gas;
    double cfl = 0.1;
    double perturbation = 1e-7;
    std::uint64_t seed = 12345;
    FixMode mass_flux_fix = FixMode::Auto;
    MassFluxFixKind mass_flux_fix_kind = MassFluxFixKind::CellState;

    // one-dimensional pre-solve
    double steady_tol = 1e-12;
    long steady_max_steps = 400000;
    // a pre-solve whose residual plateaus below this is accepted as quasi-steady (flagged)
    double quasi_steady_tol = 1e-6;
    long plateau_window = 20000;

    // time-marching growth study
    double t_end = 150.0;
    GrowthFitOptions fit;

    /// 0-based shock column: 1-based (nx + 1) / 2, i.e. 6 of 11 and 25 of 50.
    int shock_index() const { return shock_cell ? *shock_cell : (grid.nx + 1) / 2 - 1; }

    SchemeConfig scheme() const { return {solver, muscl, flux, gas, std::nullopt}; }

    void validate() const
    {
        if (!(m0 > 1.0)) throw std::invalid_argument("upstream Mach number must exceed 1");
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("shock position must lie in [0, 1]");
        const int s = shock_index();
        if (s < 2 || s > grid.nx - 3) throw std::invalid_argument("shock column too close to the x boundaries");
    }
};

/// Thrown when the one-dimensional pre-solve does not reach the steady tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history))
    {
    }
    std::vector<double> residual_history;
};

struct ShockStates {
    ConservedState left;
    ConservedState right;
};

/// Upstream and downstream states of a stationary normal shock with rho u = 1 on both sides.
inline ShockStates initial_states(double m0, const GasModel& gas)
{
    if (!(m0 > 1.0)) throw std::invalid_argument("initial_states: M0 must exceed 1");
    const double g = gas.gamma;
    const double m2 = m0 * m0;
    const double f = 1.0 / (2.0 / ((g + 1.0) * m2) + (g - 1.0) / (g + 1.0));
    const double gg = 2.0 * g * m2 / (g + 1.0) - (g - 1.0) / (g + 1.0);
    const double e0 = 1.0 / (g * (g - 1.0) * m2);
    return {{1.0, 1.0, 0.0, e0 + 0.5}, {f, 1.0, 0.0, gg * e0 + 0.5 / f}};
}

/// Blend weights (alpha_rho, alpha_u, alpha_p) along the Hugoniot curve for shock position eps.
struct HugoniotWeights {
    double rho, u, p;
};

inline HugoniotWeights hugoniot_weights(double m0, double eps, const GasModel& gas)
{
    const double g = gas.gamma, m2 = m0 * m0;
    const double a_u = 1.0 - (1.0 - eps) * std::pow(1.0 + eps * (m2 - 1.0) / (1.0 + 0.5 * (g - 1.0) * m2), -0.5) *
                                 std::pow(1.0 + eps * (m2 - 1.0) / (1.0 - 2.0 * g * m2 / (g - 1.0)), -0.5);
    const double a_p = eps * std::pow(1.0 + (1.0 - eps) * (g + 1.0) / (g - 1.0) * (m2 - 1.0) / m2, -0.5);
    return {eps, a_u, a_p};
}

/// Intermediate shock-cell state for shock position eps in [0, 1].
inline PrimitiveState intermediate_state(double m0, double eps, const GasModel& gas)
{
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("intermediate_state: eps outside [0, 1]");
    const ShockStates s = initial_states(m0, gas);
    const PrimitiveState L = conserved_to_primitive(s.left, gas);
    const PrimitiveState R = conserved_to_primitive(s.right, gas);
    const HugoniotWeights w = hugoniot_weights(m0, eps, gas);
    return {(1.0 - w.rho) * L.rho + w.rho * R.rho, (1.0 - w.u) * L.u + w.u * R.u, 0.0,
            (1.0 - w.p) * L.p + w.p * R.p};
}

inline BoundarySpec steady_shock_boundaries(const SteadyShockConfig& cfg)
{
    return BoundarySpec::steady_shock(initial_states(cfg.m0, cfg.gas).left.vec(), 1.0);
}

inline void fill_shock_columns(FieldState& f, const SteadyShockConfig& cfg)
{
    const ShockStates s = initial_states(cfg.m0, cfg.gas);
    const Vec4 mid = to_conserved_raw(intermediate_state(cfg.m0, cfg.epsilon, cfg.gas), cfg.gas.gamma);
    const int shock = cfg.shock_index();
    for (int j = 0; j < f.ny(); ++j)
        for (int i = 0; i < f.nx(); ++i)
            f(i, j) = i < shock ? s.left.vec() : (i == shock ? mid : s.right.vec());
    apply_boundaries(f, steady_shock_boundaries(cfg));
}

/// Initial (unconverged) two-dimensional field: U_L | U_M | U_R.
inline FieldState build_initial_field(const SteadyShockConfig& cfg)
{
    cfg.validate();
    FieldState f(std::make_shared<const StructuredGrid>(make_grid(cfg.grid)));
    fill_shock_columns(f, cfg);
    return f;
}

/// Whether the mass-flux fix is used for the one-dimensional pre-solve.
inline bool mass_flux_fix_applies(const SteadyShockConfig& cfg)
{
    switch (cfg.mass_flux_fix) {
    case FixMode::On: return true;
    case FixMode::Off: return false;
    case FixMode::Auto: {
        if (cfg.solver != RiemannSolverKind::Roe) return false;
        for (double e : {0.1, 0.2, 0.3})
            if (std::abs(cfg.epsilon - e) < 1e-12) return true;
        return false;
    }
    }
    return false;
}

struct Profile1D {
    std::vector<Vec4> cells;    // conserved state per x cell
    long steps = 0;
    double residual = 0.0;
    bool mass_flux_fix = false;
    bool quasi_steady = false;             // residual plateaued above steady_tol
    bool started_from_first_order = false; // second-order march restarted from the first-order profile
    std::vector<double> residual_history;
};

namespace detail {

// Marches in windows of plateau_window steps until the steady tolerance is met, the budget
// is spent, or the residual stops halving across a window while below quasi_steady_tol.
inline Profile1D march_1d(FieldState& f, const SteadyShockConfig& cfg, const SchemeConfig& scheme)
{
    const BoundarySpec bc = steady_shock_boundaries(cfg);
    Profile1D p;
    double last = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (p.steps < cfg.steady_max_steps) {
        MarchOptions opt;
        opt.cfl = cfg.cfl;
        opt.residual_tol = cfg.steady_tol;
        opt.max_steps = std::min(cfg.plateau_window, cfg.steady_max_steps - p.steps);
        MarchResult mr = march(f, scheme, bc, opt);
        p.steps += mr.steps;
        p.residual = mr.final_residual;
        p.residual_history.insert(p.residual_history.end(), mr.residual_history.begin(), mr.residual_history.end());
        if (mr.converged) {
            converged = true;
            break;
        }
        if (p.residual < cfg.quasi_steady_tol && p.residual > 0.5 * last) {
            p.quasi_steady = true;
            break;
        }
        last = p.residual;
    }
    if (!converged && !p.quasi_steady) {
        if (p.residual < cfg.quasi_steady_tol)
            p.quasi_steady = true;
        else
            throw ConvergenceError("1D pre-solve did not converge: max|R|=" + std::to_string(p.residual) + " after " +
                                       std::to_string(p.steps) + " steps",
                                   p.residual_history);
    }
    p.cells.resize(f.nx());
    for (int i = 0; i < f.nx(); ++i) p.cells[i] = f(i, 0);
    return p;
}

} // namespace detail

/// Marches the single-row problem to max|R| < steady_tol. A second-order march that breaks
/// down from the sharp initial shock is restarted from the converged first-order profile.
inline Profile1D solve_1d_steady(const SteadyShockConfig& cfg)
{
    cfg.validate();
    auto strip = std::make_shared<const StructuredGrid>(make_strip(cfg.grid.nx, cfg.grid.dx, cfg.grid.dy()));
    SchemeConfig scheme = cfg.scheme();
    const bool fix = mass_flux_fix_applies(cfg);
    if (fix) scheme.mass_flux_fix = MassFluxFix{cfg.shock_index(), cfg.mass_flux_fix_kind};

    FieldState f(strip);
    fill_shock_columns(f, cfg);
    Profile1D p;
    try {
        p = detail::march_1d(f, cfg, scheme);
    } catch (const AdmissibilityError& e) {
        if (!cfg.muscl.second_order())
            throw ConvergenceError(std::string("1D pre-solve broke down: ") + e.what(), {});
        SteadyShockConfig first = cfg;
        first.muscl.limiter = LimiterKind::None;
        const Profile1D p1 = solve_1d_steady(first);
        FieldState g(strip);
        for (int i = 0; i < g.nx(); ++i) g(i, 0) = p1.cells[i];
        try {
            p = detail::march_1d(g, cfg, scheme);
        } catch (const AdmissibilityError& e2) {
            throw ConvergenceError(std::string("1D pre-solve broke down: ") + e2.what(), {});
        }
        p.steps += p1.steps;
        p.started_from_first_order = true;
    }
    p.mass_flux_fix = fix;
    return p;
}

/// Copies the profile onto every row and adds a uniform random perturbation in
/// [-delta, delta] scaled by each conserved component's magnitude (the transverse momentum,
/// zero in the mean flow, is scaled by the x-momentum magnitude instead).
inline FieldState project_and_perturb(const Profile1D& profile, std::shared_ptr<const StructuredGrid> grid,
                                      const BoundarySpec& bc, double delta, std::uint64_t seed)
{
    FieldState f(std::move(grid));
    if (static_cast<int>(profile.cells.size()) != f.nx())
        throw std::invalid_argument("project_and_perturb: profile length does not match grid");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int j = 0; j < f.ny(); ++j) {
        for (int i = 0; i < f.nx(); ++i) {
            Vec4 u = profile.cells[i];
            if (delta != 0.0) {
                Vec4 scale = u.cwiseAbs();
                scale[2] = std::max(scale[2], std::abs(u[1]));
                for (int k = 0; k < 4; ++k) u[k] += delta * scale[k] * unit(rng);
            }
            f(i, j) = u;
        }
    }
    apply_boundaries(f, bc);
    return f;
}

/// Steady mean field on the configured 2D grid (no perturbation).
inline FieldState steady_mean_field(const SteadyShockConfig& cfg, const Profile1D& profile)
{
    return project_and_perturb(profile, std::make_shared<const StructuredGrid>(make_grid(cfg.grid)),
                               steady_shock_boundaries(cfg), 0.0, cfg.seed);
}

struct SimulationResult {
    Profile1D profile;
    ErrorHistory history;
    FieldState final_field;
    MarchResult march;
    bool broke_down = false;
    std::string breakdown_reason;
};

/// Perturbed time-marching run: 1D pre-solve, projection, perturbation, march to t_end
/// while recording ||v||_inf, and a growth-rate fit of the recorded history.
inline SimulationResult run_simulation(const SteadyShockConfig& cfg,
                                       const std::function<void(const FieldState&, long)>& extra = {})
{
    SimulationResult out;
    out.profile = solve_1d_steady(cfg);
    const BoundarySpec bc = steady_shock_boundaries(cfg);
    FieldState f = project_and_perturb(out.profile, std::make_shared<const StructuredGrid>(make_grid(cfg.grid)), bc,
                                       cfg.perturbation, cfg.seed);
    MarchOptions opt;
    opt.cfl = cfg.cfl;
    opt.t_end = cfg.t_end;
    try {
        out.march = march(f, cfg.scheme(), bc, opt, [&](const FieldState& s, long step) {
            out.history.samples.push_back({s.time, max_transverse_velocity(s, cfg.gas)});
            if (extra) extra(s, step);
        });
    } catch (const AdmissibilityError& e) {
        // the perturbation grew until the state broke down; the history up to here is still usable
        out.broke_down = true;
        out.breakdown_reason = e.what();
    }
    out.history.fitted = fit_growth_rate(out.history.samples, cfg.fit);
    out.final_field = std::move(f);
    return out;
}

} // namespace carbuncle
