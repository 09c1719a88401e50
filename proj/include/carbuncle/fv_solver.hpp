#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carbuncle/euler.hpp"
#include "carbuncle/grid.hpp"
#include "carbuncle/muscl.hpp"
#include "carbuncle/riemann.hpp"

namespace carbuncle {

/// Conserved variables on every cell of a grid, ghost layers included.
class FieldState {
public:
    FieldState() = default;

    explicit FieldState(std::shared_ptr<const StructuredGrid> grid, const Vec4& fill = Vec4::Zero())
        : grid_(std::move(grid))
    {
        cells_.assign(static_cast<size_t>(stride()) * (grid_->ny() + 2 * StructuredGrid::ghost), fill);
    }

    const StructuredGrid& grid() const { return *grid_; }
    const std::shared_ptr<const StructuredGrid>& grid_ptr() const { return grid_; }
    int nx() const { return grid_->nx(); }
    int ny() const { return grid_->ny(); }

    Vec4& operator()(int i, int j) { return cells_[index(i, j)]; }
    const Vec4& operator()(int i, int j) const { return cells_[index(i, j)]; }

    PrimitiveState primitive(int i, int j, const GasModel& gas) const
    {
        return to_primitive_raw((*this)(i, j), gas.gamma);
    }

    double time = 0.0;

private:
    int stride() const { return grid_->nx() + 2 * StructuredGrid::ghost; }
    size_t index(int i, int j) const
    {
        return static_cast<size_t>(j + StructuredGrid::ghost) * stride() + (i + StructuredGrid::ghost);
    }

    std::shared_ptr<const StructuredGrid> grid_;
    std::vector<Vec4> cells_;
};

/// Condition on one x-boundary (left or right). Fixed fills both ghost layers with the
/// given states (innermost first); MassFluxOutflow extrapolates the adjacent interior cell
/// and overwrites the x-momentum with a prescribed mass flux.
struct XBoundary {
    enum class Type { Fixed, MassFluxOutflow };
    Type type = Type::Fixed;
    std::array<Vec4, 2> states{Vec4::Zero(), Vec4::Zero()};
    double mass_flux = 1.0;

    static XBoundary fixed(const Vec4& inner, const Vec4& outer)
    {
        XBoundary b;
        b.states = {inner, outer};
        return b;
    }
    static XBoundary mass_flux_outflow(double m)
    {
        XBoundary b;
        b.type = Type::MassFluxOutflow;
        b.mass_flux = m;
        return b;
    }
};

/// Left/right conditions; bottom and top are always periodic.
struct BoundarySpec {
    XBoundary left;
    XBoundary right = XBoundary::mass_flux_outflow(1.0);

    /// Free-stream inflow on the left, mass-flux-fixed outflow on the right.
    static BoundarySpec steady_shock(const Vec4& inflow, double outflow_mass_flux = 1.0)
    {
        return {XBoundary::fixed(inflow, inflow), XBoundary::mass_flux_outflow(outflow_mass_flux)};
    }
};

/// Wraps every column (ghost columns included) periodically in j.
inline void apply_periodic(FieldState& f)
{
    const int nx = f.nx(), ny = f.ny(), g = StructuredGrid::ghost;
    for (int i = -g; i < nx + g; ++i) {
        for (int k = 1; k <= g; ++k) {
            f(i, -k) = f(i, ((-k) % ny + ny) % ny);
            f(i, ny - 1 + k) = f(i, (k - 1) % ny);
        }
    }
}

inline void apply_x_boundaries(FieldState& f, const BoundarySpec& bc)
{
    const int nx = f.nx(), ny = f.ny();
    for (int j = 0; j < ny; ++j) {
        for (int k = 0; k < 2; ++k) {
            const int il = -1 - k, ir = nx + k;
            if (bc.left.type == XBoundary::Type::Fixed) {
                f(il, j) = bc.left.states[k];
            } else {
                f(il, j) = f(0, j);
                f(il, j)[1] = bc.left.mass_flux;
            }
            if (bc.right.type == XBoundary::Type::Fixed) {
                f(ir, j) = bc.right.states[k];
            } else {
                f(ir, j) = f(nx - 1, j);
                f(ir, j)[1] = bc.right.mass_flux;
            }
        }
    }
}

inline void apply_boundaries(FieldState& f, const BoundarySpec& bc)
{
    apply_x_boundaries(f, bc);
    apply_periodic(f);
}

/// Overwrite of the mass flux across a captured shock: on every row, the mass-flux
/// component of the face downstream of cell `shock_i` takes the value of its upstream face.
/// Stabilisation of the one-dimensional pre-solve around the shock cell s.
/// CellState: after every stage the x-momentum of cell s+1 is reset to that of cell s-1, so
/// the cells just before and after the shock carry the same mass flux.
/// FaceFlux: the mass-flux component at face s+1/2 is overwritten with the one at s-1/2.
enum class MassFluxFixKind { CellState, FaceFlux };

inline std::string to_string(MassFluxFixKind k) { return k == MassFluxFixKind::CellState ? "cell" : "face"; }

inline MassFluxFixKind parse_mass_flux_fix_kind(const std::string& s)
{
    if (s == "cell") return MassFluxFixKind::CellState;
    if (s == "face") return MassFluxFixKind::FaceFlux;
    throw std::invalid_argument("unknown mass-flux fix kind '" + s + "'");
}

struct MassFluxFix {
    int shock_i = 0;
    MassFluxFixKind kind = MassFluxFixKind::CellState;
};

struct SchemeConfig {
    RiemannSolverKind solver = RiemannSolverKind::Roe;
    MusclOptions muscl;
    FluxOptions flux;
    GasModel gas;
    std::optional<MassFluxFix> mass_flux_fix;
};

/// Limiter values frozen on a mean field, one entry per face.
struct FrozenLimiters {
    int nx = 0, ny = 0;
    std::vector<FaceLimiters> x;   // (nx + 1) * ny, index j * (nx + 1) + i
    std::vector<FaceLimiters> y;   // nx * ny, index j * nx + i (face below cell (i, j))

    const FaceLimiters& x_face(int i, int j) const { return x[static_cast<size_t>(j) * (nx + 1) + i]; }
    const FaceLimiters& y_face(int i, int j) const { return y[static_cast<size_t>(j) * nx + i]; }
};

struct ResidualCounters {
    long first_order_fallbacks = 0;
};

using Residual = std::vector<Vec4>;   // interior cells, index j * nx + i

namespace detail {

inline std::vector<Vec4> reconstruction_variables(const FieldState& f, ReconstructionVariables vars, double gamma)
{
    const int nx = f.nx(), ny = f.ny(), g = StructuredGrid::ghost;
    std::vector<Vec4> q(static_cast<size_t>(nx + 2 * g) * (ny + 2 * g));
    for (int j = -g; j < ny + g; ++j)
        for (int i = -g; i < nx + g; ++i) {
            const Vec4& U = f(i, j);
            q[static_cast<size_t>(j + g) * (nx + 2 * g) + (i + g)] =
                vars == ReconstructionVariables::Conservative ? U : to_primitive_raw(U, gamma).vec();
        }
    return q;
}

/// Visits every face with its four-cell stencil in reconstruction variables.
/// fn(is_x, i, j, qm1, q0, qp1, qp2); x faces sit on node column i in row j, y faces on
/// node row j in column i (j = 0 is the periodic face shared by rows ny-1 and 0).
template <class Fn>
void for_each_face_stencil(const FieldState& f, const std::vector<Vec4>& q, Fn&& fn)
{
    const int nx = f.nx(), ny = f.ny(), g = StructuredGrid::ghost;
    auto at = [&](int i, int j) -> const Vec4& { return q[static_cast<size_t>(j + g) * (nx + 2 * g) + (i + g)]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) fn(true, i, j, at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) fn(false, i, j, at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1));
}

} // namespace detail

/// Limiter values evaluated once on the mean field (including first-order fallbacks).
inline FrozenLimiters frozen_limiter_values(const FieldState& mean, const SchemeConfig& scheme)
{
    FrozenLimiters table;
    table.nx = mean.nx();
    table.ny = mean.ny();
    table.x.resize(static_cast<size_t>(table.nx + 1) * table.ny);
    table.y.resize(static_cast<size_t>(table.nx) * table.ny);
    const auto q = detail::reconstruction_variables(mean, scheme.muscl.vars, scheme.gas.gamma);
    detail::for_each_face_stencil(mean, q, [&](bool is_x, int i, int j, const Vec4& a, const Vec4& b,
                                               const Vec4& c, const Vec4& d) {
        const FaceStates s = reconstruct_face(scheme.muscl, a, b, c, d, scheme.gas.gamma);
        if (is_x)
            table.x[static_cast<size_t>(j) * (table.nx + 1) + i] = s.psi;
        else
            table.y[static_cast<size_t>(j) * table.nx + i] = s.psi;
    });
    return table;
}

/// dU/dt = -(1/|cell|) sum_k L_k F_k on interior cells. Ghost cells must be filled.
/// With `frozen` the limiter values are taken from the table instead of the field.
inline Residual residual(const FieldState& f, const SchemeConfig& scheme, ResidualCounters* counters = nullptr,
                         const FrozenLimiters* frozen = nullptr)
{
    const StructuredGrid& grid = f.grid();
    const int nx = f.nx(), ny = f.ny();
    const double gamma = scheme.gas.gamma;
    const auto q = detail::reconstruction_variables(f, scheme.muscl.vars, gamma);

    // face fluxes already multiplied by the face length
    std::vector<Vec4> fx(static_cast<size_t>(nx + 1) * ny), fy(static_cast<size_t>(nx) * ny);
    long fallbacks = 0;
    detail::for_each_face_stencil(f, q, [&](bool is_x, int i, int j, const Vec4& a, const Vec4& b, const Vec4& c,
                                            const Vec4& d) {
        FaceStates s;
        if (frozen)
            s = reconstruct_with(is_x ? frozen->x_face(i, j) : frozen->y_face(i, j), scheme.muscl.vars, a, b, c, d,
                                 gamma);
        else
            s = reconstruct_face(scheme.muscl, a, b, c, d, gamma);
        if (s.fell_back) ++fallbacks;
        const Face& face = is_x ? grid.x_face(i, j) : grid.y_face(i, j);
        const Vec4 flux = face.length * numerical_flux(scheme.solver, s.left, s.right, face.normal, scheme.gas,
                                                       scheme.flux);
        if (is_x)
            fx[static_cast<size_t>(j) * (nx + 1) + i] = flux;
        else
            fy[static_cast<size_t>(j) * nx + i] = flux;
    });
    if (counters) counters->first_order_fallbacks += fallbacks;

    if (scheme.mass_flux_fix && scheme.mass_flux_fix->kind == MassFluxFixKind::FaceFlux) {
        const int s = scheme.mass_flux_fix->shock_i;
        if (s < 0 || s >= nx) throw std::out_of_range("mass-flux fix: shock cell outside grid");
        for (int j = 0; j < ny; ++j) {
            const size_t up = static_cast<size_t>(j) * (nx + 1) + s;
            // compare per unit length so that non-uniform faces stay consistent
            const double m_up = fx[up][0] / grid.x_face(s, j).length;
            fx[up + 1][0] = m_up * grid.x_face(s + 1, j).length;
        }
    }

    Residual res(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const int jn = (j + 1) % ny;
        for (int i = 0; i < nx; ++i) {
            const Vec4 net = fx[static_cast<size_t>(j) * (nx + 1) + i + 1] - fx[static_cast<size_t>(j) * (nx + 1) + i] +
                             fy[static_cast<size_t>(jn) * nx + i] - fy[static_cast<size_t>(j) * nx + i];
            res[static_cast<size_t>(j) * nx + i] = -net / grid.volume(i, j);
        }
    }
    return res;
}

inline double max_abs(const Residual& r)
{
    double m = 0.0;
    for (const Vec4& v : r) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

/// Explicit time step: cfl * min over cells of (volume / max face length) / (|u| + |v| + a).
inline double stable_dt(const FieldState& f, double cfl, const GasModel& gas)
{
    const StructuredGrid& grid = f.grid();
    double dt = std::numeric_limits<double>::infinity();
    for (int j = 0; j < f.ny(); ++j) {
        for (int i = 0; i < f.nx(); ++i) {
            const CellGeometry geo = grid.cell_geometry(i, j);
            double lmax = 0.0;
            for (const Face& s : geo.sides) lmax = std::max(lmax, s.length);
            const PrimitiveState W = f.primitive(i, j, gas);
            const double speed = std::abs(W.u) + std::abs(W.v) + sound_speed(W, gas);
            dt = std::min(dt, geo.volume / lmax / speed);
        }
    }
    return cfl * dt;
}

inline void check_admissible(const FieldState& f)
{
    for (int j = 0; j < f.ny(); ++j)
        for (int i = 0; i < f.nx(); ++i)
            if (!is_admissible(ConservedState::from(f(i, j))))
                throw AdmissibilityError("cell (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") became inadmissible at t=" + std::to_string(f.time));
}

/// Shu-Osher weights of the three-stage SSP Runge-Kutta scheme:
/// u_k = a_k u_n + b_k (u_{k-1} + dt L(u_{k-1})).
inline constexpr std::array<std::array<double, 2>, 3> ssp_rk3_weights{
    {{0.0, 1.0}, {0.75, 0.25}, {1.0 / 3.0, 2.0 / 3.0}}};

/// SSP-RK3 step for any vector-space state with rhs(u) = du/dt.
template <class T, class Rhs>
T ssp_rk3(const T& un, double dt, Rhs&& rhs)
{
    T u = un;
    for (const auto& [a, b] : ssp_rk3_weights) u = a * un + b * (u + dt * rhs(u));
    return u;
}

/// Third-order strong-stability-preserving Runge-Kutta step.
inline FieldState rk3_step(const FieldState& un, double dt, const SchemeConfig& scheme, const BoundarySpec& bc,
                           ResidualCounters* counters = nullptr)
{
    const int nx = un.nx(), ny = un.ny();
    auto stage = [&](FieldState& out, const FieldState& base, double wa, const FieldState& prev, double wb) {
        FieldState src = prev;
        apply_boundaries(src, bc);
        const Residual r = residual(src, scheme, counters);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out(i, j) = wa * base(i, j) + wb * (prev(i, j) + dt * r[static_cast<size_t>(j) * nx + i]);
        if (scheme.mass_flux_fix && scheme.mass_flux_fix->kind == MassFluxFixKind::CellState) {
            const int s = scheme.mass_flux_fix->shock_i;
            if (s < 1 || s + 1 >= nx) throw std::out_of_range("mass-flux fix: shock cell too close to the boundary");
            for (int j = 0; j < ny; ++j) out(s + 1, j)[1] = out(s - 1, j)[1];
        }
    };
    const auto& w = ssp_rk3_weights;
    FieldState u1 = un, u2 = un, u3 = un;
    stage(u1, un, w[0][0], un, w[0][1]);
    stage(u2, un, w[1][0], u1, w[1][1]);
    stage(u3, un, w[2][0], u2, w[2][1]);
    u3.time = un.time + dt;
    apply_boundaries(u3, bc);
    check_admissible(u3);
    return u3;
}

struct MarchOptions {
    double cfl = 0.1;
    double t_end = std::numeric_limits<double>::infinity();
    double residual_tol = 0.0;   // stop once max|R| drops below; 0 disables
    long max_steps = 1000000;
};

struct MarchResult {
    long steps = 0;
    bool converged = false;          // residual tolerance reached
    double final_residual = 0.0;
    std::vector<double> residual_history;
    ResidualCounters counters;
};

using StepCallback = std::function<void(const FieldState&, long step)>;

/// Time-marches until t_end, the residual tolerance, or the step budget is reached.
/// The callback fires once for the initial state (step 0) and after every step.
inline MarchResult march(FieldState& f, const SchemeConfig& scheme, const BoundarySpec& bc, const MarchOptions& opt,
                         const StepCallback& on_step = {})
{
    MarchResult out;
    apply_boundaries(f, bc);
    if (on_step) on_step(f, 0);
    while (out.steps < opt.max_steps && f.time < opt.t_end) {
        if (opt.residual_tol > 0.0) {
            const double r = max_abs(residual(f, scheme));
            out.final_residual = r;
            out.residual_history.push_back(r);
            if (r < opt.residual_tol) {
                out.converged = true;
                break;
            }
        }
        double dt = stable_dt(f, opt.cfl, scheme.gas);
        if (f.time + dt > opt.t_end) dt = opt.t_end - f.time;
        f = rk3_step(f, dt, scheme, bc, &out.counters);
        ++out.steps;
        if (on_step) on_step(f, out.steps);
    }
    return out;
}

inline double max_transverse_velocity(const FieldState& f, const GasModel& gas)
{
    double m = 0.0;
    for (int j = 0; j < f.ny(); ++j)
        for (int i = 0; i < f.nx(); ++i) m = std::max(m, std::abs(f.primitive(i, j, gas).v));
    return m;
}

/// Snapshot rows (i, j, x, y, rho, u, v, p) over the interior cells.
inline void write_field_csv(std::ostream& os, const FieldState& f, const GasModel& gas)
{
    os << "i,j,x,y,rho,u,v,p\n";
    os.precision(17);
    for (int j = 0; j < f.ny(); ++j)
        for (int i = 0; i < f.nx(); ++i) {
            const Vec2 c = f.grid().cell_center(i, j);
            const PrimitiveState W = f.primitive(i, j, gas);
            os << i << ',' << j << ',' << c.x << ',' << c.y << ',' << W.rho << ',' << W.u << ',' << W.v << ','
               << W.p << '\n';
        }
}

} // namespace carbuncle
