#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "carbuncle/euler.hpp"
#include "carbuncle/fv_solver.hpp"
#include "carbuncle/muscl.hpp"
#include "carbuncle/riemann.hpp"
#include "carbuncle/shock_problem.hpp"

namespace carbuncle {

/// Variables in which the perturbation dynamics dq/dt = S q is expressed.
enum class MatrixForm { Conservative, Primitive };

inline std::string to_string(MatrixForm f) { return f == MatrixForm::Conservative ? "cons" : "prim"; }

inline MatrixForm parse_matrix_form(const std::string& s)
{
    if (s == "cons" || s == "conservative") return MatrixForm::Conservative;
    if (s == "prim" || s == "primitive") return MatrixForm::Primitive;
    throw std::invalid_argument("unknown matrix form '" + s + "'");
}

struct StabilityOptions {
    MatrixForm form = MatrixForm::Conservative;
    double jacobian_step = 1e-7;
    // Ghost cells carry no perturbation; when false the outflow ghosts follow the
    // extrapolated perturbation of the last interior column (with rho u held fixed).
    bool zero_ghost_perturbation = true;
    // Relative floor below which mean-field differences count as zero when freezing limiters.
    double frozen_zero_floor = 1e-8;
    bool require_steady = true;
    double steady_tol = 1e-9;
    // Drop the neutral mode that moves the shock along the family of steady discrete profiles
    // (y-uniform, no transverse velocity, |lambda| <= neutral_tol) from max_real.
    bool exclude_steady_family = true;
    double neutral_tol = 1e-6;
};

class NotSteadyError : public std::runtime_error {
public:
    NotSteadyError(const std::string& what, double r) : std::runtime_error(what), residual(r) {}
    double residual;
};

/// Dense stability matrix over the active interior cells, 4 x 4 blocks per cell.
struct StabilityMatrix {
    Eigen::MatrixXd S;
    int nx = 0, ny = 0;
    std::vector<std::pair<int, int>> cells;   // block -> (i, j)
    std::vector<int> block_of;                // j * nx + i -> block, or -1 when frozen
    MatrixForm form = MatrixForm::Conservative;
    ReconstructionVariables vars = ReconstructionVariables::Conservative;
    // dU/dW per active block at the mean state, used to move modes between variable sets
    std::vector<Mat4> dU_dW;

    int size() const { return static_cast<int>(S.rows()); }
    int block(int i, int j) const { return block_of[static_cast<size_t>(j) * nx + i]; }
};

/// Central-difference flux Jacobians with respect to the reconstructed left/right variables.
inline std::pair<Mat4, Mat4> flux_jacobians(RiemannSolverKind solver, const Vec4& qL, const Vec4& qR, Vec2 n,
                                            ReconstructionVariables vars, const GasModel& gas,
                                            const FluxOptions& fopt = {}, double step = 1e-7)
{
    auto flux = [&](const Vec4& l, const Vec4& r) {
        return numerical_flux(solver, reconstruction_to_primitive(l, vars, gas.gamma),
                              reconstruction_to_primitive(r, vars, gas.gamma), n, gas, fopt);
    };
    Mat4 JL, JR;
    for (int k = 0; k < 4; ++k) {
        Vec4 e = Vec4::Zero();
        e[k] = step;
        JL.col(k) = (flux(qL + e, qR) - flux(qL - e, qR)) / (2.0 * step);
        JR.col(k) = (flux(qL, qR + e) - flux(qL, qR - e)) / (2.0 * step);
    }
    if (!JL.allFinite() || !JR.allFinite()) {
        std::ostringstream os;
        os << "non-finite flux Jacobian at face n=(" << n.x << "," << n.y << ") qL=" << qL.transpose()
           << " qR=" << qR.transpose();
        throw std::runtime_error(os.str());
    }
    return {JL, JR};
}

/// Active-cell mask over the interior cells, index j * nx + i.
using ActiveMask = std::vector<bool>;

inline ActiveMask all_active(int nx, int ny) { return ActiveMask(static_cast<size_t>(nx) * ny, true); }

/// Limiter table used by the linearisation (the mean-field zero floor is raised to
/// opt.frozen_zero_floor so convergence noise in uniform regions reads as zero).
inline FrozenLimiters frozen_limiters_for(const FieldState& mean, const SchemeConfig& scheme,
                                          const StabilityOptions& opt)
{
    SchemeConfig s = scheme;
    s.muscl.zero_floor = std::max(scheme.muscl.zero_floor, opt.frozen_zero_floor);
    return frozen_limiter_values(mean, s);
}

/// Assembles S for perturbations about `mean` (ghosts filled) with limiters frozen on the
/// mean. Each face contributes dF = J_L[(E + Psi_L/2) dq_i - Psi_L/2 dq_{i-1}]
///                                 + J_R[(E + Psi_R/2) dq_{i+1} - Psi_R/2 dq_{i+2}]
/// to its two adjacent cells with weight -/+ L / |cell|; frozen and ghost cells carry no
/// perturbation.
inline StabilityMatrix assemble_matrix(const FieldState& mean, const SchemeConfig& scheme,
                                       const StabilityOptions& opt = {}, const ActiveMask* mask = nullptr)
{
    const StructuredGrid& grid = mean.grid();
    const int nx = mean.nx(), ny = mean.ny();
    const double gamma = scheme.gas.gamma;
    const ReconstructionVariables vars = scheme.muscl.vars;

    if (opt.require_steady) {
        const double r = max_abs(residual(mean, scheme));
        if (!(r < opt.steady_tol))
            throw NotSteadyError("mean field is not steady: max|R|=" + std::to_string(r), r);
    }

    StabilityMatrix M;
    M.nx = nx;
    M.ny = ny;
    M.form = opt.form;
    M.vars = vars;
    M.block_of.assign(static_cast<size_t>(nx) * ny, -1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (!mask || (*mask)[static_cast<size_t>(j) * nx + i]) {
                M.block_of[static_cast<size_t>(j) * nx + i] = static_cast<int>(M.cells.size());
                M.cells.emplace_back(i, j);
                M.dU_dW.push_back(transform_dU_dW(mean.primitive(i, j, scheme.gas), scheme.gas));
            }
    const int nb = static_cast<int>(M.cells.size());
    if (nb == 0) throw std::invalid_argument("assemble_matrix: no active cells");
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(4 * nb, 4 * nb);   // d(dU/dt)/dq

    const FrozenLimiters frozen = frozen_limiters_for(mean, scheme, opt);
    const auto q = detail::reconstruction_variables(mean, vars, gamma);
    auto q_at = [&](int i, int j) -> const Vec4& {
        return q[static_cast<size_t>(j + StructuredGrid::ghost) * (nx + 2 * StructuredGrid::ghost) +
                 (i + StructuredGrid::ghost)];
    };

    // Maps a stencil cell to (block, 4x4 map from that block's dq to the cell's dq).
    // Periodic wrap in j; x ghosts are frozen unless outflow perturbations are enabled.
    auto source = [&](int i, int j) -> std::pair<int, Mat4> {
        const int jw = ((j % ny) + ny) % ny;
        if (i >= 0 && i < nx) return {M.block(i, jw), Mat4::Identity()};
        if (opt.zero_ghost_perturbation || i < nx) return {-1, Mat4::Zero()};
        // outflow extrapolation: dU_ghost = diag(1, 0, 1, 1) dU_{nx-1}
        Mat4 P = Mat4::Identity();
        P(1, 1) = 0.0;
        if (vars == ReconstructionVariables::Primitive) {
            const PrimitiveState w_in = mean.primitive(nx - 1, jw, scheme.gas);
            const PrimitiveState w_gh = mean.primitive(i, jw, scheme.gas);
            P = transform_dW_dU(w_gh, scheme.gas) * P * transform_dU_dW(w_in, scheme.gas);
        }
        return {M.block(nx - 1, jw), P};
    };

    auto deposit = [&](int row_block, double weight, int col_block, const Mat4& m) {
        if (row_block < 0 || col_block < 0) return;
        G.block<4, 4>(4 * row_block, 4 * col_block) += weight * m;
    };

    auto face = [&](const Face& geo, const FaceLimiters& psi, std::array<std::pair<int, int>, 4> st) {
        const Vec4 &qm1 = q_at(st[0].first, st[0].second), &q0 = q_at(st[1].first, st[1].second);
        const Vec4 &qp1 = q_at(st[2].first, st[2].second), &qp2 = q_at(st[3].first, st[3].second);
        const auto [ql, qr] = apply_limiters(psi, qm1, q0, qp1, qp2);
        const auto [JL, JR] = flux_jacobians(scheme.solver, ql, qr, geo.normal, vars, scheme.gas, scheme.flux,
                                             opt.jacobian_step);
        const Mat4 halfL = 0.5 * psi.left.asDiagonal().toDenseMatrix();
        const Mat4 halfR = 0.5 * psi.right.asDiagonal().toDenseMatrix();
        const std::array<Mat4, 4> dflux = {-geo.length * JL * halfL, geo.length * JL * (Mat4::Identity() + halfL),
                                           geo.length * JR * (Mat4::Identity() + halfR), -geo.length * JR * halfR};
        const auto [left_cell_block, unused_l] = source(st[1].first, st[1].second);
        const auto [right_cell_block, unused_r] = source(st[2].first, st[2].second);
        const bool left_interior = st[1].first >= 0 && st[1].first < nx;
        const bool right_interior = st[2].first >= 0 && st[2].first < nx;
        for (int s = 0; s < 4; ++s) {
            const auto [cb, map] = source(st[s].first, st[s].second);
            if (cb < 0) continue;
            const Mat4 contrib = dflux[s] * map;
            if (left_interior)
                deposit(left_cell_block, -1.0 / grid.volume(st[1].first, ((st[1].second % ny) + ny) % ny), cb,
                        contrib);
            if (right_interior)
                deposit(right_cell_block, 1.0 / grid.volume(st[2].first, ((st[2].second % ny) + ny) % ny), cb,
                        contrib);
        }
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            face(grid.x_face(i, j), frozen.x_face(i, j), {{{i - 2, j}, {i - 1, j}, {i, j}, {i + 1, j}}});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            face(grid.y_face(i, j), frozen.y_face(i, j), {{{i, j - 2}, {i, j - 1}, {i, j}, {i, j + 1}}});

    // change of variables: rows to the matrix form, columns from the form to q
    const bool rows_prim = opt.form == MatrixForm::Primitive;
    const bool cols_to_cons = vars == ReconstructionVariables::Primitive && opt.form == MatrixForm::Conservative;
    const bool cols_to_prim = vars == ReconstructionVariables::Conservative && opt.form == MatrixForm::Primitive;
    for (int b = 0; b < nb; ++b) {
        const auto [i, j] = M.cells[b];
        const PrimitiveState w = mean.primitive(i, j, scheme.gas);
        if (rows_prim) G.middleRows(4 * b, 4) = (transform_dW_dU(w, scheme.gas) * G.middleRows(4 * b, 4)).eval();
        if (cols_to_prim) G.middleCols(4 * b, 4) = (G.middleCols(4 * b, 4) * M.dU_dW[b]).eval();
        if (cols_to_cons) G.middleCols(4 * b, 4) = (G.middleCols(4 * b, 4) * transform_dW_dU(w, scheme.gas)).eval();
    }
    M.S = std::move(G);
    return M;
}

struct EigenSpectrum {
    std::vector<std::complex<double>> eigenvalues;   // descending real part, then descending imaginary
    Eigen::MatrixXcd vectors;                        // columns match eigenvalues (empty unless requested)
    double max_real = 0.0;
    int argmax = 0;
    bool conjugate_pairs_ok = true;
    double max_real_all = 0.0;   // including excluded neutral modes
    std::vector<int> excluded;   // indices of steady-family modes left out of max_real
};

class EigenSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full complex spectrum of a real dense matrix (LAPACK dgeev: Hessenberg reduction plus
/// shifted QR).
inline EigenSpectrum spectrum(const Eigen::MatrixXd& S, bool want_vectors = false)
{
    const lapack_int n = static_cast<lapack_int>(S.rows());
    if (S.cols() != n) throw std::invalid_argument("spectrum: matrix not square");
    if (!S.allFinite()) throw EigenSolveError("spectrum: matrix has non-finite entries");
    Eigen::MatrixXd a = S;
    std::vector<double> wr(n), wi(n);
    Eigen::MatrixXd vr(want_vectors ? n : 1, want_vectors ? n : 1);
    double vl_dummy = 0.0;
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n, wr.data(),
                                          wi.data(), &vl_dummy, 1, vr.data(), want_vectors ? n : 1);
    if (info != 0) throw EigenSolveError("dgeev failed, info=" + std::to_string(info));

    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        if (wr[x] != wr[y]) return wr[x] > wr[y];
        return wi[x] > wi[y];
    });

    EigenSpectrum out;
    out.eigenvalues.reserve(n);
    for (int k : order) out.eigenvalues.emplace_back(wr[k], wi[k]);
    out.max_real = out.eigenvalues.front().real();
    out.max_real_all = out.max_real;
    out.argmax = 0;

    if (want_vectors) {
        Eigen::MatrixXcd raw(n, n);
        for (lapack_int k = 0; k < n; ++k) {
            if (wi[k] == 0.0) {
                raw.col(k) = vr.col(k).cast<std::complex<double>>();
            } else if (wi[k] > 0.0 && k + 1 < n) {
                for (lapack_int r = 0; r < n; ++r) {
                    raw(r, k) = {vr(r, k), vr(r, k + 1)};
                    raw(r, k + 1) = {vr(r, k), -vr(r, k + 1)};
                }
                ++k;
            }
        }
        out.vectors.resize(n, n);
        for (int k = 0; k < n; ++k) out.vectors.col(k) = raw.col(order[k]);
    }

    // conjugate pairing
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    std::vector<bool> used(n, false);
    for (int k = 0; k < n && out.conjugate_pairs_ok; ++k) {
        const auto lam = out.eigenvalues[k];
        if (std::abs(lam.imag()) <= 1e-12 * scale || used[k]) continue;
        bool found = false;
        for (int m = 0; m < n && !found; ++m)
            if (m != k && !used[m] && std::abs(out.eigenvalues[m] - std::conj(lam)) <= 1e-9 * scale) {
                used[m] = used[k] = true;
                found = true;
            }
        out.conjugate_pairs_ok = found;
    }
    return out;
}

/// Flags eigenpairs that belong to the family of steady discrete shocks: |lambda| <= tol with
/// an eigenvector that is uniform in j and carries no transverse component. Such modes shift the
/// shock along the family without producing transverse velocity. max_real and argmax are then
/// taken over the remaining eigenvalues. Eigenvectors are computed if they are missing.
inline void exclude_steady_family_modes(const StabilityMatrix& M, EigenSpectrum& spec, double tol)
{
    spec.excluded.clear();
    const int n = static_cast<int>(spec.eigenvalues.size());
    std::vector<int> candidates;
    for (int k = 0; k < n; ++k)
        if (std::abs(spec.eigenvalues[k]) <= tol) candidates.push_back(k);
    if (!candidates.empty()) {
        if (spec.vectors.size() == 0) spec = spectrum(M.S, true);
        for (int k : candidates) {
            const Eigen::VectorXcd x = spec.vectors.col(k);
            const double xmax = x.cwiseAbs().maxCoeff();
            bool family = xmax > 0.0;
            for (size_t b = 0; b < M.cells.size() && family; ++b) {
                const auto [i, j] = M.cells[b];
                const int b0 = M.block(i, 0);
                const Eigen::Index off = 4 * static_cast<Eigen::Index>(b);
                family = b0 >= 0 && std::abs(x[off + 2]) <= 1e-6 * xmax &&
                         (x.segment<4>(off) - x.segment<4>(4 * static_cast<Eigen::Index>(b0))).cwiseAbs().maxCoeff() <=
                             1e-6 * xmax;
            }
            if (family) spec.excluded.push_back(k);
        }
    }
    int best = -1;
    for (int k = 0; k < n; ++k)
        if (std::find(spec.excluded.begin(), spec.excluded.end(), k) == spec.excluded.end() &&
            (best < 0 || spec.eigenvalues[k].real() > spec.eigenvalues[best].real()))
            best = k;
    if (best < 0) best = 0;
    spec.argmax = best;
    spec.max_real = spec.eigenvalues[best].real();
}

/// Eigenvector of the most unstable eigenvalue reshaped onto the grid.
struct UnstableMode {
    std::complex<double> eigenvalue;
    int nx = 0, ny = 0;
    MatrixForm form = MatrixForm::Conservative;
    // per variable (in the matrix form), j * nx + i; frozen cells are zero
    std::array<std::vector<std::complex<double>>, 4> fields;
    // same mode expressed in primitive variables (rho, u, v, p)
    std::array<std::vector<std::complex<double>>, 4> primitive;
    double residual = 0.0;   // ||S x - lambda x|| / ||x||
};

/// Picks the eigenvector of the maximal-real-part eigenvalue, scales it so the largest
/// component equals 1 (unit magnitude, real and positive).
inline UnstableMode unstable_mode(const StabilityMatrix& M, const EigenSpectrum& spec)
{
    if (spec.vectors.size() == 0) throw std::invalid_argument("unstable_mode: spectrum computed without vectors");
    Eigen::VectorXcd x = spec.vectors.col(spec.argmax);
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    x /= x[imax];

    UnstableMode mode;
    mode.eigenvalue = spec.eigenvalues[spec.argmax];
    mode.nx = M.nx;
    mode.ny = M.ny;
    mode.form = M.form;
    mode.residual = (M.S.cast<std::complex<double>>() * x - mode.eigenvalue * x).norm() / x.norm();
    for (auto& f : mode.fields) f.assign(static_cast<size_t>(M.nx) * M.ny, {0.0, 0.0});
    for (auto& f : mode.primitive) f.assign(static_cast<size_t>(M.nx) * M.ny, {0.0, 0.0});
    for (size_t b = 0; b < M.cells.size(); ++b) {
        const auto [i, j] = M.cells[b];
        const Eigen::Vector4cd blk = x.segment<4>(4 * static_cast<Eigen::Index>(b));
        Eigen::Vector4cd prim = blk;
        if (M.form == MatrixForm::Conservative)
            prim = M.dU_dW[b].cast<std::complex<double>>().partialPivLu().solve(blk);
        for (int k = 0; k < 4; ++k) {
            mode.fields[k][static_cast<size_t>(j) * M.nx + i] = blk[k];
            mode.primitive[k][static_cast<size_t>(j) * M.nx + i] = prim[k];
        }
    }
    return mode;
}

enum class LocalizationKind { Upstream, ShockStructure, Downstream };

inline std::string to_string(LocalizationKind k)
{
    switch (k) {
    case LocalizationKind::Upstream: return "upstream";
    case LocalizationKind::ShockStructure: return "shock-structure";
    case LocalizationKind::Downstream: return "downstream";
    }
    return "?";
}

struct LocalizationCase {
    LocalizationKind kind;
    FieldState mean;
    ActiveMask mask;
    int active_halfwidth = 0;   // shock-structure case: columns shock +- halfwidth are active
};

/// Frozen-region studies. Upstream: interior U_L with right ghosts (U_M, U_R). Downstream:
/// interior U_R with left ghosts (U_M, U_L). ShockStructure: the converged profile with only
/// the shock column and one neighbour column on each side active.
inline LocalizationCase localization_case(LocalizationKind kind, const SteadyShockConfig& cfg,
                                          const Profile1D& profile)
{
    LocalizationCase lc{kind, steady_mean_field(cfg, profile), {}, 0};
    FieldState& f = lc.mean;
    const int nx = f.nx(), ny = f.ny();
    const int s = cfg.shock_index();
    const Vec4 uL = profile.cells.front();
    const Vec4 uR = profile.cells.back();
    const Vec4 uM = profile.cells[s];
    switch (kind) {
    case LocalizationKind::Upstream:
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) f(i, j) = uL;
        apply_x_boundaries(f, {XBoundary::fixed(uL, uL), XBoundary::fixed(uM, uR)});
        lc.mask = all_active(nx, ny);
        break;
    case LocalizationKind::Downstream:
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) f(i, j) = uR;
        apply_x_boundaries(f, {XBoundary::fixed(uM, uL), XBoundary::fixed(uR, uR)});
        lc.mask = all_active(nx, ny);
        break;
    case LocalizationKind::ShockStructure:
        lc.active_halfwidth = 1;
        lc.mask.assign(static_cast<size_t>(nx) * ny, false);
        for (int j = 0; j < ny; ++j)
            for (int i = s - 1; i <= s + 1; ++i) lc.mask[static_cast<size_t>(j) * nx + i] = true;
        break;
    }
    apply_periodic(f);
    return lc;
}

/// Result of the full matrix analysis of one steady-shock configuration.
struct AnalysisResult {
    Profile1D profile;
    StabilityMatrix matrix;
    EigenSpectrum spectrum;
    std::optional<UnstableMode> mode;
    double mean_residual = 0.0;   // 2D residual of the mean field under the scheme that produced it
};

/// Scheme the mean field is steady for: the analysed scheme plus the mass-flux fix when the
/// 1D pre-solve used it.
inline SchemeConfig steady_scheme(const SteadyShockConfig& cfg, const Profile1D& profile)
{
    SchemeConfig s = cfg.scheme();
    if (profile.mass_flux_fix) s.mass_flux_fix = MassFluxFix{cfg.shock_index(), cfg.mass_flux_fix_kind};
    return s;
}

inline void require_shock_structure(const SteadyShockConfig& cfg)
{
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw std::invalid_argument("stability analysis needs an interior shock point: 0 < epsilon < 1");
}

/// Pre-solve, project, assemble S on the configured grid, and compute its spectrum.
/// S always linearises the plain scheme; the steadiness check uses `steady_scheme`.
inline AnalysisResult analyze(const SteadyShockConfig& cfg, const StabilityOptions& opt = {}, bool want_mode = false,
                              const Profile1D* presolved = nullptr)
{
    require_shock_structure(cfg);
    AnalysisResult out;
    out.profile = presolved ? *presolved : solve_1d_steady(cfg);
    const FieldState mean = steady_mean_field(cfg, out.profile);
    out.mean_residual = max_abs(residual(mean, steady_scheme(cfg, out.profile)));
    const double tol = out.profile.quasi_steady ? std::max(opt.steady_tol, cfg.quasi_steady_tol) : opt.steady_tol;
    if (opt.require_steady && !(out.mean_residual < tol))
        throw NotSteadyError("mean field is not steady: max|R|=" + std::to_string(out.mean_residual),
                             out.mean_residual);
    StabilityOptions o = opt;
    o.require_steady = false;
    out.matrix = assemble_matrix(mean, cfg.scheme(), o);
    out.spectrum = spectrum(out.matrix.S, want_mode);
    if (opt.exclude_steady_family) exclude_steady_family_modes(out.matrix, out.spectrum, opt.neutral_tol);
    if (want_mode) out.mode = unstable_mode(out.matrix, out.spectrum);
    return out;
}

/// Matrix analysis of one localisation case.
inline AnalysisResult analyze_localization(const SteadyShockConfig& cfg, LocalizationKind kind,
                                           const StabilityOptions& opt = {}, bool want_mode = false,
                                           const Profile1D* presolved = nullptr)
{
    require_shock_structure(cfg);
    AnalysisResult out;
    out.profile = presolved ? *presolved : solve_1d_steady(cfg);
    const LocalizationCase lc = localization_case(kind, cfg, out.profile);
    out.mean_residual = max_abs(residual(lc.mean, steady_scheme(cfg, out.profile)));
    StabilityOptions o = opt;
    o.require_steady = false;   // frozen regions are only steady where they are active
    out.matrix = assemble_matrix(lc.mean, cfg.scheme(), o, &lc.mask);
    out.spectrum = spectrum(out.matrix.S, want_mode);
    if (opt.exclude_steady_family) exclude_steady_family_modes(out.matrix, out.spectrum, opt.neutral_tol);
    if (want_mode) out.mode = unstable_mode(out.matrix, out.spectrum);
    return out;
}

} // namespace carbuncle
