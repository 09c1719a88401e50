#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace carbuncle {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Thrown when a state has non-positive density, pressure or internal energy.
class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Calorically perfect gas. Gamma defaults to the diatomic value 1.4.
struct GasModel {
    double gamma = 1.4;

    explicit GasModel(double g = 1.4) : gamma(g)
    {
        if (!(g > 1.0)) throw std::invalid_argument("GasModel: gamma must exceed 1");
    }
};

struct PrimitiveState;

/// Cell-averaged conserved variables (rho, rho u, rho v, rho e).
struct ConservedState {
    double rho = 0.0;
    double rho_u = 0.0;
    double rho_v = 0.0;
    double rho_e = 0.0;

    Vec4 vec() const { return Vec4(rho, rho_u, rho_v, rho_e); }
    static ConservedState from(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// Primitive variables (rho, u, v, p).
struct PrimitiveState {
    double rho = 0.0;
    double u = 0.0;
    double v = 0.0;
    double p = 0.0;

    Vec4 vec() const { return Vec4(rho, u, v, p); }
    static PrimitiveState from(const Vec4& w) { return {w[0], w[1], w[2], w[3]}; }
};

inline double internal_energy_density(const ConservedState& U)
{
    return U.rho_e - 0.5 * (U.rho_u * U.rho_u + U.rho_v * U.rho_v) / U.rho;
}

inline bool is_admissible(const ConservedState& U)
{
    return U.rho > 0.0 && std::isfinite(U.rho_e) && internal_energy_density(U) > 0.0;
}

inline bool is_admissible(const PrimitiveState& W)
{
    return W.rho > 0.0 && W.p > 0.0 && std::isfinite(W.u) && std::isfinite(W.v);
}

inline void require_admissible(const ConservedState& U)
{
    if (!(U.rho > 0.0))
        throw AdmissibilityError("non-positive density: rho=" + std::to_string(U.rho));
    if (!(internal_energy_density(U) > 0.0))
        throw AdmissibilityError("non-positive internal energy: rho_e=" + std::to_string(U.rho_e));
}

inline void require_admissible(const PrimitiveState& W)
{
    if (!is_admissible(W))
        throw AdmissibilityError("inadmissible primitive state: rho=" + std::to_string(W.rho) +
                                 " p=" + std::to_string(W.p));
}

inline double pressure_from_conserved(const ConservedState& U, const GasModel& gas)
{
    require_admissible(U);
    return (gas.gamma - 1.0) * internal_energy_density(U);
}

inline double sound_speed(const PrimitiveState& W, const GasModel& gas)
{
    return std::sqrt(gas.gamma * W.p / W.rho);
}

inline double total_energy_density(const PrimitiveState& W, const GasModel& gas)
{
    return W.p / (gas.gamma - 1.0) + 0.5 * W.rho * (W.u * W.u + W.v * W.v);
}

inline PrimitiveState conserved_to_primitive(const ConservedState& U, const GasModel& gas)
{
    require_admissible(U);
    return {U.rho, U.rho_u / U.rho, U.rho_v / U.rho, (gas.gamma - 1.0) * internal_energy_density(U)};
}

inline ConservedState primitive_to_conserved(const PrimitiveState& W, const GasModel& gas)
{
    require_admissible(W);
    return {W.rho, W.rho * W.u, W.rho * W.v, total_energy_density(W, gas)};
}

// Unchecked variants for hot loops and finite-difference probes.
inline PrimitiveState to_primitive_raw(const Vec4& U, double gamma)
{
    const double u = U[1] / U[0];
    const double v = U[2] / U[0];
    return {U[0], u, v, (gamma - 1.0) * (U[3] - 0.5 * U[0] * (u * u + v * v))};
}

inline Vec4 to_conserved_raw(const PrimitiveState& W, double gamma)
{
    return Vec4(W.rho, W.rho * W.u, W.rho * W.v,
                W.p / (gamma - 1.0) + 0.5 * W.rho * (W.u * W.u + W.v * W.v));
}

/// Exact Euler flux through a face with unit normal n.
inline Vec4 physical_flux(const PrimitiveState& W, Vec2 n, const GasModel& gas)
{
    const double q = W.u * n.x + W.v * n.y;
    const double rho_e = total_energy_density(W, gas);
    return Vec4(W.rho * q,
                W.rho * q * W.u + W.p * n.x,
                W.rho * q * W.v + W.p * n.y,
                (rho_e + W.p) * q);
}

/// dU/dW for W = (rho, u, v, p).
inline Mat4 transform_dU_dW(const PrimitiveState& W, const GasModel& gas)
{
    Mat4 T;
    T << 1.0, 0.0, 0.0, 0.0,
         W.u, W.rho, 0.0, 0.0,
         W.v, 0.0, W.rho, 0.0,
         0.5 * (W.u * W.u + W.v * W.v), W.rho * W.u, W.rho * W.v, 1.0 / (gas.gamma - 1.0);
    return T;
}

/// Closed-form inverse of transform_dU_dW, i.e. dW/dU.
inline Mat4 transform_dW_dU(const PrimitiveState& W, const GasModel& gas)
{
    const double gm1 = gas.gamma - 1.0;
    const double inv_rho = 1.0 / W.rho;
    Mat4 T;
    T << 1.0, 0.0, 0.0, 0.0,
         -W.u * inv_rho, inv_rho, 0.0, 0.0,
         -W.v * inv_rho, 0.0, inv_rho, 0.0,
         0.5 * gm1 * (W.u * W.u + W.v * W.v), -gm1 * W.u, -gm1 * W.v, gm1;
    return T;
}

} // namespace carbuncle
