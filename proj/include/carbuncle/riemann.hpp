#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "carbuncle/euler.hpp"

namespace carbuncle {

enum class RiemannSolverKind { Roe, HLL, HLLC, VanLeerFVS, AUSMPlus };

inline std::string to_string(RiemannSolverKind k)
{
    switch (k) {
    case RiemannSolverKind::Roe: return "roe";
    case RiemannSolverKind::HLL: return "hll";
    case RiemannSolverKind::HLLC: return "hllc";
    case RiemannSolverKind::VanLeerFVS: return "vanleer";
    case RiemannSolverKind::AUSMPlus: return "ausm+";
    }
    return "?";
}

inline RiemannSolverKind parse_riemann_solver(const std::string& s)
{
    if (s == "roe") return RiemannSolverKind::Roe;
    if (s == "hll") return RiemannSolverKind::HLL;
    if (s == "hllc") return RiemannSolverKind::HLLC;
    if (s == "vanleer" || s == "van-leer") return RiemannSolverKind::VanLeerFVS;
    if (s == "ausm+" || s == "ausmplus") return RiemannSolverKind::AUSMPlus;
    throw std::invalid_argument("unknown Riemann solver '" + s + "'");
}

struct FluxOptions {
    // Harten-type entropy fix for Roe; off by default so the plain scheme is analysed.
    bool roe_entropy_fix = false;
    double roe_entropy_fix_delta = 0.1;   // in units of the Roe sound speed
    // AUSM+ polynomial coefficients.
    double ausm_alpha = 3.0 / 16.0;
    double ausm_beta = 1.0 / 8.0;
};

namespace detail {

/// State expressed in the face frame: q normal velocity, t tangential velocity.
struct FrameState {
    double rho, q, t, p;
    double a, H, E;   // sound speed, specific total enthalpy, total energy per volume

    FrameState(const PrimitiveState& W, Vec2 n, double gamma)
        : rho(W.rho), q(W.u * n.x + W.v * n.y), t(-W.u * n.y + W.v * n.x), p(W.p)
    {
        a = std::sqrt(gamma * p / rho);
        E = p / (gamma - 1.0) + 0.5 * rho * (q * q + t * t);
        H = (E + p) / rho;
    }

    Vec4 conserved() const { return Vec4(rho, rho * q, rho * t, E); }
    Vec4 flux() const { return Vec4(rho * q, rho * q * q + p, rho * q * t, (E + p) * q); }
};

inline Vec4 rotate_back(const Vec4& f, Vec2 n)
{
    return Vec4(f[0], f[1] * n.x - f[2] * n.y, f[1] * n.y + f[2] * n.x, f[3]);
}

} // namespace detail

/// Roe-averaged quantities in the face frame.
struct RoeAverage {
    double rho, q, t, H, a;
};

inline RoeAverage roe_average(const PrimitiveState& WL, const PrimitiveState& WR, Vec2 n, const GasModel& gas)
{
    const detail::FrameState L(WL, n, gas.gamma), R(WR, n, gas.gamma);
    const double sl = std::sqrt(L.rho), sr = std::sqrt(R.rho);
    const double inv = 1.0 / (sl + sr);
    RoeAverage avg;
    avg.rho = sl * sr;
    avg.q = (sl * L.q + sr * R.q) * inv;
    avg.t = (sl * L.t + sr * R.t) * inv;
    avg.H = (sl * L.H + sr * R.H) * inv;
    const double a2 = (gas.gamma - 1.0) * (avg.H - 0.5 * (avg.q * avg.q + avg.t * avg.t));
    if (!(a2 > 0.0))
        throw AdmissibilityError("Roe average has non-positive squared sound speed");
    avg.a = std::sqrt(a2);
    return avg;
}

namespace detail {

inline Vec4 roe_flux(const FrameState& L, const FrameState& R, const PrimitiveState& WL,
                     const PrimitiveState& WR, Vec2 n, const GasModel& gas, const FluxOptions& opt)
{
    const RoeAverage m = roe_average(WL, WR, n, gas);
    const double dp = R.p - L.p, dq = R.q - L.q, dt = R.t - L.t, drho = R.rho - L.rho;
    const double a2 = m.a * m.a;

    const double alpha1 = (dp - m.rho * m.a * dq) / (2.0 * a2);
    const double alpha2 = drho - dp / a2;
    const double alpha3 = m.rho * dt;
    const double alpha4 = (dp + m.rho * m.a * dq) / (2.0 * a2);

    double l1 = std::abs(m.q - m.a), l2 = std::abs(m.q), l4 = std::abs(m.q + m.a);
    if (opt.roe_entropy_fix) {
        const double d = opt.roe_entropy_fix_delta * m.a;
        auto harten = [d](double l) { return l < d ? 0.5 * (l * l + d * d) / d : l; };
        l1 = harten(l1);
        l4 = harten(l4);
    }

    const Vec4 r1(1.0, m.q - m.a, m.t, m.H - m.q * m.a);
    const Vec4 r2(1.0, m.q, m.t, 0.5 * (m.q * m.q + m.t * m.t));
    const Vec4 r3(0.0, 0.0, 1.0, m.t);
    const Vec4 r4(1.0, m.q + m.a, m.t, m.H + m.q * m.a);

    const Vec4 dissipation = l1 * alpha1 * r1 + l2 * alpha2 * r2 + l2 * alpha3 * r3 + l4 * alpha4 * r4;
    return 0.5 * (L.flux() + R.flux()) - 0.5 * dissipation;
}

/// Davis estimates S_L = min(qL - aL, qR - aR), S_R = max(qL + aL, qR + aR).
inline std::pair<double, double> davis_speeds(const FrameState& L, const FrameState& R)
{
    return {std::min(L.q - L.a, R.q - R.a), std::max(L.q + L.a, R.q + R.a)};
}

inline Vec4 hll_flux(const FrameState& L, const FrameState& R)
{
    const auto [sl, sr] = davis_speeds(L, R);
    if (sl >= 0.0) return L.flux();
    if (sr <= 0.0) return R.flux();
    return (sr * L.flux() - sl * R.flux() + sl * sr * (R.conserved() - L.conserved())) / (sr - sl);
}

inline Vec4 hllc_flux(const FrameState& L, const FrameState& R)
{
    const auto [sl, sr] = davis_speeds(L, R);
    if (sl >= 0.0) return L.flux();
    if (sr <= 0.0) return R.flux();
    const double ml = L.rho * (sl - L.q);
    const double mr = R.rho * (sr - R.q);
    const double s_star = (R.p - L.p + ml * L.q - mr * R.q) / (ml - mr);

    auto star_state = [s_star](const FrameState& K, double sk) {
        const double factor = K.rho * (sk - K.q) / (sk - s_star);
        return Vec4(factor, factor * s_star, factor * K.t,
                    factor * (K.E / K.rho + (s_star - K.q) * (s_star + K.p / (K.rho * (sk - K.q)))));
    };
    if (s_star >= 0.0) return L.flux() + sl * (star_state(L, sl) - L.conserved());
    return R.flux() + sr * (star_state(R, sr) - R.conserved());
}

inline Vec4 van_leer_split(const FrameState& S, double gamma, bool positive)
{
    const double M = S.q / S.a;
    if (M >= 1.0) return positive ? S.flux() : Vec4::Zero();
    if (M <= -1.0) return positive ? Vec4::Zero() : S.flux();
    const double sign = positive ? 1.0 : -1.0;
    const double mass = sign * 0.25 * S.rho * S.a * (M + sign) * (M + sign);
    const double qn = ((gamma - 1.0) * S.q + sign * 2.0 * S.a) / gamma;
    return Vec4(mass, mass * qn, mass * S.t,
                mass * (0.5 * qn * qn * gamma * gamma / (gamma * gamma - 1.0) + 0.5 * S.t * S.t));
}

inline Vec4 van_leer_flux(const FrameState& L, const FrameState& R, double gamma)
{
    return van_leer_split(L, gamma, true) + van_leer_split(R, gamma, false);
}

inline Vec4 ausm_plus_flux(const FrameState& L, const FrameState& R, double gamma, const FluxOptions& opt)
{
    // interface sound speed from the critical speed of sound a*^2 = 2(g-1)/(g+1) H, with the
    // directional bound that keeps a normal shock sharp
    auto a_tilde = [gamma](const FrameState& S, double q_towards_face) {
        const double a_star = std::sqrt(2.0 * (gamma - 1.0) / (gamma + 1.0) * S.H);
        return a_star * a_star / std::max(a_star, q_towards_face);
    };
    const double a_half = std::min(a_tilde(L, L.q), a_tilde(R, -R.q));
    const double ML = L.q / a_half, MR = R.q / a_half;
    const double beta = opt.ausm_beta, alpha = opt.ausm_alpha;

    auto mach_split = [beta](double M, double sign) {
        if (std::abs(M) >= 1.0) return 0.5 * (M + sign * std::abs(M));
        const double m2 = M * M - 1.0;
        return sign * 0.25 * (M + sign) * (M + sign) + sign * beta * m2 * m2;
    };
    auto pressure_split = [alpha](double M, double sign) {
        if (std::abs(M) >= 1.0) return 0.5 * (1.0 + sign * (M > 0.0 ? 1.0 : -1.0));
        const double m2 = M * M - 1.0;
        return 0.25 * (M + sign) * (M + sign) * (2.0 - sign * M) + sign * alpha * M * m2 * m2;
    };

    const double m_half = mach_split(ML, 1.0) + mach_split(MR, -1.0);
    const double p_half = pressure_split(ML, 1.0) * L.p + pressure_split(MR, -1.0) * R.p;
    const double mass = a_half * m_half;
    const FrameState& up = m_half >= 0.0 ? L : R;
    return Vec4(mass * up.rho, mass * up.rho * up.q + p_half, mass * up.rho * up.t, mass * up.rho * up.H);
}

} // namespace detail

/// Numerical flux through a face with unit normal n (pointing from L to R).
inline Vec4 numerical_flux(RiemannSolverKind kind, const PrimitiveState& WL, const PrimitiveState& WR, Vec2 n,
                           const GasModel& gas, const FluxOptions& opt = {})
{
    const detail::FrameState L(WL, n, gas.gamma), R(WR, n, gas.gamma);
    Vec4 f = Vec4::Zero();
    switch (kind) {
    case RiemannSolverKind::Roe: f = detail::roe_flux(L, R, WL, WR, n, gas, opt); break;
    case RiemannSolverKind::HLL: f = detail::hll_flux(L, R); break;
    case RiemannSolverKind::HLLC: f = detail::hllc_flux(L, R); break;
    case RiemannSolverKind::VanLeerFVS: f = detail::van_leer_flux(L, R, gas.gamma); break;
    case RiemannSolverKind::AUSMPlus: f = detail::ausm_plus_flux(L, R, gas.gamma, opt); break;
    }
    return detail::rotate_back(f, n);
}

} // namespace carbuncle
