#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "carbuncle/euler.hpp"

namespace carbuncle {

enum class LimiterKind { Superbee, VanLeer, VanAlbada, Minmod, None };

enum class ReconstructionVariables { Conservative, Primitive };

inline std::string to_string(LimiterKind k)
{
    switch (k) {
    case LimiterKind::Superbee: return "superbee";
    case LimiterKind::VanLeer: return "vanleer";
    case LimiterKind::VanAlbada: return "vanalbada";
    case LimiterKind::Minmod: return "minmod";
    case LimiterKind::None: return "none";
    }
    return "?";
}

inline LimiterKind parse_limiter(const std::string& s)
{
    if (s == "superbee") return LimiterKind::Superbee;
    if (s == "vanleer" || s == "van-leer") return LimiterKind::VanLeer;
    if (s == "vanalbada" || s == "van-albada") return LimiterKind::VanAlbada;
    if (s == "minmod") return LimiterKind::Minmod;
    if (s == "none" || s == "first-order") return LimiterKind::None;
    throw std::invalid_argument("unknown limiter '" + s + "'");
}

inline std::string to_string(ReconstructionVariables v)
{
    return v == ReconstructionVariables::Conservative ? "cons" : "prim";
}

inline ReconstructionVariables parse_reconstruction_variables(const std::string& s)
{
    if (s == "cons" || s == "conservative") return ReconstructionVariables::Conservative;
    if (s == "prim" || s == "primitive") return ReconstructionVariables::Primitive;
    throw std::invalid_argument("unknown reconstruction variables '" + s + "'");
}

/// Limiter function Psi(r). Every limiter vanishes for r <= 0.
inline double limiter_value(LimiterKind kind, double r)
{
    if (kind == LimiterKind::None || !(r > 0.0)) return 0.0;
    switch (kind) {
    case LimiterKind::Superbee: return std::max({0.0, std::min(2.0 * r, 1.0), std::min(r, 2.0)});
    case LimiterKind::VanLeer: return (r + std::abs(r)) / (1.0 + r);
    case LimiterKind::VanAlbada: return (r * r + r) / (1.0 + r * r);
    case LimiterKind::Minmod: return std::max(0.0, std::min(r, 1.0));
    case LimiterKind::None: return 0.0;
    }
    return 0.0;
}

struct MusclOptions {
    LimiterKind limiter = LimiterKind::VanAlbada;
    ReconstructionVariables vars = ReconstructionVariables::Conservative;
    // A difference counts as zero when |diff| <= zero_floor * max(|a|, |b|).
    double zero_floor = 1e-14;

    bool second_order() const { return limiter != LimiterKind::None; }
};

/// Gradient ratios at face i+1/2 from the stencil (q[i-1], q[i], q[i+1], q[i+2]).
/// A component whose denominator is (numerically) zero is flagged and its ratio set to 0.
struct GradientRatios {
    Vec4 r_left = Vec4::Zero();
    Vec4 r_right = Vec4::Zero();
    std::array<bool, 4> left_degenerate{};
    std::array<bool, 4> right_degenerate{};
};

inline bool is_zero_difference(double a, double b, double floor)
{
    const double d = a - b;
    return std::abs(d) <= floor * std::max(std::abs(a), std::abs(b));
}

inline GradientRatios ratio(const Vec4& qm1, const Vec4& q0, const Vec4& qp1, const Vec4& qp2,
                            double zero_floor = 0.0)
{
    GradientRatios out;
    for (int k = 0; k < 4; ++k) {
        const double centre = qp1[k] - q0[k];
        if (is_zero_difference(q0[k], qm1[k], zero_floor))
            out.left_degenerate[k] = true;
        else
            out.r_left[k] = centre / (q0[k] - qm1[k]);
        if (is_zero_difference(qp2[k], qp1[k], zero_floor))
            out.right_degenerate[k] = true;
        else
            out.r_right[k] = centre / (qp2[k] - qp1[k]);
    }
    return out;
}

/// Per-component limiter values on the two sides of one face.
struct FaceLimiters {
    Vec4 left = Vec4::Zero();
    Vec4 right = Vec4::Zero();
};

inline FaceLimiters face_limiters(LimiterKind kind, const Vec4& qm1, const Vec4& q0, const Vec4& qp1,
                                  const Vec4& qp2, double zero_floor)
{
    FaceLimiters psi;
    if (kind == LimiterKind::None) return psi;
    const GradientRatios r = ratio(qm1, q0, qp1, qp2, zero_floor);
    for (int k = 0; k < 4; ++k) {
        psi.left[k] = r.left_degenerate[k] ? 0.0 : limiter_value(kind, r.r_left[k]);
        psi.right[k] = r.right_degenerate[k] ? 0.0 : limiter_value(kind, r.r_right[k]);
    }
    return psi;
}

/// Interface values q^L = q_i + Psi^L/2 (q_i - q_{i-1}), q^R = q_{i+1} - Psi^R/2 (q_{i+2} - q_{i+1}).
inline std::pair<Vec4, Vec4> apply_limiters(const FaceLimiters& psi, const Vec4& qm1, const Vec4& q0,
                                            const Vec4& qp1, const Vec4& qp2)
{
    const Vec4 left = q0 + 0.5 * psi.left.cwiseProduct(q0 - qm1);
    const Vec4 right = qp1 - 0.5 * psi.right.cwiseProduct(qp2 - qp1);
    return {left, right};
}

inline PrimitiveState reconstruction_to_primitive(const Vec4& q, ReconstructionVariables vars, double gamma)
{
    return vars == ReconstructionVariables::Conservative ? to_primitive_raw(q, gamma) : PrimitiveState::from(q);
}

struct FaceStates {
    PrimitiveState left;
    PrimitiveState right;
    FaceLimiters psi;
    bool fell_back = false;   // reconstructed state was inadmissible, face reverted to first order
};

/// Limits the stencil with the given limiter and falls back to first order at the face
/// when a reconstructed state is inadmissible.
inline FaceStates reconstruct_with(const FaceLimiters& psi_in, ReconstructionVariables vars, const Vec4& qm1,
                                   const Vec4& q0, const Vec4& qp1, const Vec4& qp2, double gamma)
{
    FaceStates out;
    out.psi = psi_in;
    const auto [ql, qr] = apply_limiters(psi_in, qm1, q0, qp1, qp2);
    out.left = reconstruction_to_primitive(ql, vars, gamma);
    out.right = reconstruction_to_primitive(qr, vars, gamma);
    if (!is_admissible(out.left) || !is_admissible(out.right)) {
        out.fell_back = true;
        out.psi = FaceLimiters{};
        out.left = reconstruction_to_primitive(q0, vars, gamma);
        out.right = reconstruction_to_primitive(qp1, vars, gamma);
    }
    return out;
}

/// MUSCL reconstruction on the 4-cell stencil (q_{i-1}, q_i, q_{i+1}, q_{i+2}) given in
/// the configured reconstruction variables.
inline FaceStates reconstruct_face(const MusclOptions& opt, const Vec4& qm1, const Vec4& q0, const Vec4& qp1,
                                   const Vec4& qp2, double gamma)
{
    return reconstruct_with(face_limiters(opt.limiter, qm1, q0, qp1, qp2, opt.zero_floor), opt.vars, qm1, q0,
                            qp1, qp2, gamma);
}

} // namespace carbuncle
