#include <gtest/gtest.h>

#include "carbuncle/shock_problem.hpp"

using namespace carbuncle;

namespace {
const LimiterKind tvd[] = {LimiterKind::Superbee, LimiterKind::VanLeer, LimiterKind::VanAlbada,
                           LimiterKind::Minmod};
Vec4 all(double v) { return Vec4::Constant(v); }
} // namespace

TEST(Muscl, LimiterValues)
{
    EXPECT_DOUBLE_EQ(limiter_value(LimiterKind::Minmod, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(limiter_value(LimiterKind::Superbee, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(limiter_value(LimiterKind::VanAlbada, 2.0), 1.2);
    for (auto k : tvd) {
        EXPECT_DOUBLE_EQ(limiter_value(k, 1.0), 1.0) << to_string(k);
        EXPECT_DOUBLE_EQ(limiter_value(k, -1.0), 0.0) << to_string(k);
    }
}

TEST(Muscl, LimitersStayInTvdRegion)
{
    for (auto k : tvd)
        for (double r = -5.0; r <= 20.0; r += 0.01) {
            const double psi = limiter_value(k, r);
            EXPECT_GE(psi, 0.0) << to_string(k) << " r=" << r;
            EXPECT_LE(psi, 2.0 + 1e-15) << to_string(k) << " r=" << r;
            if (r > 0.0) {
                EXPECT_LE(psi, 2.0 * r + 1e-15) << to_string(k) << " r=" << r;
            }
        }
}

TEST(Muscl, GradientRatios)
{
    GradientRatios g = ratio(all(0), all(1), all(2), all(3));
    EXPECT_EQ(g.r_left, all(1));
    EXPECT_EQ(g.r_right, all(1));

    g = ratio(all(1), all(1), all(2), all(2));
    for (int k = 0; k < 4; ++k) {
        EXPECT_TRUE(g.left_degenerate[k]);
        EXPECT_TRUE(g.right_degenerate[k]);
    }
    const FaceLimiters psi = face_limiters(LimiterKind::Superbee, all(1), all(1), all(2), all(2), 0.0);
    EXPECT_EQ(psi.left, Vec4::Zero());
    EXPECT_EQ(psi.right, Vec4::Zero());

    g = ratio(all(0), all(1), all(0.5), all(0.25));
    EXPECT_DOUBLE_EQ(g.r_left[0], -0.5);
    EXPECT_DOUBLE_EQ(g.r_right[0], 2.0);
}

TEST(Muscl, UniformAndLinearStencils)
{
    const Vec4 w(1.0, 0.3, -0.2, 0.8);
    for (auto vars : {ReconstructionVariables::Conservative, ReconstructionVariables::Primitive})
        for (auto k : tvd) {
            FaceStates s = reconstruct_face({k, vars}, w, w, w, w, 1.4);
            EXPECT_NEAR((s.left.vec() - reconstruction_to_primitive(w, vars, 1.4).vec()).norm(), 0.0, 1e-15);
            EXPECT_NEAR((s.right.vec() - reconstruction_to_primitive(w, vars, 1.4).vec()).norm(), 0.0, 1e-15);
        }
    const Vec4 d(0.1, 0.05, 0.02, 0.1);
    const Vec4 q0(1.0, 0.5, 0.1, 2.0);
    for (auto k : tvd) {
        const FaceStates s =
            reconstruct_face({k, ReconstructionVariables::Primitive}, q0 - d, q0, q0 + d, q0 + 2 * d, 1.4);
        EXPECT_NEAR((s.left.vec() - (q0 + 0.5 * d)).norm(), 0.0, 1e-14) << to_string(k);
        EXPECT_NEAR((s.right.vec() - (q0 + 0.5 * d)).norm(), 0.0, 1e-14) << to_string(k);
    }
}

TEST(Muscl, ShockStencilMatchesScalarEvaluation)
{
    // stencils around the shock cell at eps = 0.1, M0 = 20, minmod, evaluated one component at a time
    const GasModel gas{1.4};
    const ShockStates st = initial_states(20.0, gas);
    const Vec4 uL = st.left.vec(), uR = st.right.vec();
    const Vec4 uM = to_conserved_raw(intermediate_state(20.0, 0.1, gas), 1.4);
    auto minmod = [](double r) { return std::max(0.0, std::min(1.0, r)); };
    int fallbacks = 0;
    for (auto vars : {ReconstructionVariables::Conservative, ReconstructionVariables::Primitive})
        for (const auto& cons : {std::array<Vec4, 4>{uL, uL, uM, uR}, std::array<Vec4, 4>{uL, uM, uR, uR}}) {
            std::array<Vec4, 4> q;
            for (int m = 0; m < 4; ++m)
                q[m] = vars == ReconstructionVariables::Conservative ? cons[m] : to_primitive_raw(cons[m], 1.4).vec();
            Vec4 qL, qR;
            for (int k = 0; k < 4; ++k) {
                const double a = q[0][k], b = q[1][k], c = q[2][k], d = q[3][k];
                const double psiL = (b - a) == 0.0 ? 0.0 : minmod((c - b) / (b - a));
                const double psiR = (d - c) == 0.0 ? 0.0 : minmod((c - b) / (d - c));
                qL[k] = b + 0.5 * psiL * (b - a);
                qR[k] = c - 0.5 * psiR * (d - c);
            }
            const PrimitiveState wl = reconstruction_to_primitive(qL, vars, 1.4);
            const PrimitiveState wr = reconstruction_to_primitive(qR, vars, 1.4);
            const bool admissible = is_admissible(wl) && is_admissible(wr);
            if (!admissible) {
                // inadmissible extrapolation: the face reverts to first order
                qL = q[1];
                qR = q[2];
                ++fallbacks;
            }
            const FaceStates s = reconstruct_face({LimiterKind::Minmod, vars}, q[0], q[1], q[2], q[3], 1.4);
            EXPECT_EQ(s.fell_back, !admissible);
            const Vec4 el = reconstruction_to_primitive(qL, vars, 1.4).vec();
            const Vec4 er = reconstruction_to_primitive(qR, vars, 1.4).vec();
            for (int k = 0; k < 4; ++k) {
                EXPECT_NEAR(s.left.vec()[k], el[k], 1e-12 * std::max(1.0, std::abs(el[k])));
                EXPECT_NEAR(s.right.vec()[k], er[k], 1e-12 * std::max(1.0, std::abs(er[k])));
            }
        }
    EXPECT_GE(fallbacks, 1);   // conservative extrapolation at Mach 20 drives the pressure negative
}

TEST(Muscl, InadmissibleReconstructionFallsBack)
{
    // psi = 2 extrapolates the pressure of the left state to 0.1 - 0.9 < 0
    const Vec4 b(1.0, 0.0, 0.0, 1.0), c(1.0, 0.0, 0.0, 0.9);
    const FaceLimiters psi{Vec4::Constant(2.0), Vec4::Constant(2.0)};
    const FaceStates f = reconstruct_with(psi, ReconstructionVariables::Primitive, b, Vec4(1.0, 0.0, 0.0, 0.1), c,
                                          Vec4(1, 0, 0, 10.0), 1.4);
    EXPECT_TRUE(f.fell_back);
    EXPECT_EQ(f.psi.left, Vec4::Zero());
    EXPECT_DOUBLE_EQ(f.left.p, 0.1);
    EXPECT_DOUBLE_EQ(f.right.p, 0.9);
}
