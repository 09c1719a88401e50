#include <gtest/gtest.h>

#include "carbuncle/shock_problem.hpp"

using namespace carbuncle;

namespace {
const GasModel gas{1.4};
}

TEST(Euler, PressureOfStaticState)
{
    const ConservedState U{1.0, 0.0, 0.0, 1.0 / (1.4 * 0.4)};
    EXPECT_NEAR(pressure_from_conserved(U, gas), 1.0 / 1.4, 1e-15);
}

TEST(Euler, PressureOfUpstreamStateAtMach20)
{
    const ConservedState U = initial_states(20.0, gas).left;
    EXPECT_NEAR(U.rho_e, 0.50446428571428571429, 1e-15);
    EXPECT_NEAR(pressure_from_conserved(U, gas), 1.0 / (1.4 * 400.0), 1e-15);
    const PrimitiveState W = conserved_to_primitive(U, gas);
    EXPECT_DOUBLE_EQ(W.rho, 1.0);
    EXPECT_DOUBLE_EQ(W.u, 1.0);
    EXPECT_DOUBLE_EQ(W.v, 0.0);
    EXPECT_NEAR(W.p, 0.00178571428571428571, 1e-15);
}

TEST(Euler, NegativeInternalEnergyIsRejected)
{
    const ConservedState U{1.0, 1.0, 0.0, 0.4};
    EXPECT_FALSE(is_admissible(U));
    EXPECT_THROW(pressure_from_conserved(U, gas), AdmissibilityError);
    EXPECT_THROW(conserved_to_primitive(U, gas), AdmissibilityError);
}

TEST(Euler, RoundTripConversions)
{
    const PrimitiveState W{1.0, 0.5, -0.2, 0.7};
    const PrimitiveState back = conserved_to_primitive(primitive_to_conserved(W, gas), gas);
    EXPECT_NEAR(back.rho, W.rho, 1e-13);
    EXPECT_NEAR(back.u, W.u, 1e-13);
    EXPECT_NEAR(back.v, W.v, 1e-13);
    EXPECT_NEAR(back.p, W.p, 1e-13);

    const ConservedState U{2.0, -0.6, 1.4, 5.0};
    const ConservedState Ub = primitive_to_conserved(conserved_to_primitive(U, gas), gas);
    EXPECT_NEAR((Ub.vec() - U.vec()).cwiseAbs().maxCoeff(), 0.0, 1e-13);

    const ConservedState s{1.0, 0.0, 0.0, 2.5};
    EXPECT_NEAR((primitive_to_conserved({1.0, 0.0, 0.0, 1.0}, gas).vec() - s.vec()).norm(), 0.0, 1e-15);
}

TEST(Euler, PhysicalFluxExamples)
{
    for (const Vec2 n : {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{0.6, 0.8}}) {
        const Vec4 F = physical_flux({1.0, 0.0, 0.0, 1.0}, n, gas);
        EXPECT_NEAR((F - Vec4(0.0, n.x, n.y, 0.0)).norm(), 0.0, 1e-15);
    }
    // rho e = p / (gamma - 1) + rho u^2 / 2 = 3, energy flux (rho e + p) u = 4
    const Vec4 F = physical_flux({1.0, 1.0, 0.0, 1.0}, {1.0, 0.0}, gas);
    EXPECT_NEAR((F - Vec4(1.0, 2.0, 0.0, 4.0)).norm(), 0.0, 1e-15);
}

TEST(Euler, FluxIsRotationallyInvariant)
{
    const PrimitiveState W{1.3, 0.4, -0.7, 0.9};
    const PrimitiveState Wrot{1.3, W.v, -W.u, 0.9};   // velocity rotated by -90 degrees
    const Vec4 Fy = physical_flux(W, {0.0, 1.0}, gas);
    const Vec4 Fx = physical_flux(Wrot, {1.0, 0.0}, gas);
    // rotate the momentum components back by +90 degrees
    EXPECT_NEAR((Fy - Vec4(Fx[0], -Fx[2], Fx[1], Fx[3])).norm(), 0.0, 1e-14);
}

TEST(Euler, TransformExamples)
{
    const Mat4 A = transform_dU_dW({1.0, 0.0, 0.0, 0.3}, gas);
    Mat4 expected = Mat4::Identity();
    expected(3, 3) = 1.0 / 0.4;
    EXPECT_NEAR((A - expected).norm(), 0.0, 1e-15);

    const Mat4 B = transform_dU_dW({2.0, 3.0, 4.0, 1.0}, gas);
    EXPECT_NEAR((B.row(3).transpose() - Vec4(12.5, 6.0, 8.0, 2.5)).norm(), 0.0, 1e-14);
    EXPECT_NEAR((transform_dW_dU({2.0, 3.0, 4.0, 1.0}, gas) * B - Mat4::Identity()).norm(), 0.0, 1e-13);
}

TEST(Euler, TransformMatchesCentralDifferences)
{
    const PrimitiveState W{1.7, -0.3, 0.8, 2.2};
    const Mat4 A = transform_dU_dW(W, gas);
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
        Vec4 e = Vec4::Zero();
        e[k] = h;
        const Vec4 col = (to_conserved_raw(PrimitiveState::from(W.vec() + e), 1.4) -
                          to_conserved_raw(PrimitiveState::from(W.vec() - e), 1.4)) /
                         (2.0 * h);
        EXPECT_NEAR((col - A.col(k)).norm(), 0.0, 1e-9) << "column " << k;
    }
}
