#include <random>

#include <gtest/gtest.h>

#include "carbuncle/shock_problem.hpp"

using namespace carbuncle;

namespace {
const GasModel gas{1.4};
const RiemannSolverKind all_solvers[] = {RiemannSolverKind::Roe, RiemannSolverKind::HLL, RiemannSolverKind::HLLC,
                                         RiemannSolverKind::VanLeerFVS, RiemannSolverKind::AUSMPlus};
} // namespace

TEST(Riemann, ConsistentWithPhysicalFlux)
{
    const PrimitiveState W{1.0, 1.0, 0.0, 1.0};
    for (auto k : all_solvers) {
        const Vec4 F = numerical_flux(k, W, W, {1.0, 0.0}, gas);
        EXPECT_NEAR((F - Vec4(1.0, 2.0, 0.0, 4.0)).norm(), 0.0, 1e-13) << to_string(k);
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 2.0), s(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const PrimitiveState V{u(rng), s(rng), s(rng), u(rng)};
        const double th = 3.0 * s(rng);
        const Vec2 n{std::cos(th), std::sin(th)};
        for (auto k : all_solvers)
            EXPECT_NEAR((numerical_flux(k, V, V, n, gas) - physical_flux(V, n, gas)).norm(), 0.0, 1e-13)
                << to_string(k);
    }
}

TEST(Riemann, RoePreservesStationaryShock)
{
    for (double m0 : {1.5, 2.0, 5.0, 20.0}) {
        const ShockStates s = initial_states(m0, gas);
        const PrimitiveState L = conserved_to_primitive(s.left, gas), R = conserved_to_primitive(s.right, gas);
        const Vec4 F = numerical_flux(RiemannSolverKind::Roe, L, R, {1.0, 0.0}, gas);
        EXPECT_NEAR(F[0], 1.0, 1e-12) << m0;
        EXPECT_NEAR((F - physical_flux(L, {1.0, 0.0}, gas)).norm(), 0.0, 1e-11) << m0;
    }
}

TEST(Riemann, SupersonicUpwinding)
{
    const PrimitiveState L{1.0, 3.0, 0.2, 1.0}, R{0.5, 2.5, -0.1, 0.4};
    for (auto k : {RiemannSolverKind::HLL, RiemannSolverKind::HLLC, RiemannSolverKind::VanLeerFVS,
                   RiemannSolverKind::AUSMPlus})
        EXPECT_NEAR((numerical_flux(k, L, R, {1.0, 0.0}, gas) - physical_flux(L, {1.0, 0.0}, gas)).norm(), 0.0,
                    1e-13)
            << to_string(k);
}

TEST(Riemann, RotatedFrameMatchesRotatedStates)
{
    const PrimitiveState L{1.2, 0.3, -0.5, 0.8}, R{0.9, -0.1, 0.4, 1.1};
    for (auto k : all_solvers) {
        const Vec4 Fy = numerical_flux(k, L, R, {0.0, 1.0}, gas);
        const Vec4 Fx = numerical_flux(k, {L.rho, L.v, -L.u, L.p}, {R.rho, R.v, -R.u, R.p}, {1.0, 0.0}, gas);
        EXPECT_NEAR((Fy - Vec4(Fx[0], -Fx[2], Fx[1], Fx[3])).norm(), 0.0, 1e-13) << to_string(k);
    }
}

TEST(Riemann, NamesRoundTrip)
{
    for (auto k : all_solvers) EXPECT_EQ(parse_riemann_solver(to_string(k)), k);
    EXPECT_THROW(parse_riemann_solver("godunov"), std::invalid_argument);
}
