#include <gtest/gtest.h>

#include "flyby/scenario.hpp"
#include "oracles.hpp"

using namespace flyby;

TEST(JacobianA, MatchesFiniteDifferences)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const VecX x = oracle::random_scaled_state(rng, 4);
        const VecX u = oracle::random_control(rng, 4);
        const MatX fd = oracle::fd_jacobian_x(x, u, s.plant, s.scaling);
        worst = std::max(worst, oracle::max_relative_error(jacobian_A(x, s.plant, s.scaling), fd));
    }
    EXPECT_LE(worst, 1e-5);
}

TEST(JacobianA, StructureAtRest)
{
    const Scenario s = build_benchmark();
    VecX x = VecX::Zero(11);
    x.head<4>() = s.x_init.q.coeffs();
    const MatX A = jacobian_A(x, s.plant, s.scaling);
    EXPECT_TRUE(A.block(4, 4, 3, 3).isZero(0.0));
    EXPECT_TRUE(A.block(4, 7, 3, 4).isZero(0.0));
    EXPECT_TRUE(A.topLeftCorner(4, 4).isZero(0.0));
    EXPECT_TRUE(A.bottomRows(4).isZero(0.0));
    // ∂q̇/∂ω is half the quaternion product matrix divided by the rate scale.
    const Vec4 q = x.head<4>();
    const Vec3 w0(1.0, 0.0, 0.0);
    Vec4 expected;
    expected << 0.5 * q[3] * w0 + 0.5 * q.head<3>().cross(w0), -0.5 * q.head<3>().dot(w0);
    EXPECT_LE((A.block(0, 4, 4, 1) * s.scaling.w_omega()[0] - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(JacobianA, KinematicBlockIsSkew)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(32);
    const VecX x = oracle::random_scaled_state(rng, 4);
    const MatX A = jacobian_A(x, s.plant, s.scaling);
    const Mat4 K = A.topLeftCorner(4, 4);
    EXPECT_TRUE(A.allFinite());
    EXPECT_LE((K + K.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(JacobianB, MatchesFiniteDifferences)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(33);
    const MatX B = jacobian_B(s.plant, s.scaling);
    for (int i = 0; i < 20; ++i)
    {
        const VecX x = oracle::random_scaled_state(rng, 4);
        const VecX u = oracle::random_control(rng, 4);
        EXPECT_LE(oracle::max_relative_error(B, oracle::fd_jacobian_u(x, u, s.plant, s.scaling)), 1e-6);
    }
}

TEST(JacobianB, SingleWheelScalarCase)
{
    MatX L(3, 1);
    L << 1.0, 0.0, 0.0;
    const PlantModel plant(Mat3::Identity(), L);
    const ScalingSet scaling(Vec3(0.1, 0.2, 0.3), VecX::Constant(1, 2.0), VecX::Constant(1, 0.5));
    const MatX B = jacobian_B(plant, scaling);
    ASSERT_EQ(B.rows(), 8);
    ASSERT_EQ(B.cols(), 1);
    EXPECT_DOUBLE_EQ(B(4, 0), -(1.0 / 0.1) * 0.5);
    EXPECT_EQ(B(5, 0), 0.0);
    EXPECT_EQ(B(6, 0), 0.0);
    EXPECT_DOUBLE_EQ(B(7, 0), 0.5 / 2.0);
    EXPECT_TRUE(B.topRows(4).isZero(0.0));
}

TEST(JacobianB, FaultyPlantHasThreeColumns)
{
    const Scenario s = build_benchmark(Index{4});
    const MatX B = jacobian_B(s.plant, s.scaling);
    EXPECT_EQ(B.rows(), 10);
    EXPECT_EQ(B.cols(), 3);
}

TEST(Offset, TaylorConsistencyAtReference)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(34);
    for (int i = 0; i < 100; ++i)
    {
        const VecX x = oracle::random_scaled_state(rng, 4);
        const VecX u = oracle::random_control(rng, 4);
        const MatX A = jacobian_A(x, s.plant, s.scaling);
        const MatX B = jacobian_B(s.plant, s.scaling);
        const VecX off = linearization_offset(x, u, A, B, s.plant, s.scaling);
        const VecX f = f_nonlinear(x, u, s.plant, s.scaling);
        EXPECT_LE((A * x + B * u + off - f).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(CardWeight, Examples)
{
    EXPECT_DOUBLE_EQ(card_weight(0.0), 1000.0);
    EXPECT_DOUBLE_EQ(card_weight(1.0), 1.0 / 1.001);
    EXPECT_THROW(card_weight(-1e-9), InvalidInput);
}

TEST(CardWeight, InitialWeightsAreUnitValues)
{
    const CardinalityWeights w = CardinalityWeights::initial(40);
    EXPECT_EQ(w.gamma_prev, VecX::Ones(40));
    EXPECT_EQ(w.zeta_prev, VecX::Ones(40));
    EXPECT_EQ(w.gamma_weights(), VecX::Constant(40, 1.0 / 1.001));
    EXPECT_LE(w.zeta_weights().maxCoeff(), 1.0 / w.epsilon);
}
