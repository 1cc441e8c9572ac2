#include <gtest/gtest.h>

#include <random>

#include "flyby/attitude.hpp"

using namespace flyby;

namespace
{

Quaternion random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return Quaternion(Vec4(n(rng), n(rng), n(rng), n(rng)).normalized());
}

Vec3 random_vec(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {u(rng), u(rng), u(rng)};
}

ScalingSet table_scaling()
{
    return ScalingSet(Vec3::Constant(5.0 * M_PI / 180.0), VecX::Constant(4, 3.2), VecX::Constant(4, 0.172));
}

}  // namespace

TEST(Quaternion, IdentityIsNeutral)
{
    std::mt19937_64 rng(1);
    const Quaternion q = random_unit(rng);
    EXPECT_TRUE(quat_multiply(Quaternion::identity(), q).coeffs().isApprox(q.coeffs(), 1e-15));
    EXPECT_TRUE(quat_multiply(q, Quaternion::identity()).coeffs().isApprox(q.coeffs(), 1e-15));
}

TEST(Quaternion, ConjugateInverts)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i)
    {
        const Quaternion q = random_unit(rng);
        const Vec4 e = quat_multiply(q, q.conjugate()).coeffs() - Quaternion::identity().coeffs();
        EXPECT_LE(e.cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Quaternion, NormMultiplicativeAndAssociative)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i)
    {
        const Quaternion p = random_unit(rng), q = random_unit(rng), r = random_unit(rng);
        EXPECT_NEAR(quat_multiply(p, q).norm(), 1.0, 1e-12);
        const Vec4 lhs = quat_multiply(quat_multiply(p, q), r).coeffs();
        const Vec4 rhs = quat_multiply(p, quat_multiply(q, r)).coeffs();
        EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Quaternion, HamiltonBasis)
{
    // i ⊗ j = k in [v; s] storage.
    const Quaternion i(Vec4(1, 0, 0, 0)), j(Vec4(0, 1, 0, 0));
    EXPECT_EQ(quat_multiply(i, j).coeffs(), Vec4(0, 0, 1, 0));
    EXPECT_EQ(quat_multiply(j, i).coeffs(), Vec4(0, 0, -1, 0));
}

TEST(Quaternion, ProductMatrices)
{
    std::mt19937_64 rng(4);
    const Quaternion p = random_unit(rng), q = random_unit(rng);
    const Vec4 pq = quat_multiply(p, q).coeffs();
    EXPECT_LE((left_product_matrix(p) * q.coeffs() - pq).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((right_product_matrix(q) * p.coeffs() - pq).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CrossMatrix, BasisAndSkew)
{
    EXPECT_EQ(cross_matrix(Vec3(1, 0, 0)) * Vec3(0, 1, 0), Vec3(0, 0, 1));
    EXPECT_EQ(cross_matrix(Vec3::Zero()), Mat3::Zero());
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i)
    {
        const Vec3 a = random_vec(rng), b = random_vec(rng);
        const Mat3 S = cross_matrix(a);
        EXPECT_EQ(S + S.transpose(), Mat3::Zero());
        EXPECT_LE((S * b - a.cross(b)).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((S * a).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Rotation, IdentityAndHalfTurn)
{
    const Vec3 r(0.3, -1.2, 2.0);
    EXPECT_EQ(rotate_by_quaternion(Quaternion::identity(), r), r);
    const Quaternion half_z(Vec3(0, 0, 1), 0.0);
    EXPECT_LE((rotate_by_quaternion(half_z, Vec3(1, 0, 0)) - Vec3(-1, 0, 0)).norm(), 1e-15);
}

TEST(Rotation, IsometryAndInverse)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 1000; ++i)
    {
        const Quaternion q = random_unit(rng);
        const Vec3 r = random_vec(rng);
        const Vec3 body = rotate_by_quaternion(q, r);
        EXPECT_NEAR(body.norm(), r.norm(), 1e-12);
        EXPECT_LE((body_to_inertial(q, body) - r).norm(), 1e-12);
    }
}

TEST(Rotation, RejectsNonUnitQuaternion)
{
    EXPECT_THROW(rotate_by_quaternion(Quaternion(Vec4(0, 0, 0, 1.01)), Vec3(1, 0, 0)), InvalidInput);
    EXPECT_NO_THROW(rotate_by_quaternion(Quaternion(Vec4(0, 0, 0, 1.0 + 5e-7)), Vec3(1, 0, 0)));
}

TEST(Scaling, WeightsAreReciprocals)
{
    const ScalingSet s = table_scaling();
    EXPECT_DOUBLE_EQ(s.w_h()[2], 1.0 / 3.2);
    EXPECT_DOUBLE_EQ(s.w_tau()[0], 1.0 / 0.172);
    EXPECT_NEAR(s.h_max()[1], 3.2, 1e-15);
    EXPECT_THROW(ScalingSet(Vec3(1, 1, 0), VecX::Ones(4), VecX::Ones(4)), InvalidInput);
    EXPECT_THROW(ScalingSet(Vec3::Ones(), VecX::Ones(4), VecX::Ones(3)), InvalidInput);
}

TEST(Scaling, StateLayoutExamples)
{
    const ScalingSet s = table_scaling();
    SpacecraftState st;
    st.omega = s.omega_max();
    st.h_wheels = VecX::Zero(4);
    VecX x = scale_state(st, s);
    ASSERT_EQ(x.size(), 11);
    EXPECT_EQ(x.head(4), Quaternion::identity().coeffs());
    EXPECT_LE((x.segment(4, 3) - Vec3::Ones()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(x.tail(4), VecX::Zero(4));

    st.h_wheels = (VecX(4) << 3.2, 0, 0, 0).finished();
    x = scale_state(st, s);
    EXPECT_EQ(x.tail(4), (VecX(4) << 1, 0, 0, 0).finished());
}

TEST(Scaling, RoundTrip)
{
    const ScalingSet s = table_scaling();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i)
    {
        SpacecraftState st;
        st.q = random_unit(rng);
        st.omega = 0.05 * random_vec(rng);
        st.h_wheels = 1.5 * VecX::Random(4);
        const SpacecraftState back = unscale_state(scale_state(st, s), s);
        EXPECT_LE((back.omega - st.omega).cwiseAbs().maxCoeff(), 1e-14 * (1.0 + st.omega.norm()));
        EXPECT_LE((back.h_wheels - st.h_wheels).cwiseAbs().maxCoeff(), 1e-14 * (1.0 + st.h_wheels.norm()));
        EXPECT_EQ(back.q.coeffs(), st.q.coeffs());

        ControlInput u{0.1 * VecX::Random(4)};
        EXPECT_LE((unscale_control(scale_control(u, s), s).tau - u.tau).cwiseAbs().maxCoeff(), 1e-16);
    }
}

TEST(Scaling, DimensionMismatchThrows)
{
    const ScalingSet s = table_scaling();
    SpacecraftState st;
    st.h_wheels = VecX::Zero(3);
    EXPECT_THROW(scale_state(st, s), InvalidInput);
    EXPECT_THROW(unscale_state(VecX::Zero(10), s), InvalidInput);
    EXPECT_THROW(scale_control(ControlInput{VecX::Zero(5)}, s), InvalidInput);
}

TEST(Trajectory, UniformGridAndValidation)
{
    const std::vector<double> t = uniform_grid(200.0, 40);
    ASSERT_EQ(t.size(), 40u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 200.0);
    EXPECT_NEAR(t[1], 200.0 / 39.0, 1e-12);

    Trajectory traj;
    traj.times = {0.0, 1.0, 1.0};
    traj.states.resize(3);
    traj.controls.resize(3);
    EXPECT_THROW(traj.validate(), InvalidInput);
    traj.times = {0.0, 1.0, 2.0};
    EXPECT_NO_THROW(traj.validate());
    traj.controls.resize(2);
    EXPECT_THROW(traj.validate(), InvalidInput);
}
