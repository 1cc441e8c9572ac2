#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "flyby/pointing.hpp"
#include "flyby/scenario.hpp"

using namespace flyby;

namespace
{

Vec3 random_unit3(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return Vec3(n(rng), n(rng), n(rng)).normalized();
}

Quaternion random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return Quaternion(Vec4(n(rng), n(rng), n(rng), n(rng)).normalized());
}

/// cos θ from rotating the body axis into the inertial frame directly.
double direct_cos(const Quaternion& q, const Vec3& r, const Vec3& nu)
{
    return r.dot(body_to_inertial(q, nu));
}

Vec4 sorted_eigenvalues(const Mat4& m)
{
    Eigen::SelfAdjointEigenSolver<Mat4> es(m);
    return es.eigenvalues();
}

}  // namespace

TEST(BuildP, AlignedAndAntiAligned)
{
    const Vec4 q = Quaternion::identity().coeffs();
    EXPECT_NEAR(-q.dot(build_P(Vec3(1, 0, 0), Vec3(1, 0, 0)) * q), 1.0, 1e-15);
    EXPECT_NEAR(-q.dot(build_P(Vec3(1, 0, 0), Vec3(-1, 0, 0)) * q), -1.0, 1e-15);
}

TEST(BuildP, RejectsNonUnitInputs)
{
    EXPECT_THROW(build_P(Vec3(1.1, 0, 0), Vec3(1, 0, 0)), InvalidInput);
    EXPECT_THROW(build_P(Vec3(1, 0, 0), Vec3(0, 0.5, 0)), InvalidInput);
}

TEST(BuildP, MatchesDirectRotation)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 r = random_unit3(rng), nu = random_unit3(rng);
        const Quaternion q = random_unit(rng);
        const Mat4 P = build_P(r, nu);
        EXPECT_NEAR(-q.coeffs().dot(P * q.coeffs()), direct_cos(q, r, nu), 1e-10);
    }
}

TEST(BuildP, InvolutionWithEigenvaluesPlusMinusOne)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i)
    {
        const Mat4 P = build_P(random_unit3(rng), random_unit3(rng));
        EXPECT_LE((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((P * P - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((sorted_eigenvalues(P) - Vec4(-1, -1, 1, 1)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(FactorCone, ReproducesIPlusMinusP)
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i)
    {
        const Mat4 P = build_P(random_unit3(rng), random_unit3(rng));
        const Mat4 N = factor_cone(P, FactorSign::Plus);
        const Mat4 M = factor_cone(P, FactorSign::Minus);
        EXPECT_LE((N.transpose() * N - (Mat4::Identity() + P)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((M.transpose() * M - (Mat4::Identity() - P)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((sorted_eigenvalues(Mat4::Identity() + P) - Vec4(0, 0, 2, 2)).cwiseAbs().maxCoeff(), 1e-9);
        int zero_rows = 0;
        for (int r = 0; r < 4; ++r)
        {
            zero_rows += N.row(r).isZero(0.0) ? 1 : 0;
        }
        EXPECT_EQ(zero_rows, 2);
    }
}

TEST(FactorCone, AlignedCaseHasEigenvaluesZeroAndTwo)
{
    const Mat4 P = build_P(Vec3(0, 0, 1), Vec3(0, 0, 1));
    const Mat4 N = factor_cone(P, FactorSign::Plus);
    EXPECT_LE((sorted_eigenvalues(N.transpose() * N) - Vec4(0, 0, 2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FactorCone, NormIdentities)
{
    std::mt19937_64 rng(14);
    const Vec3 z(0, 0, 1);
    const Mat4 Mz = factor_cone(build_P(z, z), FactorSign::Minus);
    for (int i = 0; i < 1000; ++i)
    {
        const Quaternion q = random_unit(rng);
        EXPECT_NEAR((Mz * q.coeffs()).squaredNorm(), 1.0 + direct_cos(q, z, z), 1e-10);

        const Vec3 r = random_unit3(rng), nu = random_unit3(rng);
        const Mat4 P = build_P(r, nu);
        const double c = direct_cos(q, r, nu);
        const double n2 = (factor_cone(P, FactorSign::Plus) * q.coeffs()).squaredNorm();
        const double m2 = (factor_cone(P, FactorSign::Minus) * q.coeffs()).squaredNorm();
        EXPECT_NEAR(n2, 1.0 - c, 1e-9);
        EXPECT_NEAR(m2, 1.0 + c, 1e-9);
        EXPECT_NEAR(n2 + m2, 2.0, 1e-10);
        EXPECT_LE(n2, 4.0);
    }
}

TEST(FactorCone, RejectsIndefiniteInput)
{
    Mat4 P = Mat4::Identity() * -2.0;
    EXPECT_THROW(factor_cone(P, FactorSign::Plus), NumericalError);
}

TEST(MakeCone, KeepInMatchesAngleTest)
{
    std::mt19937_64 rng(15);
    const double limit = 20.0 * M_PI / 180.0;
    int checked = 0;
    for (int i = 0; i < 5000; ++i)
    {
        const Vec3 r = random_unit3(rng), nu = random_unit3(rng);
        const Quaternion q = random_unit(rng);
        const double angle = pointing_angle(q, r, nu);
        if (std::abs(angle - limit) < 1e-8)
        {
            continue;
        }
        const ConeFactor in = make_cone(ConeKind::KeepIn, r, nu, limit, 0.0);
        const ConeFactor out = make_cone(ConeKind::KeepOut, r, nu, limit, 0.0);
        EXPECT_EQ((in.matrix * q.coeffs()).norm() <= in.rhs, angle <= limit);
        EXPECT_EQ((out.matrix * q.coeffs()).norm() <= out.rhs, angle >= limit);
        ++checked;
    }
    EXPECT_GT(checked, 4900);
}

TEST(PointingAngle, BasicCases)
{
    const Quaternion id;
    EXPECT_EQ(pointing_angle(id, Vec3(1, 0, 0), Vec3(1, 0, 0)), 0.0);
    EXPECT_NEAR(pointing_angle(id, Vec3(0, 1, 0), Vec3(1, 0, 0)), M_PI / 2.0, 1e-12);
    EXPECT_NEAR(pointing_angle(id, Vec3(-1, 0, 0), Vec3(1, 0, 0)), M_PI, 1e-12);
}

TEST(PointingAngle, AgreesWithQuadraticForm)
{
    std::mt19937_64 rng(16);
    for (int i = 0; i < 500; ++i)
    {
        const Vec3 r = random_unit3(rng), nu = random_unit3(rng);
        const Quaternion q = random_unit(rng);
        const double c = std::clamp(-q.coeffs().dot(build_P(r, nu) * q.coeffs()), -1.0, 1.0);
        EXPECT_NEAR(pointing_angle(q, r, nu), std::acos(c), 1e-7);
    }
}

TEST(PointingAngle, BenchmarkStartsOnTarget)
{
    const Scenario s = build_benchmark();
    const double angle = pointing_angle(s.x_init.q, s.comet_direction(0.0), s.v_body);
    EXPECT_LE(angle, 0.5 * M_PI / 180.0);
}
