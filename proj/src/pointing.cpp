#include "flyby/pointing.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace flyby
{

namespace
{

constexpr double kUnitTolerance = 1e-9;
constexpr double kEigenClamp = 1e-9;

}  // namespace

Mat4 build_P(const Vec3& r, const Vec3& nu)
{
    if (std::abs(r.norm() - 1.0) > kUnitTolerance || std::abs(nu.norm() - 1.0) > kUnitTolerance)
    {
        throw InvalidInput("build_P: r and nu must be unit vectors");
    }
    Mat4 left;
    left.topLeftCorner<3, 3>() = cross_matrix(r);
    left.topRightCorner<3, 1>() = r;
    left.bottomLeftCorner<1, 3>() = -r.transpose();
    left(3, 3) = 0.0;

    Mat4 right;
    right.topLeftCorner<3, 3>() = -cross_matrix(nu);
    right.topRightCorner<3, 1>() = nu;
    right.bottomLeftCorner<1, 3>() = -nu.transpose();
    right(3, 3) = 0.0;

    return left * right;
}

Mat4 factor_cone(const Mat4& P, FactorSign sign)
{
    const double s = sign == FactorSign::Plus ? 1.0 : -1.0;
    // P is symmetric in exact arithmetic; symmetrise to remove round-off.
    const Mat4 form = Mat4::Identity() + s * 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Mat4> eig(form);
    if (eig.info() != Eigen::Success)
    {
        throw NumericalError("factor_cone: eigendecomposition failed");
    }
    Vec4 values = eig.eigenvalues();
    if (values.minCoeff() < -kEigenClamp)
    {
        throw NumericalError("factor_cone: I +/- P is not positive semidefinite");
    }
    for (Index i = 0; i < 4; ++i)
    {
        values[i] = values[i] < kEigenClamp ? 0.0 : std::sqrt(values[i]);
    }
    return values.asDiagonal() * eig.eigenvectors().transpose();
}

ConeFactor make_cone(ConeKind kind, const Vec3& r, const Vec3& nu, double limit_angle, double target_time)
{
    const Mat4 P = build_P(r, nu);
    ConeFactor cone;
    cone.kind = kind;
    cone.target_time = target_time;
    if (kind == ConeKind::KeepIn)
    {
        cone.matrix = factor_cone(P, FactorSign::Plus);
        cone.rhs = std::sqrt(std::max(0.0, 1.0 - std::cos(limit_angle)));
    }
    else
    {
        cone.matrix = factor_cone(P, FactorSign::Minus);
        cone.rhs = std::sqrt(std::max(0.0, 1.0 + std::cos(limit_angle)));
    }
    return cone;
}

double pointing_angle(const Quaternion& q, const Vec3& r_inertial, const Vec3& v_body)
{
    const Vec4& c = q.coeffs();
    const double cos_theta = -c.dot(build_P(r_inertial, v_body) * c) / c.squaredNorm();
    return std::acos(std::clamp(cos_theta, -1.0, 1.0));
}

}  // namespace flyby
