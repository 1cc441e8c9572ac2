#include "flyby/attitude.hpp"

#include <cmath>

namespace flyby
{

Mat4 left_product_matrix(const Quaternion& p)
{
    Mat4 m;
    m.topLeftCorner<3, 3>() = p.scalar() * Mat3::Identity() + cross_matrix(p.vec());
    m.topRightCorner<3, 1>() = p.vec();
    m.bottomLeftCorner<1, 3>() = -p.vec().transpose();
    m(3, 3) = p.scalar();
    return m;
}

Mat4 right_product_matrix(const Quaternion& q)
{
    Mat4 m;
    m.topLeftCorner<3, 3>() = q.scalar() * Mat3::Identity() - cross_matrix(q.vec());
    m.topRightCorner<3, 1>() = q.vec();
    m.bottomLeftCorner<1, 3>() = -q.vec().transpose();
    m(3, 3) = q.scalar();
    return m;
}

Quaternion quat_multiply(const Quaternion& p, const Quaternion& q)
{
    const Vec3 pv = p.vec();
    const Vec3 qv = q.vec();
    const double ps = p.scalar();
    const double qs = q.scalar();
    return {ps * qv + qs * pv + pv.cross(qv), ps * qs - pv.dot(qv)};
}

Mat3 cross_matrix(const Vec3& a)
{
    Mat3 m;
    m << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    return m;
}

Vec3 rotate_by_quaternion(const Quaternion& q, const Vec3& r)
{
    if (std::abs(q.norm() - 1.0) > 1e-6)
    {
        throw InvalidInput("rotate_by_quaternion: quaternion is not unit norm");
    }
    const Quaternion pure(r, 0.0);
    return quat_multiply(quat_multiply(q.conjugate(), pure), q).vec();
}

Vec3 body_to_inertial(const Quaternion& q, const Vec3& b)
{
    if (std::abs(q.norm() - 1.0) > 1e-6)
    {
        throw InvalidInput("body_to_inertial: quaternion is not unit norm");
    }
    const Quaternion pure(b, 0.0);
    return quat_multiply(quat_multiply(q, pure), q.conjugate()).vec();
}

ScalingSet::ScalingSet(const Vec3& omega_max, const VecX& h_max, const VecX& tau_max)
{
    if (h_max.size() != tau_max.size())
    {
        throw InvalidInput("ScalingSet: h_max and tau_max sizes differ");
    }
    if ((omega_max.array() <= 0.0).any() || (h_max.array() <= 0.0).any() ||
        (tau_max.array() <= 0.0).any())
    {
        throw InvalidInput("ScalingSet: maxima must be strictly positive");
    }
    w_omega_ = omega_max.cwiseInverse();
    w_h_ = h_max.cwiseInverse();
    w_tau_ = tau_max.cwiseInverse();
}

VecX scale_state(const SpacecraftState& state, const ScalingSet& scaling)
{
    const Index nw = scaling.wheel_count();
    if (state.h_wheels.size() != nw)
    {
        throw InvalidInput("scale_state: wheel count mismatch");
    }
    VecX x(state_dim(nw));
    x.head<4>() = state.q.coeffs();
    x.segment<3>(4) = scaling.w_omega().cwiseProduct(state.omega);
    x.tail(nw) = scaling.w_h().cwiseProduct(state.h_wheels);
    return x;
}

SpacecraftState unscale_state(const VecX& scaled, const ScalingSet& scaling)
{
    const Index nw = scaling.wheel_count();
    if (scaled.size() != state_dim(nw))
    {
        throw InvalidInput("unscale_state: vector length does not match wheel count");
    }
    SpacecraftState state;
    state.q = Quaternion(Vec4(scaled.head<4>()));
    state.omega = scaled.segment<3>(4).cwiseQuotient(scaling.w_omega());
    state.h_wheels = scaled.tail(nw).cwiseQuotient(scaling.w_h());
    return state;
}

VecX scale_control(const ControlInput& control, const ScalingSet& scaling)
{
    if (control.tau.size() != scaling.wheel_count())
    {
        throw InvalidInput("scale_control: wheel count mismatch");
    }
    return scaling.w_tau().cwiseProduct(control.tau);
}

ControlInput unscale_control(const VecX& scaled, const ScalingSet& scaling)
{
    if (scaled.size() != scaling.wheel_count())
    {
        throw InvalidInput("unscale_control: wheel count mismatch");
    }
    return {scaled.cwiseQuotient(scaling.w_tau())};
}

void Trajectory::validate() const
{
    if (times.empty() || times.size() != states.size() || times.size() != controls.size())
    {
        throw InvalidInput("Trajectory: times, states and controls must have equal non-zero length");
    }
    if (times.front() != 0.0)
    {
        throw InvalidInput("Trajectory: first time must be 0");
    }
    for (std::size_t k = 1; k < times.size(); ++k)
    {
        if (!(times[k] > times[k - 1]))
        {
            throw InvalidInput("Trajectory: times must increase strictly");
        }
    }
}

std::vector<double> uniform_grid(double t_final, std::size_t nodes)
{
    if (nodes < 2 || !(t_final > 0.0))
    {
        throw InvalidInput("uniform_grid: need at least two nodes and a positive horizon");
    }
    std::vector<double> grid(nodes);
    const double dt = t_final / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k)
    {
        grid[k] = dt * static_cast<double>(k);
    }
    grid.back() = t_final;
    return grid;
}

}  // namespace flyby
