#include "flyby/dynamics.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace flyby
{

PlantModel::PlantModel(const Mat3& inertia, const MatX& distribution)
    : inertia_(inertia), distribution_(distribution)
{
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * inertia.cwiseAbs().maxCoeff())
    {
        throw InvalidInput("PlantModel: inertia must be symmetric");
    }
    Eigen::LLT<Mat3> llt(inertia);
    if (llt.info() != Eigen::Success)
    {
        throw InvalidInput("PlantModel: inertia must be positive definite");
    }
    if (distribution.rows() != 3 || distribution.cols() < 1)
    {
        throw InvalidInput("PlantModel: distribution matrix must be 3 x n_w with n_w >= 1");
    }
    for (Index j = 0; j < distribution.cols(); ++j)
    {
        if (std::abs(distribution.col(j).norm() - 1.0) > 1e-9)
        {
            throw InvalidInput("PlantModel: distribution columns must be unit vectors");
        }
    }
    inertia_inv_ = inertia.inverse();
    active_wheels_.resize(static_cast<std::size_t>(distribution.cols()));
    for (std::size_t j = 0; j < active_wheels_.size(); ++j)
    {
        active_wheels_[j] = static_cast<int>(j);
    }
}

PlantModel PlantModel::without_wheel(Index column) const
{
    if (column < 0 || column >= wheel_count())
    {
        throw InvalidInput("PlantModel::without_wheel: column out of range");
    }
    if (wheel_count() == 1)
    {
        throw InvalidInput("PlantModel::without_wheel: cannot remove the last wheel");
    }
    MatX reduced(3, wheel_count() - 1);
    std::vector<int> remaining;
    for (Index j = 0, c = 0; j < wheel_count(); ++j)
    {
        if (j == column)
        {
            continue;
        }
        reduced.col(c++) = distribution_.col(j);
        remaining.push_back(active_wheels_[static_cast<std::size_t>(j)]);
    }
    PlantModel out(inertia_, reduced);
    out.active_wheels_ = std::move(remaining);
    out.disturbance_ = disturbance_;
    return out;
}

void f_nonlinear_into(const VecX& x,
                      const VecX& u,
                      const PlantModel& plant,
                      const ScalingSet& scaling,
                      double t,
                      Eigen::Ref<VecX> dx)
{
    const Index nw = plant.wheel_count();
    const Vec4 q = x.head<4>();
    const Vec3 omega = x.segment<3>(4).cwiseQuotient(scaling.w_omega());
    const VecX h = x.tail(nw).cwiseQuotient(scaling.w_h());
    const VecX tau = u.cwiseQuotient(scaling.w_tau());

    // q ⊗ [ω; 0]
    const Vec3 qv = q.head<3>();
    const double qs = q[3];
    dx.head<3>() = 0.5 * (qs * omega + qv.cross(omega));
    dx[3] = -0.5 * qv.dot(omega);

    const Vec3 momentum = plant.inertia() * omega + plant.distribution() * h;
    Vec3 torque = momentum.cross(omega) - plant.distribution() * tau;
    if (plant.has_disturbance())
    {
        torque += plant.disturbance(t);
    }
    dx.segment<3>(4) = scaling.w_omega().cwiseProduct(plant.inertia_inverse() * torque);
    dx.tail(nw) = scaling.w_h().cwiseProduct(tau);
}

VecX f_nonlinear(const VecX& x_scaled,
                 const VecX& u_scaled,
                 const PlantModel& plant,
                 const ScalingSet& scaling,
                 double t)
{
    const Index nw = plant.wheel_count();
    if (x_scaled.size() != state_dim(nw) || u_scaled.size() != nw || scaling.wheel_count() != nw)
    {
        throw InvalidInput("f_nonlinear: dimensions inconsistent with wheel count");
    }
    VecX dx(x_scaled.size());
    f_nonlinear_into(x_scaled, u_scaled, plant, scaling, t, dx);
    return dx;
}

VecX FohSegment::at(double t) const
{
    const double lambda_minus = (t_b - t) / (t_b - t_a);
    return lambda_minus * u_a + (1.0 - lambda_minus) * u_b;
}

VecX propagate(const VecX& x0,
               const FohSegment& segment,
               const PlantModel& plant,
               const ScalingSet& scaling,
               const IntegratorSettings& settings,
               const std::vector<double>* sample_times,
               std::vector<VecX>* samples,
               IntegrationStats* stats)
{
    const Index nw = plant.wheel_count();
    if (x0.size() != state_dim(nw) || segment.u_a.size() != nw || segment.u_b.size() != nw)
    {
        throw InvalidInput("propagate: dimensions inconsistent with wheel count");
    }
    VecX u(nw);
    auto rhs = [&](double t, const VecX& x, VecX& dx) {
        const double lambda_minus = (segment.t_b - t) / (segment.t_b - segment.t_a);
        u = lambda_minus * segment.u_a + (1.0 - lambda_minus) * segment.u_b;
        f_nonlinear_into(x, u, plant, scaling, t, dx);
    };

    if (sample_times == nullptr || samples == nullptr)
    {
        return integrate_dopri5(rhs, segment.t_a, segment.t_b, x0, settings, nullptr, stats);
    }

    samples->assign(sample_times->size(), VecX());
    std::size_t next = 0;
    // Samples at t_a are the initial state itself.
    while (next < sample_times->size() && (*sample_times)[next] <= segment.t_a)
    {
        (*samples)[next++] = x0;
    }
    auto observer = [&](const DenseStep& step) {
        const double t_end = step.t0 + step.h;
        while (next < sample_times->size() && (*sample_times)[next] <= t_end)
        {
            (*samples)[next] = step((*sample_times)[next]);
            ++next;
        }
    };
    VecX x1 = integrate_dopri5(rhs, segment.t_a, segment.t_b, x0, settings, observer, stats);
    while (next < sample_times->size())
    {
        (*samples)[next++] = x1;
    }
    return x1;
}

std::vector<VecX> propagate_nodes(const VecX& x0,
                                  const std::vector<double>& times,
                                  const std::vector<VecX>& controls,
                                  const PlantModel& plant,
                                  const ScalingSet& scaling,
                                  const IntegratorSettings& settings,
                                  IntegrationStats* stats)
{
    if (times.size() != controls.size() || times.size() < 2)
    {
        throw InvalidInput("propagate_nodes: need matching times/controls with at least two nodes");
    }
    std::vector<VecX> states;
    states.reserve(times.size());
    states.push_back(x0);
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
    {
        const FohSegment segment{times[k], times[k + 1], controls[k], controls[k + 1]};
        states.push_back(propagate(states.back(), segment, plant, scaling, settings, nullptr, nullptr, stats));
    }
    return states;
}

Vec3 inertial_momentum(const SpacecraftState& state, const PlantModel& plant)
{
    const Vec3 body = plant.inertia() * state.omega + plant.distribution() * state.h_wheels;
    return body_to_inertial(state.q.normalized(), body);
}

}  // namespace flyby
