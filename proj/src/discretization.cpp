#include "flyby/discretization.hpp"

#include <Eigen/LU>

#include "flyby/linearization.hpp"
#include "flyby/parallel.hpp"

namespace flyby
{

ScaledTrajectory to_scaled(const Trajectory& trajectory, const ScalingSet& scaling)
{
    trajectory.validate();
    ScaledTrajectory out;
    out.times = trajectory.times;
    for (std::size_t k = 0; k < trajectory.size(); ++k)
    {
        out.states.push_back(scale_state(trajectory.states[k], scaling));
        out.controls.push_back(scale_control(trajectory.controls[k], scaling));
    }
    return out;
}

Trajectory to_physical(const ScaledTrajectory& trajectory, const ScalingSet& scaling)
{
    Trajectory out;
    out.times = trajectory.times;
    for (std::size_t k = 0; k < trajectory.size(); ++k)
    {
        out.states.push_back(unscale_state(trajectory.states[k], scaling));
        out.controls.push_back(unscale_control(trajectory.controls[k], scaling));
    }
    return out;
}

VecX foh_interpolate(const VecX& u_k, const VecX& u_k1, double t, double t_k, double t_k1)
{
    if (!(t > t_k) || t > t_k1)
    {
        throw InvalidInput("foh_interpolate: t outside (t_k, t_k1]");
    }
    const double lambda_minus = (t_k1 - t) / (t_k1 - t_k);
    return lambda_minus * u_k + (1.0 - lambda_minus) * u_k1;
}

IntervalDiscretization discretize_interval(const VecX& x_bar_k,
                                           const VecX& u_bar_k,
                                           const VecX& u_bar_k1,
                                           double t_k,
                                           double t_k1,
                                           const PlantModel& plant,
                                           const ScalingSet& scaling,
                                           const IntegratorSettings& settings)
{
    const Index nw = plant.wheel_count();
    const Index nx = state_dim(nw);
    if (x_bar_k.size() != nx || u_bar_k.size() != nw || u_bar_k1.size() != nw)
    {
        throw InvalidInput("discretize_interval: dimension mismatch");
    }
    if (!x_bar_k.allFinite() || !u_bar_k.allFinite() || !u_bar_k1.allFinite())
    {
        throw InvalidInput("discretize_interval: reference contains non-finite values");
    }

    // Augmented layout: [x̄ | Φ (column-major) | ∫Φ⁻¹λ⁻B | ∫Φ⁻¹λ⁺B | ∫Φ⁻¹s].
    const Index off_phi = nx;
    const Index off_bm = off_phi + nx * nx;
    const Index off_bp = off_bm + nx * nw;
    const Index off_s = off_bp + nx * nw;
    const Index dim = off_s + nx;

    const MatX B = jacobian_B(plant, scaling);
    const double dt = t_k1 - t_k;

    VecX y0 = VecX::Zero(dim);
    y0.head(nx) = x_bar_k;
    Eigen::Map<MatX>(y0.data() + off_phi, nx, nx).setIdentity();

    VecX u(nw);
    VecX fx(nx);
    MatX phi_inv_B(nx, nw);
    Eigen::PartialPivLU<MatX> lu(nx);
    auto rhs = [&](double t, const VecX& y, VecX& dy) {
        const double lambda_minus = (t_k1 - t) / dt;
        const double lambda_plus = 1.0 - lambda_minus;
        u = lambda_minus * u_bar_k + lambda_plus * u_bar_k1;
        const VecX x_bar = y.head(nx);
        const Eigen::Map<const MatX> phi(y.data() + off_phi, nx, nx);

        f_nonlinear_into(x_bar, u, plant, scaling, t, fx);
        const MatX A = jacobian_A(x_bar, plant, scaling);
        const VecX s = fx - A * x_bar - B * u;

        dy.head(nx) = fx;
        Eigen::Map<MatX>(dy.data() + off_phi, nx, nx).noalias() = A * phi;

        lu.compute(phi);
        phi_inv_B = lu.solve(B);
        Eigen::Map<MatX>(dy.data() + off_bm, nx, nw) = lambda_minus * phi_inv_B;
        Eigen::Map<MatX>(dy.data() + off_bp, nx, nw) = lambda_plus * phi_inv_B;
        dy.segment(off_s, nx) = lu.solve(s);
    };

    const VecX y1 = integrate_dopri5(rhs, t_k, t_k1, y0, settings);

    IntervalDiscretization out;
    out.x_end = y1.head(nx);
    out.A = Eigen::Map<const MatX>(y1.data() + off_phi, nx, nx);
    const Eigen::PartialPivLU<MatX> check(out.A);
    if (!std::isfinite(check.determinant()) || std::abs(check.determinant()) < 1e-300)
    {
        throw NumericalError("discretize_interval: state-transition matrix is singular");
    }
    out.B_minus = out.A * Eigen::Map<const MatX>(y1.data() + off_bm, nx, nw);
    out.B_plus = out.A * Eigen::Map<const MatX>(y1.data() + off_bp, nx, nw);
    out.s = out.A * y1.segment(off_s, nx);
    return out;
}

DiscreteLTV discretize_trajectory(const ScaledTrajectory& reference,
                                  const PlantModel& plant,
                                  const ScalingSet& scaling,
                                  const IntegratorSettings& settings,
                                  std::size_t workers)
{
    const std::size_t n = reference.size();
    if (n < 2 || reference.states.size() != n || reference.controls.size() != n)
    {
        throw InvalidInput("discretize_trajectory: reference needs at least two consistent nodes");
    }
    DiscreteLTV out;
    out.intervals.resize(n - 1);
    parallel_for(n - 1, workers, [&](std::size_t k) {
        try
        {
            out.intervals[k] = discretize_interval(reference.states[k],
                                                   reference.controls[k],
                                                   reference.controls[k + 1],
                                                   reference.times[k],
                                                   reference.times[k + 1],
                                                   plant,
                                                   scaling,
                                                   settings);
        }
        catch (const std::exception& e)
        {
            throw DiscretizationFailure(k, e.what());
        }
    });
    return out;
}

}  // namespace flyby
