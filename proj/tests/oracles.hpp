#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "flyby/discretization.hpp"
#include "flyby/dynamics.hpp"
#include "flyby/linearization.hpp"

/// Independent reference computations shared by the unit and acceptance tests.
namespace oracle
{

using namespace flyby;

inline Quaternion random_unit_quaternion(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return Quaternion(Vec4(n(rng), n(rng), n(rng), n(rng)).normalized());
}

inline Vec3 random_unit_vector(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return Vec3(n(rng), n(rng), n(rng)).normalized();
}

/// Unit quaternion followed by rate and momentum entries uniform in [-amplitude, amplitude].
inline VecX random_scaled_state(std::mt19937_64& rng, Index wheels, double amplitude = 1.0)
{
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    VecX x(state_dim(wheels));
    x.head<4>() = random_unit_quaternion(rng).coeffs();
    for (Index i = 4; i < x.size(); ++i)
    {
        x[i] = u(rng);
    }
    return x;
}

inline VecX random_control(std::mt19937_64& rng, Index wheels, double amplitude = 1.0)
{
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    VecX v(wheels);
    for (Index i = 0; i < wheels; ++i)
    {
        v[i] = u(rng);
    }
    return v;
}

/// Central differences of f_nonlinear in x with step h.
inline MatX fd_jacobian_x(const VecX& x, const VecX& u, const PlantModel& plant, const ScalingSet& scaling,
                          double h = 1e-6)
{
    MatX J(x.size(), x.size());
    for (Index j = 0; j < x.size(); ++j)
    {
        VecX xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f_nonlinear(xp, u, plant, scaling) - f_nonlinear(xm, u, plant, scaling)) / (2.0 * h);
    }
    return J;
}

inline MatX fd_jacobian_u(const VecX& x, const VecX& u, const PlantModel& plant, const ScalingSet& scaling,
                          double h = 1e-6)
{
    MatX J(x.size(), u.size());
    for (Index j = 0; j < u.size(); ++j)
    {
        VecX up = u, um = u;
        up[j] += h;
        um[j] -= h;
        J.col(j) = (f_nonlinear(x, up, plant, scaling) - f_nonlinear(x, um, plant, scaling)) / (2.0 * h);
    }
    return J;
}

/// Largest entrywise |a − b| / max(1, |b|).
inline double max_relative_error(const MatX& a, const MatX& b)
{
    double worst = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
    {
        for (Index j = 0; j < a.cols(); ++j)
        {
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(b(i, j))));
        }
    }
    return worst;
}

/**
 * Integrates the LTV system linearised along the nonlinear reference that
 * starts at x̄_k under FOH controls ū, driven by FOH inputs u from state x_k.
 * The reference and the perturbed state are carried in one ODE.
 */
inline VecX ltv_propagate(const VecX& x_bar_k,
                          const VecX& u_bar_k,
                          const VecX& u_bar_k1,
                          const VecX& x_k,
                          const VecX& u_k,
                          const VecX& u_k1,
                          double t_k,
                          double t_k1,
                          const PlantModel& plant,
                          const ScalingSet& scaling)
{
    const Index nx = x_k.size();
    const MatX B = jacobian_B(plant, scaling);
    VecX y(2 * nx);
    y << x_bar_k, x_k;
    auto rhs = [&](double t, const VecX& state, VecX& dy) {
        const double lm = (t_k1 - t) / (t_k1 - t_k);
        const VecX ubar = lm * u_bar_k + (1.0 - lm) * u_bar_k1;
        const VecX u = lm * u_k + (1.0 - lm) * u_k1;
        const VecX xbar = state.head(nx);
        const VecX f = f_nonlinear(xbar, ubar, plant, scaling, t);
        const MatX A = jacobian_A(xbar, plant, scaling);
        dy.head(nx) = f;
        dy.tail(nx) = A * state.tail(nx) + B * u + (f - A * xbar - B * ubar);
    };
    return integrate_dopri5(rhs, t_k, t_k1, y, IntegratorSettings{1e-12, 1e-12}).tail(nx);
}

inline VecX discrete_step(const IntervalDiscretization& d, const VecX& x_k, const VecX& u_k, const VecX& u_k1)
{
    return d.A * x_k + d.B_minus * u_k + d.B_plus * u_k1 + d.s;
}

}  // namespace oracle
