#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flyby/attitude.hpp"
#include "flyby/dynamics.hpp"

namespace flyby
{

/// Node-sampled trajectory in scaled units (the optimiser's working view).
struct ScaledTrajectory
{
    std::vector<double> times;
    std::vector<VecX> states;
    std::vector<VecX> controls;

    std::size_t size() const { return times.size(); }
};

ScaledTrajectory to_scaled(const Trajectory& trajectory, const ScalingSet& scaling);
Trajectory to_physical(const ScaledTrajectory& trajectory, const ScalingSet& scaling);

/// λ⁻ u_k + λ⁺ u_{k+1} on (t_k, t_{k+1}]; throws InvalidInput outside it.
VecX foh_interpolate(const VecX& u_k, const VecX& u_k1, double t, double t_k, double t_k1);

/// Exact FOH discretisation of the dynamics linearised about one interval.
struct IntervalDiscretization
{
    MatX A;        ///< state-transition matrix Φ(t_{k+1}, t_k)
    MatX B_minus;  ///< input matrix for u_k
    MatX B_plus;   ///< input matrix for u_{k+1}
    VecX s;        ///< affine term
    VecX x_end;    ///< reference state propagated to t_{k+1}
};

struct DiscreteLTV
{
    std::vector<IntervalDiscretization> intervals;

    std::size_t size() const { return intervals.size(); }
};

/// Thrown when one interval fails; carries its index.
class DiscretizationFailure : public std::runtime_error
{
public:
    DiscretizationFailure(std::size_t interval, const std::string& what)
        : std::runtime_error("interval " + std::to_string(interval) + ": " + what), interval_(interval)
    {
    }
    std::size_t interval() const { return interval_; }

private:
    std::size_t interval_;
};

/**
 * Integrates the reference, the state-transition matrix and the three
 * input/offset quadratures as one augmented ODE on [t_k, t_k1].
 */
IntervalDiscretization discretize_interval(const VecX& x_bar_k,
                                           const VecX& u_bar_k,
                                           const VecX& u_bar_k1,
                                           double t_k,
                                           double t_k1,
                                           const PlantModel& plant,
                                           const ScalingSet& scaling,
                                           const IntegratorSettings& settings);

/// Discretises every interval of the reference; intervals run on up to
/// `workers` threads and the result is independent of the worker count.
DiscreteLTV discretize_trajectory(const ScaledTrajectory& reference,
                                  const PlantModel& plant,
                                  const ScalingSet& scaling,
                                  const IntegratorSettings& settings,
                                  std::size_t workers = 1);

}  // namespace flyby
