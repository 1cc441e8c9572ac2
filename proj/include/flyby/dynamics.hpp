#pragma once

#include <functional>
#include <vector>

#include "flyby/attitude.hpp"
#include "flyby/integrator.hpp"

namespace flyby
{

/**
 * Rigid spacecraft actuated by a reaction-wheel assembly.
 *
 * Wheel momenta are stored along the columns of the torque-distribution
 * matrix L (3 × n_w, unit columns). `active_wheels` records the index each
 * column had in the original assembly, so a faulty plant keeps track of
 * which physical wheels remain.
 */
class PlantModel
{
public:
    using Disturbance = std::function<Vec3(double)>;

    PlantModel(const Mat3& inertia, const MatX& distribution);

    const Mat3& inertia() const { return inertia_; }
    const Mat3& inertia_inverse() const { return inertia_inv_; }
    const MatX& distribution() const { return distribution_; }
    const std::vector<int>& active_wheels() const { return active_wheels_; }
    Index wheel_count() const { return distribution_.cols(); }

    /// Copy of this plant with wheel column `column` (0-based position in
    /// the current assembly) removed.
    PlantModel without_wheel(Index column) const;

    void set_disturbance(Disturbance d) { disturbance_ = std::move(d); }
    Vec3 disturbance(double t) const { return disturbance_ ? disturbance_(t) : Vec3::Zero(); }
    bool has_disturbance() const { return static_cast<bool>(disturbance_); }

private:
    Mat3 inertia_;
    Mat3 inertia_inv_;
    MatX distribution_;
    std::vector<int> active_wheels_;
    Disturbance disturbance_;
};

/// Time derivative of the scaled state [q; W_ω ω; W_h h] under scaled torque u.
VecX f_nonlinear(const VecX& x_scaled,
                 const VecX& u_scaled,
                 const PlantModel& plant,
                 const ScalingSet& scaling,
                 double t = 0.0);

/// In-place variant used inside integrators.
void f_nonlinear_into(const VecX& x_scaled,
                      const VecX& u_scaled,
                      const PlantModel& plant,
                      const ScalingSet& scaling,
                      double t,
                      Eigen::Ref<VecX> dx);

/// A first-order-hold control segment u(t) on [t_a, t_b].
struct FohSegment
{
    double t_a = 0.0;
    double t_b = 0.0;
    VecX u_a;
    VecX u_b;

    VecX at(double t) const;
};

/**
 * Integrates the scaled nonlinear dynamics over one FOH segment.
 *
 * When `samples` is non-null, the states at `sample_times` (which must lie
 * inside [t_a, t_b]) are written to it using the integrator's dense output.
 */
VecX propagate(const VecX& x0,
               const FohSegment& segment,
               const PlantModel& plant,
               const ScalingSet& scaling,
               const IntegratorSettings& settings,
               const std::vector<double>* sample_times = nullptr,
               std::vector<VecX>* samples = nullptr,
               IntegrationStats* stats = nullptr);

/**
 * Integrates node to node along a grid with FOH controls (scaled). Returns
 * the N scaled node states, starting with x0.
 */
std::vector<VecX> propagate_nodes(const VecX& x0,
                                  const std::vector<double>& times,
                                  const std::vector<VecX>& controls,
                                  const PlantModel& plant,
                                  const ScalingSet& scaling,
                                  const IntegratorSettings& settings,
                                  IntegrationStats* stats = nullptr);

/// Total angular momentum J ω + L h expressed in the inertial frame.
Vec3 inertial_momentum(const SpacecraftState& state, const PlantModel& plant);

}  // namespace flyby
