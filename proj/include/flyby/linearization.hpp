#pragma once

#include "flyby/attitude.hpp"
#include "flyby/dynamics.hpp"

namespace flyby
{

/// ∂f/∂x of the scaled dynamics at a reference state (analytic).
MatX jacobian_A(const VecX& x_ref, const PlantModel& plant, const ScalingSet& scaling);

/// ∂f/∂u of the scaled dynamics; constant along any reference.
MatX jacobian_B(const PlantModel& plant, const ScalingSet& scaling);

/**
 * Affine term of the first-order expansion about (x_ref, u_ref), so that
 * f(x, u) ≈ A x + B u + s with equality at the reference:
 * s = f(x_ref, u_ref) − A x_ref − B u_ref.
 */
VecX linearization_offset(const VecX& x_ref,
                          const VecX& u_ref,
                          const MatX& A,
                          const MatX& B,
                          const PlantModel& plant,
                          const ScalingSet& scaling,
                          double t = 0.0);

inline constexpr double kCardinalityEpsilon = 1e-3;

/// Reweighted-ℓ1 weight 1/(ε + previous). Throws InvalidInput for negative input.
double card_weight(double value_prev, double epsilon = kCardinalityEpsilon);

/// Per-node reweighting values for the two field-of-view slacks.
struct CardinalityWeights
{
    VecX gamma_prev;
    VecX zeta_prev;
    double epsilon = kCardinalityEpsilon;

    /// γ̄ = ζ̄ = 1 on every node, used before the first solve.
    static CardinalityWeights initial(Index nodes);

    VecX gamma_weights() const;
    VecX zeta_weights() const;
};

}  // namespace flyby
