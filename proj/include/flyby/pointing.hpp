#pragma once

#include "flyby/attitude.hpp"

namespace flyby
{

enum class ConeKind
{
    KeepIn,   ///< angle must stay below a limit: ‖N q‖ ≤ √(1 − cos θ_max)
    KeepOut,  ///< angle must stay above a limit: ‖M q‖ ≤ √(1 + cos θ_min)
};

/// Factored pointing constraint for one target at one time node.
struct ConeFactor
{
    ConeKind kind = ConeKind::KeepIn;
    Mat4 matrix = Mat4::Zero();  ///< N (keep-in) or M (keep-out); two rows are zero
    double rhs = 0.0;            ///< √(1 ∓ cos θ_limit)
    double target_time = 0.0;
};

/**
 * Quadratic form with cos θ = −qᵀ P q, where θ is the angle between the
 * inertial direction r and the body direction nu under attitude q.
 * Throws InvalidInput for non-unit r or nu (tolerance 1e-9).
 */
Mat4 build_P(const Vec3& r, const Vec3& nu);

enum class FactorSign
{
    Plus,   ///< factor of I + P (keep-in)
    Minus,  ///< factor of I − P (keep-out)
};

/// Returns F with Fᵀ F = I ± P via a symmetric eigendecomposition.
/// Throws NumericalError when I ± P has an eigenvalue below −1e-9.
Mat4 factor_cone(const Mat4& P, FactorSign sign);

/// Builds the factored constraint for a keep-in/keep-out limit angle (rad).
ConeFactor make_cone(ConeKind kind, const Vec3& r, const Vec3& nu, double limit_angle, double target_time);

/// Angle in [0, π] between the inertial direction r and body axis v_body.
double pointing_angle(const Quaternion& q, const Vec3& r_inertial, const Vec3& v_body);

}  // namespace flyby
