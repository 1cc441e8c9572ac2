#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace flyby
{

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using Index = Eigen::Index;
using MatX = Eigen::MatrixXd;

/// Raised when a caller hands in data that violates a documented precondition.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/**
 * Attitude quaternion stored as [v1 v2 v3 s] (vector part first).
 *
 * The quaternion rotates inertial coordinates into body coordinates: a body
 * vector b is expressed in the inertial frame as q ⊗ [b; 0] ⊗ q*.
 */
class Quaternion
{
public:
    Quaternion() : coeffs_(0.0, 0.0, 0.0, 1.0) {}
    explicit Quaternion(const Vec4& coeffs) : coeffs_(coeffs) {}
    Quaternion(const Vec3& vec, double scalar) : coeffs_(vec.x(), vec.y(), vec.z(), scalar) {}

    static Quaternion identity() { return {}; }

    Vec3 vec() const { return coeffs_.head<3>(); }
    double scalar() const { return coeffs_[3]; }
    const Vec4& coeffs() const { return coeffs_; }

    double norm() const { return coeffs_.norm(); }
    Quaternion normalized() const { return Quaternion(coeffs_.normalized()); }
    Quaternion conjugate() const { return {-vec(), scalar()}; }

private:
    Vec4 coeffs_;
};

/// Hamilton product p ⊗ q, consistent with q̇ = ½ q ⊗ [ω; 0].
Quaternion quat_multiply(const Quaternion& p, const Quaternion& q);

/// Left-multiplication matrix: p ⊗ q = left_product_matrix(p) * q.
Mat4 left_product_matrix(const Quaternion& p);

/// Right-multiplication matrix: p ⊗ q = right_product_matrix(q) * p.
Mat4 right_product_matrix(const Quaternion& q);

/// Skew-symmetric matrix such that cross_matrix(a) * b == a.cross(b).
Mat3 cross_matrix(const Vec3& a);

/// Inertial coordinates r expressed in the body frame (q* ⊗ r ⊗ q).
/// Throws InvalidInput when |q| deviates from 1 by more than 1e-6.
Vec3 rotate_by_quaternion(const Quaternion& q, const Vec3& r);

/// Body coordinates b expressed in the inertial frame (q ⊗ b ⊗ q*).
Vec3 body_to_inertial(const Quaternion& q, const Vec3& b);

struct SpacecraftState
{
    Quaternion q;
    Vec3 omega = Vec3::Zero();  ///< body rates, rad/s
    VecX h_wheels;              ///< wheel momenta, N·m·s
};

struct ControlInput
{
    VecX tau;  ///< wheel motor torques, N·m
};

/**
 * Diagonal scalings W = diag(max)^-1 used to normalise rates, wheel momenta
 * and motor torques. Only the diagonals are stored.
 */
class ScalingSet
{
public:
    ScalingSet(const Vec3& omega_max, const VecX& h_max, const VecX& tau_max);

    const Vec3& w_omega() const { return w_omega_; }
    const VecX& w_h() const { return w_h_; }
    const VecX& w_tau() const { return w_tau_; }
    Index wheel_count() const { return w_h_.size(); }

    Vec3 omega_max() const { return w_omega_.cwiseInverse(); }
    VecX h_max() const { return w_h_.cwiseInverse(); }
    VecX tau_max() const { return w_tau_.cwiseInverse(); }

private:
    Vec3 w_omega_;
    VecX w_h_;
    VecX w_tau_;
};

/// Size of the scaled state vector [q(4); W_ω ω(3); W_h h(n_w)].
inline Index state_dim(Index wheel_count) { return 7 + wheel_count; }

VecX scale_state(const SpacecraftState& state, const ScalingSet& scaling);
SpacecraftState unscale_state(const VecX& scaled, const ScalingSet& scaling);
VecX scale_control(const ControlInput& control, const ScalingSet& scaling);
ControlInput unscale_control(const VecX& scaled, const ScalingSet& scaling);

/// Node-sampled trajectory in physical units.
struct Trajectory
{
    std::vector<double> times;
    std::vector<SpacecraftState> states;
    std::vector<ControlInput> controls;

    std::size_t size() const { return times.size(); }
    /// Throws InvalidInput unless times start at 0, increase strictly and
    /// the three sequences have equal length.
    void validate() const;
};

/// Uniform grid of `nodes` samples on [0, t_final].
std::vector<double> uniform_grid(double t_final, std::size_t nodes);

}  // namespace flyby
