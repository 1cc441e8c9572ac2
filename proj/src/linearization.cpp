#include "flyby/linearization.hpp"

namespace flyby
{

MatX jacobian_A(const VecX& x_ref, const PlantModel& plant, const ScalingSet& scaling)
{
    const Index nw = plant.wheel_count();
    const Index nx = state_dim(nw);
    if (x_ref.size() != nx)
    {
        throw InvalidInput("jacobian_A: state dimension mismatch");
    }
    const Vec3 qv = x_ref.head<3>();
    const double qs = x_ref[3];
    const Vec3 w_omega = scaling.w_omega();
    const Vec3 omega = x_ref.segment<3>(4).cwiseQuotient(w_omega);
    const VecX h = x_ref.tail(nw).cwiseQuotient(scaling.w_h());
    const Mat3& J = plant.inertia();
    const Mat3& J_inv = plant.inertia_inverse();
    const MatX& L = plant.distribution();

    MatX A = MatX::Zero(nx, nx);

    // Kinematics: ½ [q]~⊗(ω) with respect to q, ½ [q]⊗ columns with respect to ω.
    A.block<3, 3>(0, 0) = -0.5 * cross_matrix(omega);
    A.block<3, 1>(0, 3) = 0.5 * omega;
    A.block<1, 3>(3, 0) = -0.5 * omega.transpose();
    Eigen::Matrix<double, 4, 3> dq_domega;
    dq_domega.topRows<3>() = 0.5 * (qs * Mat3::Identity() + cross_matrix(qv));
    dq_domega.bottomRows<1>() = -0.5 * qv.transpose();
    A.block<4, 3>(0, 4) = dq_domega * w_omega.cwiseInverse().asDiagonal();

    // Rigid-body block: J⁻¹([Jω]× − [ω]× J + [Lh]×), mapped through W_ω.
    const Mat3 dyn = J_inv * (cross_matrix(J * omega) - cross_matrix(omega) * J + cross_matrix(L * h));
    A.block<3, 3>(4, 4) = w_omega.asDiagonal() * dyn * w_omega.cwiseInverse().asDiagonal();

    // Wheel-momentum coupling: −W_ω J⁻¹ [ω]× L W_h⁻¹.
    A.block(4, 7, 3, nw) =
        -(w_omega.asDiagonal() * J_inv * cross_matrix(omega) * L) * scaling.w_h().cwiseInverse().asDiagonal();
    return A;
}

MatX jacobian_B(const PlantModel& plant, const ScalingSet& scaling)
{
    const Index nw = plant.wheel_count();
    MatX B = MatX::Zero(state_dim(nw), nw);
    const VecX tau_max = scaling.w_tau().cwiseInverse();
    B.block(4, 0, 3, nw) =
        -(scaling.w_omega().asDiagonal() * plant.inertia_inverse() * plant.distribution()) * tau_max.asDiagonal();
    B.bottomRows(nw) = (scaling.w_h().cwiseProduct(tau_max)).asDiagonal();
    return B;
}

VecX linearization_offset(const VecX& x_ref,
                          const VecX& u_ref,
                          const MatX& A,
                          const MatX& B,
                          const PlantModel& plant,
                          const ScalingSet& scaling,
                          double t)
{
    return f_nonlinear(x_ref, u_ref, plant, scaling, t) - A * x_ref - B * u_ref;
}

double card_weight(double value_prev, double epsilon)
{
    if (value_prev < 0.0)
    {
        throw InvalidInput("card_weight: previous value must be non-negative");
    }
    return 1.0 / (epsilon + value_prev);
}

CardinalityWeights CardinalityWeights::initial(Index nodes)
{
    return {VecX::Ones(nodes), VecX::Ones(nodes), kCardinalityEpsilon};
}

VecX CardinalityWeights::gamma_weights() const
{
    VecX w(gamma_prev.size());
    for (Index k = 0; k < w.size(); ++k)
    {
        w[k] = card_weight(gamma_prev[k], epsilon);
    }
    return w;
}

VecX CardinalityWeights::zeta_weights() const
{
    VecX w(zeta_prev.size());
    for (Index k = 0; k < w.size(); ++k)
    {
        w[k] = card_weight(zeta_prev[k], epsilon);
    }
    return w;
}

}  // namespace flyby
