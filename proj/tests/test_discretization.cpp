#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "flyby/scenario.hpp"
#include "oracles.hpp"

using namespace flyby;

namespace
{

ScaledTrajectory random_reference(std::mt19937_64& rng, Index nodes, Index wheels)
{
    ScaledTrajectory ref;
    ref.times = uniform_grid(200.0, static_cast<std::size_t>(nodes));
    for (Index k = 0; k < nodes; ++k)
    {
        ref.states.push_back(oracle::random_scaled_state(rng, wheels, 0.5));
        ref.controls.push_back(oracle::random_control(rng, wheels, 0.5));
    }
    return ref;
}

}  // namespace

TEST(Foh, Examples)
{
    const VecX a = (VecX(2) << 1.0, -2.0).finished();
    const VecX b = (VecX(2) << 3.0, 4.0).finished();
    EXPECT_EQ(foh_interpolate(a, b, 2.0, 1.0, 2.0), b);
    EXPECT_EQ(foh_interpolate(a, b, 1.5, 1.0, 2.0), (VecX(2) << 2.0, 1.0).finished());
    EXPECT_EQ(foh_interpolate(a, a, 1.3, 1.0, 2.0), a);
    EXPECT_THROW(foh_interpolate(a, b, 1.0, 1.0, 2.0), InvalidInput);
    EXPECT_THROW(foh_interpolate(a, b, 2.5, 1.0, 2.0), InvalidInput);
}

TEST(DiscretizeInterval, MatrixExponentialAtEquilibrium)
{
    // Spinning-free rest state with no wheel momentum: A is constant along the reference.
    const Scenario s = build_benchmark();
    VecX x = VecX::Zero(11);
    x.head<4>() = s.x_init.q.coeffs();
    x.tail(4) << 0.3, -0.2, 0.1, 0.0;
    const VecX u = VecX::Zero(4);
    const double dt = 200.0 / 39.0;
    const IntervalDiscretization d = discretize_interval(x, u, u, 0.0, dt, s.plant, s.scaling,
                                                         IntegratorSettings::tight());
    const MatX A = jacobian_A(x, s.plant, s.scaling);
    const MatX expm = (A * dt).exp();
    EXPECT_LE((d.A - expm).cwiseAbs().maxCoeff(), 1e-8);
    const MatX series = MatX::Identity(11, 11) + A * dt + 0.5 * (A * dt) * (A * dt);
    EXPECT_LE((d.A - series).cwiseAbs().maxCoeff(), std::pow((A * dt).norm(), 3));
}

TEST(DiscretizeInterval, MomentumRowsAreTrapezoidal)
{
    const Scenario s = build_benchmark();
    VecX x = VecX::Zero(11);
    x.head<4>() = s.x_init.q.coeffs();
    const VecX u_a = (VecX(4) << 0.2, -0.1, 0.4, 0.0).finished();
    const VecX u_b = (VecX(4) << -0.3, 0.5, 0.1, 0.2).finished();
    const double dt = 5.0;
    const IntervalDiscretization d =
        discretize_interval(x, u_a, u_b, 10.0, 10.0 + dt, s.plant, s.scaling, IntegratorSettings::tight());
    const VecX h_next = oracle::discrete_step(d, x, u_a, u_b).tail(4);
    const VecX gain = s.scaling.w_h().cwiseProduct(s.scaling.w_tau().cwiseInverse());
    const VecX expected = x.tail(4) + (0.5 * dt) * gain.cwiseProduct(u_a + u_b);
    EXPECT_LE((h_next - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(DiscretizeInterval, ExactAtReference)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(41);
    const std::vector<double> t = uniform_grid(200.0, 40);
    for (int i = 0; i < 10; ++i)
    {
        const VecX x = oracle::random_scaled_state(rng, 4, 0.5);
        const VecX ua = oracle::random_control(rng, 4, 0.5);
        const VecX ub = oracle::random_control(rng, 4, 0.5);
        const IntervalDiscretization d =
            discretize_interval(x, ua, ub, t[5], t[6], s.plant, s.scaling, IntegratorSettings::tight());
        const FohSegment seg{t[5], t[6], ua, ub};
        const VecX nonlinear = propagate(x, seg, s.plant, s.scaling, IntegratorSettings::tight());
        EXPECT_LE((oracle::discrete_step(d, x, ua, ub) - nonlinear).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LE((d.x_end - nonlinear).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(DiscretizeInterval, MatchesLtvIntegration)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(42);
    const std::vector<double> t = uniform_grid(200.0, 40);
    for (int i = 0; i < 10; ++i)
    {
        const VecX xb = oracle::random_scaled_state(rng, 4, 0.5);
        const VecX ua = oracle::random_control(rng, 4, 0.5);
        const VecX ub = oracle::random_control(rng, 4, 0.5);
        const IntervalDiscretization d =
            discretize_interval(xb, ua, ub, t[10], t[11], s.plant, s.scaling, IntegratorSettings::tight());
        const VecX x = xb + oracle::random_control(rng, 11, 0.05);
        const VecX pa = ua + oracle::random_control(rng, 4, 0.1);
        const VecX pb = ub + oracle::random_control(rng, 4, 0.1);
        const VecX direct = oracle::ltv_propagate(xb, ua, ub, x, pa, pb, t[10], t[11], s.plant, s.scaling);
        EXPECT_LE((oracle::discrete_step(d, x, pa, pb) - direct).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(DiscretizeInterval, RejectsBadInput)
{
    const Scenario s = build_benchmark();
    VecX x = VecX::Zero(11);
    x[3] = 1.0;
    EXPECT_THROW(discretize_interval(x, VecX::Zero(3), VecX::Zero(4), 0.0, 1.0, s.plant, s.scaling,
                                     IntegratorSettings::loose()),
                 InvalidInput);
    x[5] = std::nan("");
    EXPECT_THROW(discretize_interval(x, VecX::Zero(4), VecX::Zero(4), 0.0, 1.0, s.plant, s.scaling,
                                     IntegratorSettings::loose()),
                 InvalidInput);
}

TEST(DiscretizeTrajectory, BenchmarkGridHas39Intervals)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(43);
    const ScaledTrajectory ref = random_reference(rng, 40, 4);
    const DiscreteLTV ltv = discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::loose());
    ASSERT_EQ(ltv.size(), 39u);
    EXPECT_NEAR(ref.times[1] - ref.times[0], 200.0 / 39.0, 1e-12);
    for (std::size_t k = 0; k < ltv.size(); ++k)
    {
        const IntervalDiscretization& d = ltv.intervals[k];
        EXPECT_LE((oracle::discrete_step(d, ref.states[k], ref.controls[k], ref.controls[k + 1]) - d.x_end)
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-4);
    }
}

TEST(DiscretizeTrajectory, TwoNodesIsOneInterval)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(44);
    ScaledTrajectory ref = random_reference(rng, 2, 4);
    const DiscreteLTV ltv = discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::loose());
    ASSERT_EQ(ltv.size(), 1u);
    const IntervalDiscretization d = discretize_interval(ref.states[0], ref.controls[0], ref.controls[1],
                                                         ref.times[0], ref.times[1], s.plant, s.scaling,
                                                         IntegratorSettings::loose());
    EXPECT_EQ(ltv.intervals[0].A, d.A);
    EXPECT_EQ(ltv.intervals[0].s, d.s);
    ref.controls.pop_back();
    EXPECT_THROW(discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::loose()), InvalidInput);
}

TEST(DiscretizeTrajectory, IndependentOfWorkerCount)
{
    const Scenario s = build_benchmark();
    std::mt19937_64 rng(45);
    const ScaledTrajectory ref = random_reference(rng, 12, 4);
    const DiscreteLTV one = discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::loose(), 1);
    const DiscreteLTV three = discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::loose(), 3);
    for (std::size_t k = 0; k < one.size(); ++k)
    {
        EXPECT_EQ(one.intervals[k].A, three.intervals[k].A);
        EXPECT_EQ(one.intervals[k].B_minus, three.intervals[k].B_minus);
        EXPECT_EQ(one.intervals[k].B_plus, three.intervals[k].B_plus);
        EXPECT_EQ(one.intervals[k].s, three.intervals[k].s);
    }
}

TEST(DiscretizeTrajectory, ZeroControlDrift)
{
    const Scenario s = build_benchmark();
    SpacecraftState st = s.x_init;
    st.omega = Vec3(0.01, -0.005, 0.002);
    st.h_wheels = (VecX(4) << 0.5, 0.0, -0.5, 1.0).finished();
    const VecX x0 = scale_state(st, s.scaling);
    const std::vector<double> t = uniform_grid(50.0, 6);
    const std::vector<VecX> zero(6, VecX::Zero(4));
    ScaledTrajectory ref{t, propagate_nodes(x0, t, zero, s.plant, s.scaling, IntegratorSettings::tight()), zero};
    const DiscreteLTV ltv = discretize_trajectory(ref, s.plant, s.scaling, IntegratorSettings::tight());
    for (std::size_t k = 0; k < ltv.size(); ++k)
    {
        const VecX next = ltv.intervals[k].A * ref.states[k] + ltv.intervals[k].s;
        EXPECT_LE((next - ref.states[k + 1]).cwiseAbs().maxCoeff(), 1e-7);
    }
}
