#include <gtest/gtest.h>

#include "checks.hpp"
#include "flyby/solver.hpp"

using namespace flyby;

TEST(TrustRegion, RejectShrinks)
{
    const ScpConfig cfg;
    const auto [radii, accepted] = trust_region_update(0.6, TrustRadii{0.1, 0.1}, cfg);
    EXPECT_FALSE(accepted);
    EXPECT_DOUBLE_EQ(radii.delta_x, 0.025);
    EXPECT_DOUBLE_EQ(radii.delta_u, 0.025);
}

TEST(TrustRegion, AcceptGrows)
{
    const ScpConfig cfg;
    const auto [radii, accepted] = trust_region_update(0.4, TrustRadii{0.1, 0.1}, cfg);
    EXPECT_TRUE(accepted);
    EXPECT_DOUBLE_EQ(radii.delta_x, 0.2);
    EXPECT_DOUBLE_EQ(radii.delta_u, 0.2);
}

TEST(TrustRegion, BoundaryAccepts)
{
    const ScpConfig cfg;
    EXPECT_TRUE(trust_region_update(cfg.epsilon_max, TrustRadii{}, cfg).second);
    EXPECT_FALSE(trust_region_update(std::nextafter(cfg.epsilon_max, 1.0), TrustRadii{}, cfg).second);
}

TEST(FeasibilityMetric, Examples)
{
    const std::vector<VecX> a = {VecX::Zero(3), VecX::Ones(3)};
    EXPECT_EQ(feasibility_metric(a, a), 0.0);
    std::vector<VecX> b = a;
    b[1] += Eigen::Vector3d(0.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(feasibility_metric(a, b), 1.0);
    b.pop_back();
    EXPECT_THROW(feasibility_metric(a, b), InvalidInput);
}

TEST(ScpConfig, Validation)
{
    ScpConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.kappa_minus = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = ScpConfig{};
    cfg.kappa_plus = 0.5;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(NullControl, ReferenceStaysOnInitialState)
{
    const Scenario s = build_benchmark();
    const ScaledTrajectory ref = null_control_reference(s);
    ASSERT_EQ(ref.size(), 40u);
    for (std::size_t k = 0; k < ref.size(); ++k)
    {
        EXPECT_EQ(ref.controls[k], VecX::Zero(4));
        EXPECT_LE((ref.states[k] - ref.states[0]).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(RunScp, NominalZeroMomentum)
{
    const Scenario s = build_benchmark();
    auto backend = make_default_backend();
    std::vector<IterationRecord> seen;
    const GuidanceSolution sol = run_scp(s, *backend, [&](const IterationRecord& r) { seen.push_back(r); });

    EXPECT_EQ(sol.termination, Termination::Converged) << sol.message;
    EXPECT_LE(sol.iterations, s.scp.n_iter);
    EXPECT_EQ(sol.outages.visual_outage, 0.0);
    EXPECT_EQ(sol.outages.infrared_outage, 0.0);
    EXPECT_LE(sol.final_epsilon_x, s.scp.epsilon_max);
    EXPECT_EQ(seen.size(), sol.history.size());

    const checks::ConstraintMargins m = checks::tightened_margins(sol, s);
    EXPECT_LE(m.worst_pointing(), 1e-5);
    EXPECT_LE(m.worst_box(), 1e-5);
    EXPECT_LE(m.quaternion_drift, 1e-6);

    // The first accepted solve from the null-control guess is the least feasible.
    ASSERT_FALSE(sol.history.empty());
    EXPECT_TRUE(std::isfinite(sol.history.front().epsilon_x));
    EXPECT_GE(sol.history.front().epsilon_x, sol.final_epsilon_x);
}
