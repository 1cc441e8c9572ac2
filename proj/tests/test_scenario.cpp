#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "flyby/scenario.hpp"

using namespace flyby;

namespace
{

/// True when p lies inside the convex hull of the symmetric zonotope L·[−h_max, h_max].
/// The hull is checked through its support function in many directions.
bool inside_envelope(const Vec3& p, const MatX& L, const VecX& h_max, int directions = 4000)
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n;
    for (int i = 0; i < directions; ++i)
    {
        const Vec3 d = Vec3(n(rng), n(rng), n(rng)).normalized();
        const double support = (L.transpose() * d).cwiseAbs().dot(h_max);
        if (d.dot(p) > support + 1e-12)
        {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Scenario, CometDirectionAtKeyTimes)
{
    const Scenario s = build_benchmark();
    EXPECT_LE((s.comet_direction(0.0) - Vec3(7000.0, -1000.0, 0.0).normalized()).norm(), 1e-12);
    EXPECT_LE((s.comet_direction(100.0) - Vec3(0.0, -1.0, 0.0)).norm(), 1e-12);
    EXPECT_NEAR(s.comet_range_km(100.0), 1000.0, 1e-9);
    EXPECT_LE((s.comet_direction(200.0) - Vec3(-7000.0, -1000.0, 0.0).normalized()).norm(), 1e-12);
}

TEST(Scenario, NominalBenchmark)
{
    const Scenario s = build_benchmark();
    EXPECT_EQ(s.plant.wheel_count(), 4);
    for (Index j = 0; j < 4; ++j)
    {
        EXPECT_NEAR(s.plant.distribution().col(j).norm(), 1.0, 1e-12);
    }
    EXPECT_EQ(s.nodes, 40);
    EXPECT_EQ(s.t_final, 200.0);
    EXPECT_EQ(s.x_init.h_wheels, VecX::Zero(4));
    EXPECT_NEAR(s.x_init.q.norm(), 1.0, 1e-15);
    EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, FaultRemovesColumn)
{
    const Scenario nominal = build_benchmark();
    const Scenario s = build_benchmark(Index{4});
    EXPECT_EQ(s.plant.wheel_count(), 3);
    EXPECT_EQ(s.plant.distribution(), nominal.plant.distribution().leftCols(3));
    EXPECT_EQ(s.scaling.wheel_count(), 3);
    EXPECT_THROW(build_benchmark(Index{5}), InvalidInput);
    EXPECT_THROW(build_benchmark(Index{0}), InvalidInput);
}

TEST(Scenario, InitialMomentumMustLieInH)
{
    EXPECT_NO_THROW(build_benchmark(std::nullopt, VecX::Constant(4, 0.9 * 3.2)));
    EXPECT_THROW(build_benchmark(std::nullopt, VecX::Constant(4, 0.9 * 3.2 + 1e-6)), InvalidInput);
    EXPECT_THROW(build_benchmark(std::nullopt, VecX::Zero(3)), InvalidInput);
}

TEST(Scenario, ApplyFaultMatchesDirectConstruction)
{
    const VecX h0 = (VecX(4) << 0.5, -1.0, 1.5, 2.0).finished();
    const Scenario base = build_benchmark(std::nullopt, h0);
    const Scenario f = apply_fault(base, 2);
    EXPECT_EQ(f.plant.wheel_count(), 3);
    EXPECT_EQ(f.plant.active_wheels(), (std::vector<int>{0, 2, 3}));
    EXPECT_EQ(f.x_init.h_wheels, (VecX(3) << 0.5, 1.5, 2.0).finished());
    EXPECT_EQ(f.fault, std::optional<Index>(2));
    EXPECT_NE(f.name, base.name);
    EXPECT_THROW(apply_fault(f, 1), InvalidInput);
    EXPECT_THROW(apply_fault(base, 5), InvalidInput);
}

TEST(Envelope, FaultyPolytopeInsideNominal)
{
    const Scenario nominal = build_benchmark();
    const Scenario faulty = build_benchmark(Index{4});
    const auto faulty_vertices =
        momentum_envelope_vertices(faulty.plant.distribution(), faulty.scaling.h_max());
    const auto nominal_vertices =
        momentum_envelope_vertices(nominal.plant.distribution(), nominal.scaling.h_max());
    EXPECT_EQ(faulty_vertices.size(), 8u);
    EXPECT_EQ(nominal_vertices.size(), 16u);
    for (const Vec3& v : faulty_vertices)
    {
        EXPECT_TRUE(inside_envelope(v, nominal.plant.distribution(), nominal.scaling.h_max()));
    }
    // Strict containment: some nominal vertex lies outside the faulty polytope.
    bool outside = false;
    for (const Vec3& v : nominal_vertices)
    {
        outside = outside || !inside_envelope(v, faulty.plant.distribution(), faulty.scaling.h_max());
    }
    EXPECT_TRUE(outside);
}

TEST(Sampler, DeterministicAndBounded)
{
    const VecX h_max = VecX::Constant(4, 3.2);
    MomentumSampler a(h_max, 7), b(h_max, 7), c(h_max, 8);
    bool differs = false;
    for (int i = 0; i < 500; ++i)
    {
        const VecX x = a.draw();
        EXPECT_EQ(x, b.draw());
        differs = differs || x != c.draw();
        EXPECT_LE(x.cwiseAbs().maxCoeff(), 0.9 * 3.2);
    }
    EXPECT_TRUE(differs);
    EXPECT_EQ(a.bounds(), VecX::Constant(4, 0.9 * 3.2));
}

TEST(Sampler, SubSeedsAreStable)
{
    EXPECT_EQ(sub_seed(1, 0), sub_seed(1, 0));
    EXPECT_NE(sub_seed(1, 0), sub_seed(1, 1));
    EXPECT_NE(sub_seed(1, 0), sub_seed(2, 0));
}

TEST(Outage, CountsNodes)
{
    const Scenario s = build_benchmark();
    Trajectory tr;
    tr.times = s.times();
    for (double t : tr.times)
    {
        // Point exactly at the comet: boresight x maps to the comet direction.
        const Vec3 r = s.comet_direction(t);
        const Vec3 axis = Vec3(1, 0, 0).cross(r);
        const double angle = std::acos(std::clamp(r.x(), -1.0, 1.0));
        const Vec3 n = axis.norm() > 1e-12 ? axis.normalized() : Vec3(0, 0, 1);
        SpacecraftState st;
        st.q = Quaternion(std::sin(angle / 2) * n, std::cos(angle / 2));
        st.h_wheels = VecX::Zero(4);
        tr.states.push_back(st);
        tr.controls.push_back(ControlInput{VecX::Zero(4)});
    }
    OutageMetrics m = evaluate_outages(tr, s);
    EXPECT_EQ(m.visual_outage, 0.0);
    EXPECT_EQ(m.infrared_outage, 0.0);
    EXPECT_LE(m.max_pointing_error, 1e-7);

    // Tilt three nodes by 6° about z: beyond both fields of view.
    const Quaternion tilt(Vec3(0, 0, std::sin(3.0 * M_PI / 180.0)), std::cos(3.0 * M_PI / 180.0));
    for (int k : {3, 17, 30})
    {
        tr.states[k].q = quat_multiply(tr.states[k].q, tilt);
    }
    m = evaluate_outages(tr, s);
    EXPECT_NEAR(m.infrared_outage, 3.0 * 200.0 / 39.0, 1e-12);
    EXPECT_NEAR(m.visual_outage, 3.0 * 200.0 / 39.0, 1e-12);
}

TEST(ScenarioJson, RoundTripAndUnknownKeys)
{
    const Scenario s = build_benchmark(Index{2});
    const std::string text = scenario_to_json(s);
    const Scenario back = scenario_from_json(text);
    EXPECT_EQ(scenario_to_json(back), text);
    EXPECT_EQ(back.plant.wheel_count(), 3);
    EXPECT_THROW(scenario_from_json(R"({"nodez": 40})"), InvalidInput);
    EXPECT_THROW(scenario_from_json("{"), InvalidInput);
    EXPECT_THROW(load_scenario("no-such-preset"), InvalidInput);
    EXPECT_NO_THROW(load_scenario("comet-interceptor"));
}

TEST(ScenarioJson, OverridesApply)
{
    const Scenario s = scenario_from_json(R"({"nodes": 20, "tightening": 0.05, "scp": {"n_iter": 12}})");
    EXPECT_EQ(s.nodes, 20);
    EXPECT_EQ(s.tightening, 0.05);
    EXPECT_EQ(s.scp.n_iter, 12);
    EXPECT_THROW(scenario_from_json(R"({"nodes": 1})"), InvalidInput);
}
