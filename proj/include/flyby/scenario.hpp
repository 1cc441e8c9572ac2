#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flyby/attitude.hpp"
#include "flyby/conic.hpp"
#include "flyby/dynamics.hpp"
#include "flyby/integrator.hpp"

namespace flyby
{

/// Tuning of the sequential convex programming loop.
struct ScpConfig
{
    int n_iter = 30;
    int n_sol = 20;
    double delta_x0 = 0.1;
    double delta_u0 = 0.1;
    double kappa_plus = 2.0;
    double kappa_minus = 0.25;
    double epsilon_max = 0.5;
    double delta_convergence = 1e-2;
    double time_limit = 0.0;  ///< seconds, 0 disables
    ObjectiveWeights beta = (ObjectiveWeights() << 1.0, 1.0, 0.1, 0.01, 0.01, 0.01).finished();
    double card_epsilon = kCardinalityEpsilon;
    IntegratorSettings linearization = IntegratorSettings::loose();
    IntegratorSettings truth = IntegratorSettings::tight();
    std::size_t workers = 1;  ///< threads used for discretisation

    void validate() const;
};

/// Benchmark definition in physical units.
struct Scenario
{
    Scenario(PlantModel plant_model, ScalingSet scaling_set);

    std::string name = "custom";
    double t_final = 200.0;
    Index nodes = 40;
    Vec3 comet_position_km{7000.0, -1000.0, 0.0};  ///< relative position at t = 0
    Vec3 comet_velocity_km_s{-70.0, 0.0, 0.0};
    Vec3 r_sun{0.0, 0.0, -1.0};
    Vec3 v_body{1.0, 0.0, 0.0};
    double theta_vmax = 0.0;  ///< rad
    double theta_imax = 0.0;
    double theta_sun = 0.0;
    SpacecraftState x_init;
    PlantModel plant;
    ScalingSet scaling;
    double tightening = 0.03;
    std::optional<Index> fault;  ///< 1-based wheel index removed from the assembly
    ScpConfig scp;

    /// Unit vector from the spacecraft to the comet.
    Vec3 comet_direction(double t) const;
    double comet_range_km(double t) const;
    std::vector<double> times() const { return uniform_grid(t_final, static_cast<std::size_t>(nodes)); }
    double node_spacing() const { return t_final / static_cast<double>(nodes - 1); }

    /// Throws InvalidInput on any violated invariant.
    void validate() const;
};

/// Table-1 assembly: J, L and limits for all four wheels.
Mat3 benchmark_inertia();
MatX benchmark_distribution();

/**
 * Comet Interceptor benchmark with an optional failed wheel (1-based) and the
 * initial momenta of the remaining wheels (N·m·s, one per active wheel).
 */
Scenario build_benchmark(std::optional<Index> fault = std::nullopt, const VecX& h0 = VecX());

/// Copy of an intact scenario with wheel `fault` (1-based) removed; its initial momentum is dropped.
Scenario apply_fault(const Scenario& base, Index fault);

/// Tightened, scaled cone factors and bounds for the transcription.
TranscriptionData make_transcription_data(const Scenario& scenario);

/// Vertices L·h over all sign combinations of ±h_max (body-frame momentum envelope).
std::vector<Vec3> momentum_envelope_vertices(const MatX& distribution, const VecX& h_max);

/// Counter-based seed split; stable across platforms.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index);

/// Uniform draws from H = {h : |h_i| ≤ 0.9 h_max,i}.
class MomentumSampler
{
public:
    MomentumSampler(const VecX& h_max, std::uint64_t seed, double fraction = 0.9);

    VecX draw();
    const VecX& bounds() const { return bounds_; }

private:
    double uniform01();

    VecX bounds_;
    std::mt19937_64 engine_;
};

struct OutageMetrics
{
    double visual_outage = 0.0;    ///< s
    double infrared_outage = 0.0;  ///< s
    double max_pointing_error = 0.0;  ///< rad
    int visual_nodes = 0;
    int infrared_nodes = 0;
    double dense_visual_outage = -1.0;    ///< s, supersampled diagnostic (< 0 if not computed)
    double dense_infrared_outage = -1.0;
};

/// Comet pointing angle (rad) at each node of a physical trajectory.
std::vector<double> comet_angles(const Trajectory& trajectory, const Scenario& scenario);

/// Node-based outage against the untightened limits.
OutageMetrics evaluate_outages(const Trajectory& trajectory, const Scenario& scenario);

/// Adds the supersampled diagnostic by propagating the FOH controls.
void add_dense_outages(OutageMetrics& metrics,
                       const Trajectory& trajectory,
                       const Scenario& scenario,
                       int supersampling = 10);

/// Built-in preset names.
std::vector<std::string> scenario_presets();

/// Preset name or JSON file path. Unknown keys are rejected.
Scenario load_scenario(const std::string& preset_or_path);
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace flyby
