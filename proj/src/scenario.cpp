#include "flyby/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "flyby/pointing.hpp"

namespace flyby
{

namespace
{

constexpr double kDeg = M_PI / 180.0;
constexpr const char* kPreset = "comet-interceptor";

}  // namespace

void ScpConfig::validate() const
{
    if (n_iter < 1 || n_sol < 1)
    {
        throw InvalidInput("ScpConfig: n_iter and n_sol must be at least 1");
    }
    if (!(delta_x0 > 0.0) || !(delta_u0 > 0.0) || !(epsilon_max > 0.0) || !(delta_convergence > 0.0))
    {
        throw InvalidInput("ScpConfig: trust radii and thresholds must be positive");
    }
    if (!(kappa_plus >= 1.0) || !(kappa_minus > 0.0) || kappa_minus > 1.0)
    {
        throw InvalidInput("ScpConfig: need kappa_plus >= 1 and kappa_minus in (0, 1]");
    }
    if (time_limit < 0.0 || !(card_epsilon > 0.0) || (beta.array() < 0.0).any())
    {
        throw InvalidInput("ScpConfig: time limit, epsilon and weights must be non-negative");
    }
    linearization.validate();
    truth.validate();
}

Scenario::Scenario(PlantModel plant_model, ScalingSet scaling_set)
    : plant(std::move(plant_model)), scaling(std::move(scaling_set))
{
    x_init.h_wheels = VecX::Zero(plant.wheel_count());
}

Vec3 Scenario::comet_direction(double t) const
{
    const Vec3 p = comet_position_km + t * comet_velocity_km_s;
    return p.normalized();
}

double Scenario::comet_range_km(double t) const
{
    return (comet_position_km + t * comet_velocity_km_s).norm();
}

void Scenario::validate() const
{
    if (!(t_final > 0.0) || nodes < 2)
    {
        throw InvalidInput("Scenario: need t_final > 0 and at least two nodes");
    }
    for (const double a : {theta_vmax, theta_imax, theta_sun})
    {
        if (!(a > 0.0) || !(a < M_PI))
        {
            throw InvalidInput("Scenario: pointing angles must lie in (0, pi)");
        }
    }
    if (std::abs(r_sun.norm() - 1.0) > 1e-9 || std::abs(v_body.norm() - 1.0) > 1e-9)
    {
        throw InvalidInput("Scenario: sun direction and boresight must be unit vectors");
    }
    // Straight-line motion: the range is smallest at the perpendicular foot.
    const double v2 = comet_velocity_km_s.squaredNorm();
    double t_min = v2 > 0.0 ? -comet_position_km.dot(comet_velocity_km_s) / v2 : 0.0;
    t_min = std::clamp(t_min, 0.0, t_final);
    if (!(comet_range_km(t_min) > 0.0))
    {
        throw InvalidInput("Scenario: the comet passes through the spacecraft");
    }
    if (!(tightening >= 0.0) || !(tightening < 1.0))
    {
        throw InvalidInput("Scenario: tightening must lie in [0, 1)");
    }
    if (scaling.wheel_count() != plant.wheel_count() || x_init.h_wheels.size() != plant.wheel_count())
    {
        throw InvalidInput("Scenario: wheel counts of plant, limits and initial state disagree");
    }
    if (std::abs(x_init.q.norm() - 1.0) > 1e-6)
    {
        throw InvalidInput("Scenario: initial quaternion must be unit norm");
    }
    const double keep = 1.0 - tightening;
    if ((x_init.h_wheels.cwiseAbs().array() > keep * scaling.h_max().array()).any())
    {
        throw InvalidInput("Scenario: initial wheel momentum violates the tightened limit");
    }
    if ((x_init.omega.cwiseAbs().array() > keep * scaling.omega_max().array()).any())
    {
        throw InvalidInput("Scenario: initial rate violates the tightened limit");
    }
    scp.validate();
}

Mat3 benchmark_inertia()
{
    Mat3 J;
    J << 225, 10, -10, 10, 128, 10, -10, 10, 223;
    return J;
}

MatX benchmark_distribution()
{
    const double s6 = std::sqrt(6.0);
    MatX L(3, 4);
    L << 1, -1, -1, 1, s6, s6, s6, s6, 1, 1, -1, -1;
    return L * (std::sqrt(2.0) / 4.0);
}

namespace
{

struct Assembly
{
    Mat3 inertia;
    MatX distribution;
    VecX tau_max;
    VecX h_max;
    Vec3 omega_max;
};

Scenario assemble(const Assembly& a, std::optional<Index> fault)
{
    PlantModel plant(a.inertia, a.distribution);
    VecX tau_max = a.tau_max;
    VecX h_max = a.h_max;
    if (fault)
    {
        const Index j = *fault - 1;
        if (j < 0 || j >= plant.wheel_count())
        {
            throw InvalidInput("fault index out of range (wheels are numbered from 1)");
        }
        plant = plant.without_wheel(j);
        const Index n = tau_max.size();
        VecX t(n - 1), h(n - 1);
        for (Index i = 0, c = 0; i < n; ++i)
        {
            if (i != j)
            {
                t[c] = tau_max[i];
                h[c++] = h_max[i];
            }
        }
        tau_max = t;
        h_max = h;
    }
    Scenario s(plant, ScalingSet(a.omega_max, h_max, tau_max));
    s.fault = fault;
    return s;
}

Assembly benchmark_assembly()
{
    return {benchmark_inertia(), benchmark_distribution(), VecX::Constant(4, 0.172), VecX::Constant(4, 3.2),
            Vec3::Constant(5.0 * kDeg)};
}

void set_benchmark_defaults(Scenario& s)
{
    s.name = kPreset;
    s.theta_vmax = 0.46 * kDeg;
    s.theta_imax = 5.0 * kDeg;
    s.theta_sun = 60.0 * kDeg;
    s.x_init.q = Quaternion(Vec4(-0.7, 0.05, -0.05, 0.7)).normalized();
    s.x_init.omega.setZero();
}

}  // namespace

Scenario build_benchmark(std::optional<Index> fault, const VecX& h0)
{
    Scenario s = assemble(benchmark_assembly(), fault);
    set_benchmark_defaults(s);
    if (fault)
    {
        s.name += "-fault" + std::to_string(*fault);
    }
    if (h0.size() != 0)
    {
        if (h0.size() != s.plant.wheel_count())
        {
            throw InvalidInput("build_benchmark: h0 needs one entry per active wheel");
        }
        if ((h0.cwiseAbs().array() > 0.9 * s.scaling.h_max().array() + 1e-12).any())
        {
            throw InvalidInput("build_benchmark: h0 lies outside the dust-impact set H");
        }
        s.x_init.h_wheels = h0;
    }
    s.validate();
    return s;
}

Scenario apply_fault(const Scenario& base, Index fault)
{
    if (base.fault)
    {
        throw InvalidInput("apply_fault: the scenario already has a failed wheel");
    }
    const Index j = fault - 1;
    const Index n = base.plant.wheel_count();
    if (j < 0 || j >= n || n < 2)
    {
        throw InvalidInput("apply_fault: fault index out of range (wheels are numbered from 1)");
    }
    auto drop = [&](const VecX& v) {
        VecX out(n - 1);
        for (Index i = 0, c = 0; i < n; ++i)
        {
            if (i != j)
            {
                out[c++] = v[i];
            }
        }
        return out;
    };
    Scenario s(base.plant.without_wheel(j),
               ScalingSet(base.scaling.omega_max(), drop(base.scaling.h_max()), drop(base.scaling.tau_max())));
    s.name = base.name + "-fault" + std::to_string(fault);
    s.t_final = base.t_final;
    s.nodes = base.nodes;
    s.comet_position_km = base.comet_position_km;
    s.comet_velocity_km_s = base.comet_velocity_km_s;
    s.r_sun = base.r_sun;
    s.v_body = base.v_body;
    s.theta_vmax = base.theta_vmax;
    s.theta_imax = base.theta_imax;
    s.theta_sun = base.theta_sun;
    s.x_init = base.x_init;
    s.x_init.h_wheels = drop(base.x_init.h_wheels);
    s.tightening = base.tightening;
    s.fault = fault;
    s.scp = base.scp;
    s.validate();
    return s;
}

TranscriptionData make_transcription_data(const Scenario& scenario)
{
    scenario.validate();
    const double keep = 1.0 - scenario.tightening;
    TranscriptionData data;
    data.nodes = scenario.nodes;
    data.wheel_count = scenario.plant.wheel_count();
    for (const double t : scenario.times())
    {
        const Vec3 rc = scenario.comet_direction(t);
        data.sun.push_back(make_cone(ConeKind::KeepOut, scenario.r_sun, scenario.v_body, scenario.theta_sun, t));
        data.visual.push_back(make_cone(ConeKind::KeepIn, rc, scenario.v_body, keep * scenario.theta_vmax, t));
        data.infrared.push_back(make_cone(ConeKind::KeepIn, rc, scenario.v_body, keep * scenario.theta_imax, t));
    }
    data.torque_bound = 1.0;
    data.momentum_bound = keep;
    data.rate_bound = keep;
    data.x_init = scale_state(scenario.x_init, scenario.scaling);
    return data;
}

std::vector<Vec3> momentum_envelope_vertices(const MatX& distribution, const VecX& h_max)
{
    const Index n = distribution.cols();
    if (h_max.size() != n || n > 20)
    {
        throw InvalidInput("momentum_envelope_vertices: limits must match the wheel count");
    }
    std::vector<Vec3> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask)
    {
        VecX h(n);
        for (Index i = 0; i < n; ++i)
        {
            h[i] = (mask >> i) & 1u ? h_max[i] : -h_max[i];
        }
        out.push_back(distribution * h);
    }
    return out;
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index)
{
    // SplitMix64 finaliser applied to a Weyl sequence position.
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

MomentumSampler::MomentumSampler(const VecX& h_max, std::uint64_t seed, double fraction)
    : bounds_(fraction * h_max), engine_(seed)
{
    if (h_max.size() < 1 || (h_max.array() <= 0.0).any() || !(fraction > 0.0) || fraction > 1.0)
    {
        throw InvalidInput("MomentumSampler: need positive limits and a fraction in (0, 1]");
    }
}

double MomentumSampler::uniform01()
{
    // 53 random mantissa bits; the engine sequence itself is fixed by the standard.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

VecX MomentumSampler::draw()
{
    VecX h(bounds_.size());
    for (Index i = 0; i < h.size(); ++i)
    {
        h[i] = (2.0 * uniform01() - 1.0) * bounds_[i];
    }
    return h;
}

std::vector<double> comet_angles(const Trajectory& trajectory, const Scenario& scenario)
{
    std::vector<double> out;
    out.reserve(trajectory.size());
    for (std::size_t k = 0; k < trajectory.size(); ++k)
    {
        out.push_back(pointing_angle(trajectory.states[k].q,
                                     scenario.comet_direction(trajectory.times[k]),
                                     scenario.v_body));
    }
    return out;
}

OutageMetrics evaluate_outages(const Trajectory& trajectory, const Scenario& scenario)
{
    OutageMetrics m;
    const double dt = scenario.node_spacing();
    for (const double angle : comet_angles(trajectory, scenario))
    {
        m.max_pointing_error = std::max(m.max_pointing_error, angle);
        m.visual_nodes += angle > scenario.theta_vmax ? 1 : 0;
        m.infrared_nodes += angle > scenario.theta_imax ? 1 : 0;
    }
    m.visual_outage = m.visual_nodes * dt;
    m.infrared_outage = m.infrared_nodes * dt;
    return m;
}

void add_dense_outages(OutageMetrics& metrics, const Trajectory& trajectory, const Scenario& scenario, int supersampling)
{
    if (supersampling < 1 || trajectory.size() < 2)
    {
        throw InvalidInput("add_dense_outages: need supersampling >= 1 and two nodes");
    }
    VecX x = scale_state(trajectory.states.front(), scenario.scaling);
    int visual = 0, infrared = 0, total = 0;
    for (std::size_t k = 0; k + 1 < trajectory.size(); ++k)
    {
        FohSegment seg{trajectory.times[k],
                       trajectory.times[k + 1],
                       scale_control(trajectory.controls[k], scenario.scaling),
                       scale_control(trajectory.controls[k + 1], scenario.scaling)};
        std::vector<double> sample_times;
        const double h = (seg.t_b - seg.t_a) / supersampling;
        for (int i = 0; i < supersampling; ++i)
        {
            sample_times.push_back(seg.t_a + i * h);
        }
        std::vector<VecX> samples;
        const VecX x_end = propagate(x, seg, scenario.plant, scenario.scaling, scenario.scp.truth, &sample_times, &samples);
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const SpacecraftState st = unscale_state(samples[i], scenario.scaling);
            const double a = pointing_angle(st.q, scenario.comet_direction(sample_times[i]), scenario.v_body);
            visual += a > scenario.theta_vmax ? 1 : 0;
            infrared += a > scenario.theta_imax ? 1 : 0;
            ++total;
        }
        x = x_end;
    }
    metrics.dense_visual_outage = scenario.t_final * visual / total;
    metrics.dense_infrared_outage = scenario.t_final * infrared / total;
}

std::vector<std::string> scenario_presets()
{
    return {kPreset, std::string(kPreset) + "-fault4"};
}

namespace
{

using nlohmann::json;

Vec3 vec3_from(const json& j, const std::string& key)
{
    if (!j.is_array() || j.size() != 3)
    {
        throw InvalidInput("scenario: '" + key + "' must be a 3-element array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

VecX vecx_from(const json& j, const std::string& key)
{
    if (!j.is_array() || j.empty())
    {
        throw InvalidInput("scenario: '" + key + "' must be a non-empty array");
    }
    VecX v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        v[static_cast<Index>(i)] = j[i].get<double>();
    }
    return v;
}

MatX matrix_from(const json& j, const std::string& key)
{
    if (!j.is_array() || j.empty() || !j[0].is_array())
    {
        throw InvalidInput("scenario: '" + key + "' must be an array of rows");
    }
    MatX m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r)
    {
        if (j[r].size() != j[0].size())
        {
            throw InvalidInput("scenario: '" + key + "' has ragged rows");
        }
        for (std::size_t c = 0; c < j[r].size(); ++c)
        {
            m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

json to_array(const VecX& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
    {
        out.push_back(v[i]);
    }
    return out;
}

json to_rows(const MatX& m)
{
    json out = json::array();
    for (Index r = 0; r < m.rows(); ++r)
    {
        out.push_back(to_array(m.row(r).transpose()));
    }
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
    {
        throw InvalidInput("scenario: " + where + " must be a JSON object");
    }
    for (const auto& item : j.items())
    {
        if (allowed.count(item.key()) == 0)
        {
            throw InvalidInput("scenario: unknown key '" + item.key() + "' in " + where);
        }
    }
}

void apply_scp(const json& j, ScpConfig& c)
{
    reject_unknown(j,
                   {"n_iter", "n_sol", "delta_x0", "delta_u0", "kappa_plus", "kappa_minus", "epsilon_max",
                    "delta_convergence", "time_limit_s", "beta", "card_epsilon", "linearization_tol", "truth_tol",
                    "workers"},
                   "'scp'");
    auto get = [&](const char* key, auto& target) {
        if (j.contains(key))
        {
            target = j.at(key).get<std::decay_t<decltype(target)>>();
        }
    };
    get("n_iter", c.n_iter);
    get("n_sol", c.n_sol);
    get("delta_x0", c.delta_x0);
    get("delta_u0", c.delta_u0);
    get("kappa_plus", c.kappa_plus);
    get("kappa_minus", c.kappa_minus);
    get("epsilon_max", c.epsilon_max);
    get("delta_convergence", c.delta_convergence);
    get("time_limit_s", c.time_limit);
    get("card_epsilon", c.card_epsilon);
    get("workers", c.workers);
    if (j.contains("beta"))
    {
        const VecX b = vecx_from(j.at("beta"), "beta");
        if (b.size() != 6)
        {
            throw InvalidInput("scenario: 'beta' needs six weights");
        }
        c.beta = b;
    }
    for (const auto& [key, target] : {std::pair<const char*, IntegratorSettings*>{"linearization_tol", &c.linearization},
                                      std::pair<const char*, IntegratorSettings*>{"truth_tol", &c.truth}})
    {
        if (j.contains(key))
        {
            const VecX tol = vecx_from(j.at(key), key);
            if (tol.size() != 2)
            {
                throw InvalidInput(std::string("scenario: '") + key + "' must be [rel_tol, abs_tol]");
            }
            target->rel_tol = tol[0];
            target->abs_tol = tol[1];
        }
    }
}

}  // namespace

Scenario scenario_from_json(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw InvalidInput(std::string("scenario: malformed JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"preset", "name", "t_final_s", "nodes", "comet_position_km", "comet_velocity_km_s",
                    "sun_direction", "boresight", "theta_vmax_deg", "theta_imax_deg", "theta_sun_deg", "q0",
                    "omega0_rad_s", "h0_Nms", "inertia_kg_m2", "distribution", "tau_max_Nm", "h_max_Nms",
                    "omega_max_deg_s", "tightening", "fault", "applied_fault", "scp"},
                   "the scenario document");
    try
    {
        if (j.contains("preset") && j.at("preset").get<std::string>() != kPreset)
        {
            throw InvalidInput("scenario: unknown base preset '" + j.at("preset").get<std::string>() + "'");
        }
        Assembly a = benchmark_assembly();
        if (j.contains("inertia_kg_m2"))
        {
            const MatX m = matrix_from(j.at("inertia_kg_m2"), "inertia_kg_m2");
            if (m.rows() != 3 || m.cols() != 3)
            {
                throw InvalidInput("scenario: 'inertia_kg_m2' must be 3 x 3");
            }
            a.inertia = m;
        }
        if (j.contains("distribution"))
        {
            a.distribution = matrix_from(j.at("distribution"), "distribution");
            a.tau_max = VecX::Constant(a.distribution.cols(), a.tau_max[0]);
            a.h_max = VecX::Constant(a.distribution.cols(), a.h_max[0]);
        }
        if (j.contains("tau_max_Nm"))
        {
            a.tau_max = vecx_from(j.at("tau_max_Nm"), "tau_max_Nm");
        }
        if (j.contains("h_max_Nms"))
        {
            a.h_max = vecx_from(j.at("h_max_Nms"), "h_max_Nms");
        }
        if (j.contains("omega_max_deg_s"))
        {
            a.omega_max = vec3_from(j.at("omega_max_deg_s"), "omega_max_deg_s") * kDeg;
        }
        std::optional<Index> fault;
        if (j.contains("fault") && !j.at("fault").is_null())
        {
            fault = j.at("fault").get<Index>();
        }
        Scenario s = assemble(a, fault);
        set_benchmark_defaults(s);
        s.name = j.value("name", std::string(fault ? std::string(kPreset) + "-fault" + std::to_string(*fault) : kPreset));
        if (j.contains("applied_fault") && !j.at("applied_fault").is_null())
        {
            if (fault)
            {
                throw InvalidInput("scenario: 'fault' and 'applied_fault' are mutually exclusive");
            }
            s.fault = j.at("applied_fault").get<Index>();
        }
        s.t_final = j.value("t_final_s", s.t_final);
        s.nodes = j.value("nodes", s.nodes);
        if (j.contains("comet_position_km"))
        {
            s.comet_position_km = vec3_from(j.at("comet_position_km"), "comet_position_km");
        }
        if (j.contains("comet_velocity_km_s"))
        {
            s.comet_velocity_km_s = vec3_from(j.at("comet_velocity_km_s"), "comet_velocity_km_s");
        }
        if (j.contains("sun_direction"))
        {
            s.r_sun = vec3_from(j.at("sun_direction"), "sun_direction").normalized();
        }
        if (j.contains("boresight"))
        {
            s.v_body = vec3_from(j.at("boresight"), "boresight").normalized();
        }
        s.theta_vmax = j.value("theta_vmax_deg", s.theta_vmax / kDeg) * kDeg;
        s.theta_imax = j.value("theta_imax_deg", s.theta_imax / kDeg) * kDeg;
        s.theta_sun = j.value("theta_sun_deg", s.theta_sun / kDeg) * kDeg;
        if (j.contains("q0"))
        {
            const VecX q = vecx_from(j.at("q0"), "q0");
            if (q.size() != 4 || !(q.norm() > 0.0))
            {
                throw InvalidInput("scenario: 'q0' must be a non-zero 4-vector [v; s]");
            }
            // Already-unit input is kept verbatim so written files load back bit-identically.
            const bool unit = std::abs(q.norm() - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon();
            s.x_init.q = unit ? Quaternion(Vec4(q)) : Quaternion(Vec4(q)).normalized();
        }
        if (j.contains("omega0_rad_s"))
        {
            s.x_init.omega = vec3_from(j.at("omega0_rad_s"), "omega0_rad_s");
        }
        if (j.contains("h0_Nms"))
        {
            s.x_init.h_wheels = vecx_from(j.at("h0_Nms"), "h0_Nms");
        }
        s.tightening = j.value("tightening", s.tightening);
        if (j.contains("scp"))
        {
            apply_scp(j.at("scp"), s.scp);
        }
        s.validate();
        return s;
    }
    catch (const json::exception& e)
    {
        throw InvalidInput(std::string("scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& s)
{
    json j;
    j["name"] = s.name;
    j["t_final_s"] = s.t_final;
    j["nodes"] = s.nodes;
    j["comet_position_km"] = to_array(s.comet_position_km);
    j["comet_velocity_km_s"] = to_array(s.comet_velocity_km_s);
    j["sun_direction"] = to_array(s.r_sun);
    j["boresight"] = to_array(s.v_body);
    j["theta_vmax_deg"] = s.theta_vmax / kDeg;
    j["theta_imax_deg"] = s.theta_imax / kDeg;
    j["theta_sun_deg"] = s.theta_sun / kDeg;
    j["q0"] = to_array(s.x_init.q.coeffs());
    j["omega0_rad_s"] = to_array(s.x_init.omega);
    j["h0_Nms"] = to_array(s.x_init.h_wheels);
    j["inertia_kg_m2"] = to_rows(s.plant.inertia());
    j["distribution"] = to_rows(s.plant.distribution());
    j["tau_max_Nm"] = to_array(s.scaling.tau_max());
    j["h_max_Nms"] = to_array(s.scaling.h_max());
    j["omega_max_deg_s"] = to_array(s.scaling.omega_max() / kDeg);
    j["tightening"] = s.tightening;
    j["applied_fault"] = s.fault ? json(*s.fault) : json(nullptr);
    json scp;
    scp["n_iter"] = s.scp.n_iter;
    scp["n_sol"] = s.scp.n_sol;
    scp["delta_x0"] = s.scp.delta_x0;
    scp["delta_u0"] = s.scp.delta_u0;
    scp["kappa_plus"] = s.scp.kappa_plus;
    scp["kappa_minus"] = s.scp.kappa_minus;
    scp["epsilon_max"] = s.scp.epsilon_max;
    scp["delta_convergence"] = s.scp.delta_convergence;
    scp["time_limit_s"] = s.scp.time_limit;
    scp["beta"] = to_array(s.scp.beta);
    scp["card_epsilon"] = s.scp.card_epsilon;
    scp["linearization_tol"] = {s.scp.linearization.rel_tol, s.scp.linearization.abs_tol};
    scp["truth_tol"] = {s.scp.truth.rel_tol, s.scp.truth.abs_tol};
    scp["workers"] = s.scp.workers;
    j["scp"] = scp;
    return j.dump(2);
}

Scenario load_scenario(const std::string& preset_or_path)
{
    if (preset_or_path == kPreset)
    {
        return build_benchmark();
    }
    if (preset_or_path == std::string(kPreset) + "-fault4")
    {
        return build_benchmark(Index{4});
    }
    std::ifstream in(preset_or_path);
    if (!in)
    {
        throw InvalidInput("scenario: cannot open '" + preset_or_path + "' (not a file or preset)");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return scenario_from_json(text.str());
}

}  // namespace flyby
