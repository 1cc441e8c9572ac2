#include "flyby/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "flyby/svg.hpp"

namespace flyby
{

namespace
{

constexpr double kRadToDeg = 180.0 / M_PI;

/// Assembly number (1-based) of active wheel i.
Index wheel_label(const Scenario& scenario, Index i)
{
    return scenario.fault && i + 1 >= *scenario.fault ? i + 2 : i + 1;
}

std::string cell(double v)
{
    return std::isfinite(v) ? fmt::format("{:.9g}", v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
}

std::string join(const std::string& dir, const char* name)
{
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
    {
        throw std::runtime_error("cannot write " + path);
    }
    f << text;
    if (!f)
    {
        throw std::runtime_error("failed writing " + path);
    }
}

std::string read_text_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
    {
        throw InvalidInput("cannot read " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string trajectory_csv(const GuidanceSolution& solution, const Scenario& scenario)
{
    const Trajectory& traj = solution.trajectory;
    const Index nw = scenario.plant.wheel_count();
    const MatX& L = scenario.plant.distribution();
    std::string out = "t,q1,q2,q3,q4,wx,wy,wz";
    for (Index i = 0; i < nw; ++i)
    {
        out += fmt::format(",h{}", wheel_label(scenario, i));
    }
    for (Index i = 0; i < nw; ++i)
    {
        out += fmt::format(",tau{}", wheel_label(scenario, i));
    }
    out += ",tau_x,tau_y,tau_z,h_x,h_y,h_z,comet_angle_deg,gamma,zeta\n";
    const std::vector<double> angles = comet_angles(traj, scenario);
    for (std::size_t k = 0; k < traj.size(); ++k)
    {
        const SpacecraftState& s = traj.states[k];
        const VecX& tau = traj.controls[k].tau;
        out += cell(traj.times[k]);
        for (Index i = 0; i < 4; ++i)
        {
            out += ',' + cell(s.q.coeffs()[i]);
        }
        for (Index i = 0; i < 3; ++i)
        {
            out += ',' + cell(s.omega[i]);
        }
        for (Index i = 0; i < nw; ++i)
        {
            out += ',' + cell(s.h_wheels[i]);
        }
        for (Index i = 0; i < nw; ++i)
        {
            out += ',' + cell(tau[i]);
        }
        const Vec3 tau_body = L * tau;
        const Vec3 h_body = L * s.h_wheels;
        for (Index i = 0; i < 3; ++i)
        {
            out += ',' + cell(tau_body[i]);
        }
        for (Index i = 0; i < 3; ++i)
        {
            out += ',' + cell(h_body[i]);
        }
        const auto kk = static_cast<Index>(k);
        const double gamma = kk < solution.gamma.size() ? solution.gamma[kk] : 0.0;
        const double zeta = kk < solution.zeta.size() ? solution.zeta[kk] : 0.0;
        out += ',' + cell(angles[k] * kRadToDeg) + ',' + cell(gamma) + ',' + cell(zeta) + '\n';
    }
    return out;
}

std::string iteration_csv(const GuidanceSolution& solution)
{
    std::string out = "iteration,attempt,delta_x,delta_u,status,epsilon_x,objective,convergence_sum,accepted,"
                      "lin_ms,opt_ms,int_ms,max_comet_angle_deg\n";
    for (const auto& r : solution.history)
    {
        double max_angle = NAN;
        for (const double a : r.comet_angles_deg)
        {
            max_angle = std::isnan(max_angle) ? a : std::max(max_angle, a);
        }
        out += fmt::format("{},{},{},{},{},{},{},{},{},{:.3f},{:.3f},{:.3f},{}\n", r.iteration, r.attempt,
                           cell(r.radii.delta_x), cell(r.radii.delta_u), to_string(r.status), cell(r.epsilon_x),
                           cell(r.objective), cell(r.convergence_sum), r.accepted ? 1 : 0, r.lin_ms, r.opt_ms,
                           r.int_ms, r.comet_angles_deg.empty() ? std::string() : cell(max_angle));
    }
    return out;
}

std::vector<std::string> write_solve_plots(const GuidanceSolution& solution,
                                           const Scenario& scenario,
                                           const std::string& directory)
{
    const Trajectory& traj = solution.trajectory;
    const MatX& L = scenario.plant.distribution();
    std::vector<double> angles = comet_angles(traj, scenario);
    for (double& a : angles)
    {
        a *= kRadToDeg;
    }
    std::vector<std::string> paths;

    SvgPlot angle("Comet pointing angle", "time [s]", "angle [deg]");
    angle.add_line("boresight to comet", traj.times, angles);
    angle.add_hline(scenario.theta_vmax * kRadToDeg, "visual FOV", "#2ca02c");
    angle.add_hline(scenario.theta_imax * kRadToDeg, "infrared FOV", "#ff7f0e");
    paths.push_back(join(directory, "angle.svg"));
    angle.save(paths.back());

    SvgPlot torque("Body-frame wheel torque L tau", "time [s]", "torque [N m]");
    SvgPlot momentum("Body-frame wheel momentum L h", "time [s]", "momentum [N m s]");
    const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a)
    {
        std::vector<double> tau, h;
        for (std::size_t k = 0; k < traj.size(); ++k)
        {
            tau.push_back((L * traj.controls[k].tau)[a]);
            h.push_back((L * traj.states[k].h_wheels)[a]);
        }
        torque.add_line(axes[a], traj.times, tau);
        momentum.add_line(axes[a], traj.times, h);
    }
    paths.push_back(join(directory, "torque.svg"));
    torque.save(paths.back());
    paths.push_back(join(directory, "momentum.svg"));
    momentum.save(paths.back());

    SvgPlot iterations("Comet angle per accepted iteration", "time [s]", "angle [deg]");
    for (const auto& r : solution.history)
    {
        if (r.accepted && r.comet_angles_deg.size() == traj.size())
        {
            iterations.add_line(fmt::format("iteration {}", r.iteration), traj.times, r.comet_angles_deg,
                                r.iteration == solution.history.back().iteration ? "#000000" : "#9ecae1");
        }
    }
    iterations.add_hline(scenario.theta_imax * kRadToDeg, "infrared FOV", "#ff7f0e");
    paths.push_back(join(directory, "iterations.svg"));
    iterations.save(paths.back());
    return paths;
}

std::vector<std::string> write_campaign_plots(const std::vector<RunRecord>& records,
                                              const CampaignSummary& summary,
                                              const std::string& directory)
{
    std::vector<std::string> paths;
    std::vector<double> norm, visual, infrared;
    std::vector<double> clean_x, clean_y, hit_x, hit_y;
    for (const auto& r : records)
    {
        norm.push_back(r.h0_norm);
        visual.push_back(r.visual_outage);
        infrared.push_back(r.infrared_outage);
        const bool clean = r.visual_outage == 0.0 && r.infrared_outage == 0.0;
        (clean ? clean_x : hit_x).push_back(r.h_body.x());
        (clean ? clean_y : hit_y).push_back(r.h_body.y());
    }

    SvgPlot scatter("Science outage vs initial wheel momentum", "|h(0)| [N m s]", "outage [s]");
    scatter.add_scatter("visual", norm, visual);
    scatter.add_scatter("infrared", norm, infrared);
    paths.push_back(join(directory, "outage_vs_h0.svg"));
    scatter.save(paths.back());

    const double n = static_cast<double>(summary.runs);
    std::vector<double> vis_cdf, ir_cdf;
    for (std::size_t i = 0; i < summary.outage_edges.size(); ++i)
    {
        vis_cdf.push_back(100.0 * static_cast<double>(summary.visual_outage_cdf[i]) / n);
        ir_cdf.push_back(100.0 * static_cast<double>(summary.infrared_outage_cdf[i]) / n);
    }
    SvgPlot outage("Cumulative outage distribution", "outage [s]", "runs [%]");
    outage.add_line("visual", summary.outage_edges, vis_cdf);
    outage.add_line("infrared", summary.outage_edges, ir_cdf);
    outage.set_y_range(0.0, 100.0);
    paths.push_back(join(directory, "outage_cdf.svg"));
    outage.save(paths.back());

    std::vector<double> iters, iter_cdf;
    for (std::size_t i = 0; i < summary.iteration_cdf.size(); ++i)
    {
        iters.push_back(static_cast<double>(i + 1));
        iter_cdf.push_back(100.0 * static_cast<double>(summary.iteration_cdf[i]) / n);
    }
    SvgPlot iteration("Cumulative iteration count", "iterations", "runs [%]");
    iteration.add_line("converged within", iters, iter_cdf);
    iteration.set_y_range(0.0, 100.0);
    paths.push_back(join(directory, "iteration_cdf.svg"));
    iteration.save(paths.back());

    SvgPlot body("Initial body-frame wheel momentum", "h_x [N m s]", "h_y [N m s]");
    body.add_scatter("no outage", clean_x, clean_y, "#2ca02c");
    body.add_scatter("outage", hit_x, hit_y, "#d62728");
    paths.push_back(join(directory, "hbody.svg"));
    body.save(paths.back());
    return paths;
}

}  // namespace flyby
