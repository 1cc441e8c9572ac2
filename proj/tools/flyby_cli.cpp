#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "flyby/montecarlo.hpp"
#include "flyby/report.hpp"
#include "flyby/scp.hpp"

namespace fs = std::filesystem;
using namespace flyby;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNotConverged = 2;

constexpr const char* kOutEnv = "FLYBY_OUT_DIR";

struct SharedOptions
{
    std::string scenario = "comet-interceptor";
    std::string out;
    std::uint64_t seed = 1;
    std::optional<Index> fault;
    std::string log_level = "info";
};

void setup_logging(const std::string& level)
{
    auto logger = std::make_shared<spdlog::logger>("flyby", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e [%l] [%n] %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

Scenario resolve_scenario(const SharedOptions& opt)
{
    Scenario s = load_scenario(opt.scenario);
    if (opt.fault)
    {
        s = apply_fault(s, *opt.fault);
    }
    return s;
}

/// Comma-separated values, "zero", "near-saturation" (+0.9 h_max) or "random" (seeded draw from H).
VecX parse_h0(const std::string& text, const Scenario& s, std::uint64_t seed)
{
    const Index n = s.plant.wheel_count();
    if (text == "zero")
    {
        return VecX::Zero(n);
    }
    if (text == "near-saturation")
    {
        return 0.9 * s.scaling.h_max();
    }
    if (text == "random")
    {
        return MomentumSampler(s.scaling.h_max(), sub_seed(seed, 0)).draw();
    }
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
            {
                throw std::invalid_argument(item);
            }
        }
        catch (const std::exception&)
        {
            throw InvalidInput("--h0: cannot parse '" + item + "'");
        }
    }
    if (static_cast<Index>(values.size()) != n)
    {
        throw InvalidInput("--h0: expected " + std::to_string(n) + " values, one per active wheel");
    }
    return Eigen::Map<VecX>(values.data(), n);
}

void prepare_directory(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
    {
        throw std::runtime_error("cannot create output directory " + dir);
    }
}

std::string path_in(const std::string& dir, const char* name)
{
    return (fs::path(dir) / name).string();
}

int cmd_solve(const SharedOptions& opt, const std::string& h0_text)
{
    Scenario scenario = resolve_scenario(opt);
    if (!h0_text.empty())
    {
        scenario.x_init.h_wheels = parse_h0(h0_text, scenario, opt.seed);
        if ((scenario.x_init.h_wheels.cwiseAbs().array() > scenario.scaling.h_max().array()).any())
        {
            throw InvalidInput("--h0: wheel momentum exceeds h_max");
        }
    }
    scenario.validate();
    prepare_directory(opt.out);

    auto backend = make_default_backend();
    spdlog::info("solve: scenario '{}', {} wheels, backend {}", scenario.name, scenario.plant.wheel_count(),
                 backend->name());
    const GuidanceSolution sol = run_scp(scenario, *backend, [](const IterationRecord& r) {
        spdlog::debug("scp: iteration {} attempt {} eps {:.4g} {}", r.iteration, r.attempt, r.epsilon_x,
                      r.accepted ? "accepted" : "rejected");
    });

    write_text_file(path_in(opt.out, "trajectory.csv"), trajectory_csv(sol, scenario));
    write_text_file(path_in(opt.out, "iterations.csv"), iteration_csv(sol));
    write_text_file(path_in(opt.out, "scenario.json"), scenario_to_json(scenario) + "\n");
    write_solve_plots(sol, scenario, opt.out);

    nlohmann::ordered_json summary;
    summary["build"] = build_stamp();
    summary["backend"] = backend->name();
    summary["scenario"] = scenario.name;
    summary["termination"] = to_string(sol.termination);
    summary["iterations"] = sol.iterations;
    summary["accepted_steps"] = sol.accepted;
    summary["final_epsilon_x"] = sol.final_epsilon_x;
    summary["visual_outage_s"] = sol.outages.visual_outage;
    summary["infrared_outage_s"] = sol.outages.infrared_outage;
    summary["max_pointing_error_deg"] = sol.outages.max_pointing_error * 180.0 / M_PI;
    if (!sol.message.empty())
    {
        summary["message"] = sol.message;
    }
    write_text_file(path_in(opt.out, "solution.json"), summary.dump(2) + "\n");

    spdlog::info("solve: {} after {} iterations; outage visual {:.1f} s, infrared {:.1f} s; files in {}",
                 to_string(sol.termination), sol.iterations, sol.outages.visual_outage, sol.outages.infrared_outage,
                 opt.out);
    switch (sol.termination)
    {
    case Termination::Converged: return kExitOk;
    case Termination::Failed: return kExitFailure;
    default: return kExitNotConverged;
    }
}

int cmd_campaign(const SharedOptions& opt, std::size_t samples, std::size_t workers, bool no_timings)
{
    CampaignConfig cfg;
    cfg.sample_count = samples;
    cfg.workers = workers;
    cfg.seed = opt.seed;
    cfg.fault = opt.fault;
    cfg.record_timings = !no_timings;
    cfg.validate();
    const Scenario base = load_scenario(opt.scenario);
    if (base.fault)
    {
        throw InvalidInput("campaign: the scenario already has a failed wheel; use an intact scenario with --fault");
    }
    prepare_directory(opt.out);

    spdlog::info("campaign: {} samples, seed {}, fault {}, {} workers", samples, opt.seed,
                 opt.fault ? std::to_string(*opt.fault) : "none", workers);
    const CampaignResult result = run_campaign(cfg, base);
    write_text_file(path_in(opt.out, "runs.csv"), runs_csv(result.records));
    write_text_file(path_in(opt.out, "aggregates.json"), summary_json(result.summary));
    write_text_file(path_in(opt.out, "summary.json"), campaign_json(result));
    write_campaign_plots(result.records, result.summary, opt.out);
    spdlog::info("campaign: zero-outage fraction {:.3f}, median iterations {}, outputs in {}",
                 result.summary.zero_outage_fraction, result.summary.median_iterations, opt.out);
    return kExitOk;
}

int cmd_report(const std::string& in_dir, std::string out_dir)
{
    if (!fs::is_directory(in_dir))
    {
        throw InvalidInput("report: " + in_dir + " is not a directory");
    }
    const std::string csv_path = path_in(in_dir, "runs.csv");
    std::vector<RunRecord> records;
    try
    {
        records = parse_runs_csv(read_text_file(csv_path));
    }
    catch (const InvalidInput& e)
    {
        throw InvalidInput(csv_path + ": " + e.what());
    }
    const CampaignSummary summary = aggregate(records);
    if (out_dir.empty())
    {
        out_dir = path_in(in_dir, "report");
    }
    prepare_directory(out_dir);
    write_text_file(path_in(out_dir, "aggregates.json"), summary_json(summary));
    write_campaign_plots(records, summary, out_dir);
    spdlog::info("report: {} runs, zero-outage fraction {:.3f}, outputs in {}", summary.runs,
                 summary.zero_outage_fraction, out_dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Attitude guidance for a comet flyby: single solves and Monte Carlo campaigns."};
    app.require_subcommand(1);

    SharedOptions opt;
    const char* env_out = std::getenv(kOutEnv);
    opt.out = env_out && *env_out ? env_out : "flyby-out";

    auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", opt.scenario, "preset name or scenario JSON file")->capture_default_str();
        cmd->add_option("--out", opt.out, std::string("output directory (default from $") + kOutEnv + ")")
            ->capture_default_str();
        cmd->add_option("--seed", opt.seed, "master random seed")->capture_default_str();
        cmd->add_option("--fault", opt.fault, "failed wheel, numbered from 1")->check(CLI::PositiveNumber);
        cmd->add_option("--log-level", opt.log_level, "trace, debug, info, warn, error or off")
            ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}))
            ->capture_default_str();
    };

    std::string h0_text;
    CLI::App* solve = app.add_subcommand("solve", "Solve one guidance problem and write trajectory files");
    add_shared(solve);
    solve->add_option("--h0", h0_text,
                      "initial wheel momenta: comma-separated N m s, 'zero', 'near-saturation' or 'random'");

    std::size_t samples = 200;
    std::size_t workers = 1;
    bool no_timings = false;
    CLI::App* campaign = app.add_subcommand("campaign", "Run a Monte Carlo campaign over initial wheel momenta");
    add_shared(campaign);
    campaign->add_option("--samples", samples, "number of runs")->check(CLI::PositiveNumber)->capture_default_str();
    campaign->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    campaign->add_flag("--no-timings", no_timings, "write zero timings so outputs are byte-reproducible");

    std::string in_dir;
    std::string report_out;
    CLI::App* report = app.add_subcommand("report", "Rebuild aggregates and plots from a campaign directory");
    report->add_option("--in", in_dir, "campaign output directory")->required();
    report->add_option("--out", report_out, "output directory (default <in>/report)");
    report->add_option("--log-level", opt.log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kExitFailure;
    }

    setup_logging(opt.log_level);
    try
    {
        if (solve->parsed())
        {
            return cmd_solve(opt, h0_text);
        }
        if (campaign->parsed())
        {
            return cmd_campaign(opt, samples, workers, no_timings);
        }
        return cmd_report(in_dir, report_out);
    }
    catch (const std::exception& e)
    {
        spdlog::error("{}", e.what());
        return kExitFailure;
    }
}
