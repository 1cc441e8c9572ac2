#pragma once

#include <string>
#include <vector>

#include "flyby/montecarlo.hpp"
#include "flyby/scp.hpp"

namespace flyby
{

/// Node table in physical units, wheels named by their assembly index.
std::string trajectory_csv(const GuidanceSolution& solution, const Scenario& scenario);

/// One row per convex solve.
std::string iteration_csv(const GuidanceSolution& solution);

/// angle.svg, torque.svg, momentum.svg, iterations.svg; returns the paths written.
std::vector<std::string> write_solve_plots(const GuidanceSolution& solution,
                                           const Scenario& scenario,
                                           const std::string& directory);

/// outage_vs_h0.svg, outage_cdf.svg, iteration_cdf.svg, hbody.svg; returns the paths written.
std::vector<std::string> write_campaign_plots(const std::vector<RunRecord>& records,
                                              const CampaignSummary& summary,
                                              const std::string& directory);

/// Writes `text` to `path` in binary mode; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

/// Whole file as a string; throws InvalidInput naming the file when it cannot be read.
std::string read_text_file(const std::string& path);

}  // namespace flyby
