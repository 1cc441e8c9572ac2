#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flyby/scenario.hpp"
#include "flyby/solver.hpp"

namespace flyby
{

/// Randomised campaign over initial wheel momenta.
struct CampaignConfig
{
    std::size_t sample_count = 200;
    std::optional<Index> fault;  ///< 1-based wheel removed from every run
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::optional<VecX> fixed_h0;  ///< replaces sampling; one entry per active wheel
    bool record_timings = true;    ///< false writes zeros so outputs are byte-stable

    void validate() const;
};

/// Outcome of one run. Only the persisted fields survive a CSV round trip.
struct RunRecord
{
    std::size_t run_id = 0;
    VecX h0;  ///< per assembly wheel, N·m·s; zero for a removed wheel
    double h0_norm = 0.0;
    Vec3 h_body = Vec3::Zero();  ///< L h0, N·m·s
    double visual_outage = 0.0;    ///< s
    double infrared_outage = 0.0;  ///< s
    int iterations = 0;
    std::string termination;
    double lin_ms = 0.0;  ///< mean per discretisation
    double opt_ms = 0.0;  ///< mean per convex solve
    double int_ms = 0.0;  ///< mean per truth propagation

    double final_epsilon_x = 0.0;
    double max_pointing_error_deg = 0.0;
};

struct RangeStat
{
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Statistics recomputable from persisted records alone.
struct CampaignSummary
{
    std::size_t runs = 0;
    double zero_outage_fraction = 0.0;  ///< no visual and no infrared outage
    double zero_visual_fraction = 0.0;
    double zero_infrared_fraction = 0.0;
    double mean_visual_outage = 0.0;
    double mean_infrared_outage = 0.0;
    double max_visual_outage = 0.0;
    /// Smallest ‖h0‖ among runs with any outage; +inf when every run is clean.
    double min_norm_with_outage = 0.0;

    std::vector<double> percentile_levels;  ///< in [0, 1]
    std::vector<double> visual_outage_percentiles;

    std::vector<double> outage_edges;  ///< s
    std::vector<std::size_t> visual_outage_cdf;  ///< runs with outage ≤ edge
    std::vector<std::size_t> infrared_outage_cdf;

    std::vector<std::size_t> iteration_cdf;  ///< entry i: runs needing ≤ i + 1 iterations
    double median_iterations = 0.0;
    double fraction_below_15 = 0.0;  ///< strictly fewer than 15 iterations
    double fraction_above_25 = 0.0;

    /// Runs sorted by ‖h0‖ and split into (up to) ten equal groups.
    std::vector<double> decile_h0_norm;
    std::vector<double> decile_visual_outage;
    std::vector<double> decile_infrared_outage;

    std::map<std::string, std::size_t> terminations;
    RangeStat lin_ms, opt_ms, int_ms;
};

struct CampaignResult
{
    CampaignConfig config;
    std::string scenario_name;
    std::string backend;
    std::vector<RunRecord> records;  ///< indexed by run_id
    CampaignSummary summary;
};

using BackendFactory = std::function<std::unique_ptr<SolverBackend>()>;

/// h0 of run `index`, one entry per active wheel of `scenario`.
VecX campaign_h0(const CampaignConfig& config, const Scenario& scenario, std::size_t index);

/**
 * Runs the campaign on an intact base scenario. The fault, if any, is applied
 * per run. Results depend only on the config, the scenario and the backend;
 * the worker count changes nothing but wall time. A run that throws is
 * recorded with termination "error" and full outage.
 */
CampaignResult run_campaign(const CampaignConfig& config,
                            const Scenario& base,
                            const BackendFactory& make_backend = make_default_backend);

/// Throws InvalidInput on an empty record set.
CampaignSummary aggregate(const std::vector<RunRecord>& records);

/// Per-run CSV, header included.
std::string runs_csv(const std::vector<RunRecord>& records);
/// Strict inverse of runs_csv; throws InvalidInput naming the offending line.
std::vector<RunRecord> parse_runs_csv(const std::string& text);

/// Aggregates only, deterministic formatting.
std::string summary_json(const CampaignSummary& summary);
/// Aggregates plus config echo, scenario, backend and build stamp.
std::string campaign_json(const CampaignResult& result);

/// Version string fixed at configure time.
const char* build_stamp();

}  // namespace flyby
