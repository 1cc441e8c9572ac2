#include "flyby/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

#include "flyby/parallel.hpp"
#include "flyby/scp.hpp"

#ifndef FLYBY_BUILD_STAMP
#define FLYBY_BUILD_STAMP "unknown"
#endif

namespace flyby
{

using json = nlohmann::ordered_json;

namespace
{

constexpr const char* kTailColumns[] = {"h0_norm",         "hbody_x",           "hbody_y",    "hbody_z",
                                        "visual_outage_s", "infrared_outage_s", "iterations", "termination",
                                        "lin_ms",          "opt_ms",            "int_ms"};
constexpr std::size_t kTailCount = std::size(kTailColumns);

double mean_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Linear interpolation between order statistics.
double percentile(std::vector<double> v, double level)
{
    std::sort(v.begin(), v.end());
    const double pos = level * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

RangeStat range_of(const std::vector<RunRecord>& records, double RunRecord::*field)
{
    RangeStat r{0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& rec : records)
    {
        r.mean += rec.*field;
        r.min = std::min(r.min, rec.*field);
        r.max = std::max(r.max, rec.*field);
    }
    r.mean /= static_cast<double>(records.size());
    return r;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep))
    {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep)
    {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_number(const std::string& cell, std::size_t line_no, const char* column)
{
    T value{};
    const char* first = cell.data();
    const char* last = first + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last)
    {
        throw InvalidInput(fmt::format("runs csv line {}: bad value '{}' in column {}", line_no, cell, column));
    }
    return value;
}

json range_json(const RangeStat& r)
{
    return json{{"mean", r.mean}, {"min", r.min}, {"max", r.max}};
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

void CampaignConfig::validate() const
{
    if (sample_count < 1)
    {
        throw InvalidInput("campaign: sample count must be at least 1");
    }
    if (workers < 1)
    {
        throw InvalidInput("campaign: worker count must be at least 1");
    }
    if (fault && *fault < 1)
    {
        throw InvalidInput("campaign: fault index is 1-based");
    }
}

const char* build_stamp()
{
    return FLYBY_BUILD_STAMP;
}

VecX campaign_h0(const CampaignConfig& config, const Scenario& scenario, std::size_t index)
{
    if (config.fixed_h0)
    {
        return *config.fixed_h0;
    }
    MomentumSampler sampler(scenario.scaling.h_max(), sub_seed(config.seed, index));
    return sampler.draw();
}

CampaignResult run_campaign(const CampaignConfig& config, const Scenario& base, const BackendFactory& make_backend)
{
    config.validate();
    if (base.fault)
    {
        throw InvalidInput("campaign: the base scenario must have all wheels; pass the fault in the config");
    }
    const Scenario prototype = config.fault ? apply_fault(base, *config.fault) : base;
    const MatX& distribution = base.plant.distribution();
    const Index wheels = base.plant.wheel_count();

    CampaignResult result;
    result.config = config;
    result.scenario_name = prototype.name;
    result.backend = make_backend()->name();
    result.records.resize(config.sample_count);

    parallel_for(config.sample_count, config.workers, [&](std::size_t i) {
        RunRecord& rec = result.records[i];
        rec.run_id = i;
        const VecX h_active = campaign_h0(config, prototype, i);
        rec.h0 = VecX::Zero(wheels);
        for (Index w = 0, c = 0; w < wheels; ++w)
        {
            if (!config.fault || w != *config.fault - 1)
            {
                rec.h0[w] = c < h_active.size() ? h_active[c] : 0.0;
                ++c;
            }
        }
        rec.h0_norm = rec.h0.norm();
        rec.h_body = distribution * rec.h0;
        try
        {
            Scenario scenario = prototype;
            scenario.x_init.h_wheels = h_active;
            scenario.validate();
            auto backend = make_backend();
            const GuidanceSolution sol = run_scp(scenario, *backend);
            rec.visual_outage = sol.outages.visual_outage;
            rec.infrared_outage = sol.outages.infrared_outage;
            rec.iterations = sol.iterations;
            rec.termination = to_string(sol.termination);
            rec.final_epsilon_x = sol.final_epsilon_x;
            rec.max_pointing_error_deg = sol.outages.max_pointing_error * 180.0 / M_PI;
            if (config.record_timings)
            {
                rec.lin_ms = mean_of(sol.timings.linearization_ms);
                rec.opt_ms = mean_of(sol.timings.optimization_ms);
                rec.int_ms = mean_of(sol.timings.integration_ms);
            }
        }
        catch (const std::exception& e)
        {
            spdlog::warn("campaign: run {} failed: {}", i, e.what());
            rec.visual_outage = prototype.t_final;
            rec.infrared_outage = prototype.t_final;
            rec.termination = "error";
        }
        spdlog::debug("campaign: run {} |h0| {:.3f} outage {:.1f}/{:.1f} s iterations {} {}", i, rec.h0_norm,
                      rec.visual_outage, rec.infrared_outage, rec.iterations, rec.termination);
    });

    // Aggregate what the CSV preserves so a later report reproduces it exactly.
    result.summary = aggregate(parse_runs_csv(runs_csv(result.records)));
    return result;
}

CampaignSummary aggregate(const std::vector<RunRecord>& records)
{
    if (records.empty())
    {
        throw InvalidInput("aggregate: no records");
    }
    CampaignSummary s;
    const std::size_t n = records.size();
    const double dn = static_cast<double>(n);
    s.runs = n;
    s.min_norm_with_outage = std::numeric_limits<double>::infinity();

    std::vector<double> visual, infrared, iterations;
    for (const auto& r : records)
    {
        visual.push_back(r.visual_outage);
        infrared.push_back(r.infrared_outage);
        iterations.push_back(r.iterations);
        const bool clean_v = r.visual_outage == 0.0;
        const bool clean_i = r.infrared_outage == 0.0;
        s.zero_visual_fraction += clean_v;
        s.zero_infrared_fraction += clean_i;
        s.zero_outage_fraction += clean_v && clean_i;
        if (!(clean_v && clean_i))
        {
            s.min_norm_with_outage = std::min(s.min_norm_with_outage, r.h0_norm);
        }
        s.fraction_below_15 += r.iterations < 15;
        s.fraction_above_25 += r.iterations > 25;
        ++s.terminations[r.termination];
    }
    s.zero_visual_fraction /= dn;
    s.zero_infrared_fraction /= dn;
    s.zero_outage_fraction /= dn;
    s.fraction_below_15 /= dn;
    s.fraction_above_25 /= dn;
    s.mean_visual_outage = mean_of(visual);
    s.mean_infrared_outage = mean_of(infrared);
    s.max_visual_outage = *std::max_element(visual.begin(), visual.end());
    s.median_iterations = percentile(iterations, 0.5);

    s.percentile_levels = {0.5, 0.75, 0.9, 0.95, 0.99};
    for (const double level : s.percentile_levels)
    {
        s.visual_outage_percentiles.push_back(percentile(visual, level));
    }

    const double top = std::max(s.max_visual_outage, *std::max_element(infrared.begin(), infrared.end()));
    const int edges = static_cast<int>(std::ceil(top / 10.0));
    for (int e = 0; e <= edges; ++e)
    {
        const double edge = 10.0 * e;
        s.outage_edges.push_back(edge);
        s.visual_outage_cdf.push_back(std::count_if(visual.begin(), visual.end(), [&](double v) { return v <= edge; }));
        s.infrared_outage_cdf.push_back(
            std::count_if(infrared.begin(), infrared.end(), [&](double v) { return v <= edge; }));
    }

    const int max_iter = static_cast<int>(*std::max_element(iterations.begin(), iterations.end()));
    for (int i = 1; i <= max_iter; ++i)
    {
        s.iteration_cdf.push_back(
            std::count_if(iterations.begin(), iterations.end(), [&](double v) { return v <= i; }));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].h0_norm < records[b].h0_norm; });
    const std::size_t groups = std::min<std::size_t>(10, n);
    for (std::size_t g = 0; g < groups; ++g)
    {
        const std::size_t lo = g * n / groups, hi = (g + 1) * n / groups;
        double norm = 0.0, vis = 0.0, ir = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
        {
            norm += records[order[i]].h0_norm;
            vis += records[order[i]].visual_outage;
            ir += records[order[i]].infrared_outage;
        }
        const double count = static_cast<double>(hi - lo);
        s.decile_h0_norm.push_back(norm / count);
        s.decile_visual_outage.push_back(vis / count);
        s.decile_infrared_outage.push_back(ir / count);
    }

    s.lin_ms = range_of(records, &RunRecord::lin_ms);
    s.opt_ms = range_of(records, &RunRecord::opt_ms);
    s.int_ms = range_of(records, &RunRecord::int_ms);
    return s;
}

std::string runs_csv(const std::vector<RunRecord>& records)
{
    const Index wheels = records.empty() ? 4 : records.front().h0.size();
    std::string out = "run_id";
    for (Index w = 1; w <= wheels; ++w)
    {
        out += fmt::format(",h0_{}", w);
    }
    for (const char* col : kTailColumns)
    {
        out += ',';
        out += col;
    }
    out += '\n';
    for (const auto& r : records)
    {
        if (r.h0.size() != wheels)
        {
            throw InvalidInput("runs_csv: records disagree on the wheel count");
        }
        out += std::to_string(r.run_id);
        for (Index w = 0; w < wheels; ++w)
        {
            out += fmt::format(",{:.9f}", r.h0[w]);
        }
        out += fmt::format(",{:.9f},{:.9f},{:.9f},{:.9f},{:.6f},{:.6f},{},{},{:.3f},{:.3f},{:.3f}\n", r.h0_norm,
                           r.h_body.x(), r.h_body.y(), r.h_body.z(), r.visual_outage, r.infrared_outage,
                           r.iterations, r.termination, r.lin_ms, r.opt_ms, r.int_ms);
    }
    return out;
}

std::vector<RunRecord> parse_runs_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
    {
        throw InvalidInput("runs csv: empty file");
    }
    const std::vector<std::string> header = split(line, ',');
    if (header.size() < 2 + kTailCount || header.front() != "run_id")
    {
        throw InvalidInput("runs csv: unexpected header '" + line + "'");
    }
    const std::size_t wheels = header.size() - 1 - kTailCount;
    for (std::size_t w = 0; w < wheels; ++w)
    {
        if (header[1 + w] != "h0_" + std::to_string(w + 1))
        {
            throw InvalidInput("runs csv: unexpected header '" + line + "'");
        }
    }
    for (std::size_t t = 0; t < kTailCount; ++t)
    {
        if (header[1 + wheels + t] != kTailColumns[t])
        {
            throw InvalidInput("runs csv: unexpected header '" + line + "'");
        }
    }

    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    bool ended_with_newline = text.empty() || text.back() == '\n';
    while (std::getline(in, line))
    {
        ++line_no;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != header.size())
        {
            throw InvalidInput(fmt::format("runs csv line {}: expected {} fields, found {}", line_no, header.size(),
                                           cells.size()));
        }
        RunRecord r;
        std::size_t c = 0;
        r.run_id = parse_number<std::size_t>(cells[c++], line_no, "run_id");
        r.h0.resize(static_cast<Index>(wheels));
        for (std::size_t w = 0; w < wheels; ++w)
        {
            r.h0[static_cast<Index>(w)] = parse_number<double>(cells[c++], line_no, "h0");
        }
        r.h0_norm = parse_number<double>(cells[c++], line_no, "h0_norm");
        for (int a = 0; a < 3; ++a)
        {
            r.h_body[a] = parse_number<double>(cells[c++], line_no, "hbody");
        }
        r.visual_outage = parse_number<double>(cells[c++], line_no, "visual_outage_s");
        r.infrared_outage = parse_number<double>(cells[c++], line_no, "infrared_outage_s");
        r.iterations = parse_number<int>(cells[c++], line_no, "iterations");
        r.termination = cells[c++];
        if (r.termination.empty())
        {
            throw InvalidInput(fmt::format("runs csv line {}: empty termination", line_no));
        }
        r.lin_ms = parse_number<double>(cells[c++], line_no, "lin_ms");
        r.opt_ms = parse_number<double>(cells[c++], line_no, "opt_ms");
        r.int_ms = parse_number<double>(cells[c++], line_no, "int_ms");
        if (r.run_id != records.size())
        {
            throw InvalidInput(fmt::format("runs csv line {}: run ids must count up from 0", line_no));
        }
        records.push_back(std::move(r));
    }
    if (!ended_with_newline)
    {
        throw InvalidInput(fmt::format("runs csv line {}: truncated (no final newline)", line_no));
    }
    if (records.empty())
    {
        throw InvalidInput("runs csv: no data rows");
    }
    return records;
}

std::string summary_json(const CampaignSummary& s)
{
    json j;
    j["runs"] = s.runs;
    j["zero_outage_fraction"] = s.zero_outage_fraction;
    j["zero_visual_outage_fraction"] = s.zero_visual_fraction;
    j["zero_infrared_outage_fraction"] = s.zero_infrared_fraction;
    j["mean_visual_outage_s"] = s.mean_visual_outage;
    j["mean_infrared_outage_s"] = s.mean_infrared_outage;
    j["max_visual_outage_s"] = s.max_visual_outage;
    j["min_h0_norm_with_outage_Nms"] = number_or_null(s.min_norm_with_outage);
    json pct = json::object();
    for (std::size_t i = 0; i < s.percentile_levels.size(); ++i)
    {
        pct[fmt::format("p{}", static_cast<int>(std::lround(100.0 * s.percentile_levels[i])))] =
            s.visual_outage_percentiles[i];
    }
    j["visual_outage_percentiles_s"] = pct;
    j["outage_cdf"] = {{"edges_s", s.outage_edges},
                       {"visual", s.visual_outage_cdf},
                       {"infrared", s.infrared_outage_cdf}};
    j["iteration_cdf"] = s.iteration_cdf;
    j["median_iterations"] = s.median_iterations;
    j["fraction_below_15_iterations"] = s.fraction_below_15;
    j["fraction_above_25_iterations"] = s.fraction_above_25;
    j["h0_norm_deciles"] = {{"mean_h0_norm_Nms", s.decile_h0_norm},
                            {"mean_visual_outage_s", s.decile_visual_outage},
                            {"mean_infrared_outage_s", s.decile_infrared_outage}};
    j["terminations"] = s.terminations;
    j["timing_ms"] = {{"linearization", range_json(s.lin_ms)},
                      {"optimization", range_json(s.opt_ms)},
                      {"integration", range_json(s.int_ms)}};
    return j.dump(2) + "\n";
}

std::string campaign_json(const CampaignResult& r)
{
    json j;
    j["build"] = build_stamp();
    j["backend"] = r.backend;
    j["scenario"] = r.scenario_name;
    json cfg;
    cfg["samples"] = r.config.sample_count;
    cfg["seed"] = r.config.seed;
    cfg["fault"] = r.config.fault ? json(*r.config.fault) : json(nullptr);
    cfg["workers"] = r.config.workers;
    cfg["record_timings"] = r.config.record_timings;
    if (r.config.fixed_h0)
    {
        cfg["fixed_h0_Nms"] = std::vector<double>(r.config.fixed_h0->data(),
                                                  r.config.fixed_h0->data() + r.config.fixed_h0->size());
    }
    j["config"] = cfg;
    j["aggregates"] = json::parse(summary_json(r.summary));
    return j.dump(2) + "\n";
}

}  // namespace flyby
