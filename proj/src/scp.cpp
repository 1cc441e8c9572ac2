#include "flyby/scp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "flyby/discretization.hpp"

namespace flyby
{

const char* to_string(Termination termination)
{
    switch (termination)
    {
    case Termination::Converged: return "converged";
    case Termination::IterationLimit: return "iter-limit";
    case Termination::RejectionLimit: return "rejection-limit";
    case Termination::TimeLimit: return "time-limit";
    case Termination::Failed: return "failed";
    }
    return "unknown";
}

double feasibility_metric(const std::vector<VecX>& x_convex, const std::vector<VecX>& x_true)
{
    if (x_convex.size() != x_true.size())
    {
        throw InvalidInput("feasibility_metric: node counts differ");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < x_convex.size(); ++k)
    {
        sum += (x_true[k] - x_convex[k]).norm();
    }
    return sum;
}

std::pair<TrustRadii, bool> trust_region_update(double epsilon_x, const TrustRadii& radii, const ScpConfig& config)
{
    if (!(radii.delta_x > 0.0) || !(radii.delta_u > 0.0))
    {
        throw InvalidInput("trust_region_update: radii must be positive");
    }
    const bool accept = epsilon_x <= config.epsilon_max;
    const double factor = accept ? config.kappa_plus : config.kappa_minus;
    return {{radii.delta_x * factor, radii.delta_u * factor}, accept};
}

ScaledTrajectory null_control_reference(const Scenario& scenario)
{
    ScaledTrajectory ref;
    ref.times = scenario.times();
    const Index nw = scenario.plant.wheel_count();
    ref.controls.assign(ref.times.size(), VecX::Zero(nw));
    ref.states = propagate_nodes(scale_state(scenario.x_init, scenario.scaling), ref.times, ref.controls,
                                 scenario.plant, scenario.scaling, scenario.scp.truth);
    return ref;
}

namespace
{

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

VecX slice_scalar(const VecX& primal, const VariableLayout& layout, Index (VariableLayout::*offset)(Index) const)
{
    VecX out(layout.nodes());
    for (Index k = 0; k < layout.nodes(); ++k)
    {
        out[k] = primal[(layout.*offset)(k)];
    }
    return out;
}

void finalize(GuidanceSolution& sol, const ScaledTrajectory& reference, const Scenario& scenario)
{
    sol.scaled = reference;
    sol.trajectory = to_physical(reference, scenario.scaling);
    sol.outages = evaluate_outages(sol.trajectory, scenario);
}

}  // namespace

GuidanceSolution run_scp(const Scenario& scenario, SolverBackend& backend, const IterationObserver& observer)
{
    scenario.validate();
    const ScpConfig& cfg = scenario.scp;
    const auto start = Clock::now();
    auto out_of_time = [&]() {
        return cfg.time_limit > 0.0 && std::chrono::duration<double>(Clock::now() - start).count() > cfg.time_limit;
    };

    const Index N = scenario.nodes;
    const Index nw = scenario.plant.wheel_count();
    const Index nx = state_dim(nw);
    const VariableLayout layout(N, nw);
    Transcription transcription(make_transcription_data(scenario), layout);

    GuidanceSolution sol;
    ScaledTrajectory reference = null_control_reference(scenario);
    CardinalityWeights weights = CardinalityWeights::initial(N);
    weights.epsilon = cfg.card_epsilon;
    sol.gamma = weights.gamma_prev;
    sol.zeta = weights.zeta_prev;
    sol.eta = VecX::Zero(N);
    sol.rho = VecX::Zero(N);
    TrustRadii radii{cfg.delta_x0, cfg.delta_u0};
    const VecX x_init = scale_state(scenario.x_init, scenario.scaling);
    VecX warm;

    auto finish = [&](Termination reason, std::string message = {}) {
        sol.termination = reason;
        sol.message = std::move(message);
        finalize(sol, reference, scenario);
        return sol;
    };

    for (int i = 1; i <= cfg.n_iter; ++i)
    {
        sol.iterations = i;
        const auto t_lin = Clock::now();
        DiscreteLTV discrete;
        try
        {
            discrete = discretize_trajectory(reference, scenario.plant, scenario.scaling, cfg.linearization, cfg.workers);
        }
        catch (const std::exception& e)
        {
            spdlog::warn("scp: discretisation failed: {}", e.what());
            return finish(Termination::Failed, e.what());
        }
        const double lin_ms = ms_since(t_lin);
        sol.timings.linearization_ms.push_back(lin_ms);
        transcription.update_linearization(discrete, reference, weights, cfg.beta);

        bool accepted = false;
        double convergence_sum = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= cfg.n_sol; ++j)
        {
            IterationRecord rec;
            rec.iteration = i;
            rec.attempt = j;
            rec.radii = radii;
            rec.lin_ms = j == 1 ? lin_ms : 0.0;
            transcription.update_trust_region(radii.delta_x, radii.delta_u);

            const auto t_opt = Clock::now();
            const SolveResult res = backend.solve(transcription.problem(), warm.size() ? &warm : nullptr);
            rec.opt_ms = ms_since(t_opt);
            sol.timings.optimization_ms.push_back(rec.opt_ms);
            rec.status = res.status;
            rec.objective = res.objective;

            bool usable = res.status == SolveStatus::Optimal;
            if (res.status == SolveStatus::Inaccurate)
            {
                usable = verify_solution(transcription.problem(), res.primal).max_violation() <= 1e-5;
            }

            rec.epsilon_x = std::numeric_limits<double>::infinity();
            ScaledTrajectory candidate;
            if (usable)
            {
                candidate.times = reference.times;
                std::vector<VecX> x_convex;
                for (Index k = 0; k < N; ++k)
                {
                    x_convex.push_back(res.primal.segment(layout.x(k), nx));
                    candidate.controls.push_back(res.primal.segment(layout.u(k), nw));
                }
                const auto t_int = Clock::now();
                try
                {
                    candidate.states = propagate_nodes(x_init, candidate.times, candidate.controls, scenario.plant,
                                                       scenario.scaling, cfg.truth);
                    rec.epsilon_x = feasibility_metric(x_convex, candidate.states);
                }
                catch (const std::exception& e)
                {
                    spdlog::debug("scp: truth propagation failed: {}", e.what());
                }
                rec.int_ms = ms_since(t_int);
                sol.timings.integration_ms.push_back(rec.int_ms);
                warm = res.primal;
                rec.convergence_sum = slice_scalar(res.primal, layout, &VariableLayout::delta_x).sum() +
                                      slice_scalar(res.primal, layout, &VariableLayout::delta_u).sum();
            }

            const auto [next, accept] = trust_region_update(rec.epsilon_x, radii, cfg);
            radii = next;
            rec.accepted = accept;
            if (accept)
            {
                reference = std::move(candidate);
                weights.gamma_prev = slice_scalar(res.primal, layout, &VariableLayout::gamma).cwiseMax(0.0);
                weights.zeta_prev = slice_scalar(res.primal, layout, &VariableLayout::zeta).cwiseMax(0.0);
                sol.gamma = weights.gamma_prev;
                sol.zeta = weights.zeta_prev;
                sol.eta = slice_scalar(res.primal, layout, &VariableLayout::eta);
                sol.rho = slice_scalar(res.primal, layout, &VariableLayout::rho);
                sol.final_epsilon_x = rec.epsilon_x;
                ++sol.accepted;
                convergence_sum = rec.convergence_sum;
                const Trajectory phys = to_physical(reference, scenario.scaling);
                for (const double a : comet_angles(phys, scenario))
                {
                    rec.comet_angles_deg.push_back(a * 180.0 / M_PI);
                }
            }
            spdlog::debug("scp: iter {} try {} status {} eps {:.4g} obj {:.6g} radii ({:.3g}, {:.3g}) {}",
                          i, j, to_string(rec.status), rec.epsilon_x, rec.objective, rec.radii.delta_x,
                          rec.radii.delta_u, accept ? "accept" : "reject");
            if (observer)
            {
                observer(rec);
            }
            sol.history.push_back(std::move(rec));
            if (accepted = accept; accepted)
            {
                break;
            }
            if (out_of_time())
            {
                return finish(Termination::TimeLimit);
            }
            if (j == cfg.n_sol)
            {
                return finish(Termination::RejectionLimit);
            }
        }

        if (convergence_sum <= cfg.delta_convergence)
        {
            return finish(Termination::Converged);
        }
        if (out_of_time())
        {
            return finish(Termination::TimeLimit);
        }
    }
    return finish(Termination::IterationLimit);
}

}  // namespace flyby
