#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flyby/scenario.hpp"
#include "flyby/solver.hpp"

namespace flyby
{

enum class Termination
{
    Converged,
    IterationLimit,
    RejectionLimit,
    TimeLimit,
    Failed  ///< discretisation broke down; the last reference is returned
};

const char* to_string(Termination termination);

/// Σ_k ‖x_k⋆ − x_k‖₂ over nodes (scaled units).
double feasibility_metric(const std::vector<VecX>& x_convex, const std::vector<VecX>& x_true);

struct TrustRadii
{
    double delta_x = 0.1;
    double delta_u = 0.1;
};

/// Accept iff ε_x ≤ ε_max; radii grow by κ⁺ on acceptance and shrink by κ⁻ otherwise.
std::pair<TrustRadii, bool> trust_region_update(double epsilon_x, const TrustRadii& radii, const ScpConfig& config);

/// One inner solve of the loop.
struct IterationRecord
{
    int iteration = 0;  ///< outer index, from 1
    int attempt = 0;    ///< inner index, from 1
    TrustRadii radii;   ///< radii used for this solve
    SolveStatus status = SolveStatus::Failed;
    double epsilon_x = 0.0;  ///< +inf when no usable primal was returned
    double objective = 0.0;
    double convergence_sum = 0.0;  ///< Σ (δ_u,k + δ_x,k)
    bool accepted = false;
    double lin_ms = 0.0;  ///< discretisation time of the outer iteration (first attempt only)
    double opt_ms = 0.0;
    double int_ms = 0.0;
    std::vector<double> comet_angles_deg;  ///< truth trajectory, accepted attempts only
};

struct StepTimings
{
    std::vector<double> linearization_ms;
    std::vector<double> optimization_ms;
    std::vector<double> integration_ms;
};

struct GuidanceSolution
{
    Trajectory trajectory;  ///< truth-propagated reference and FOH controls, physical units
    ScaledTrajectory scaled;
    VecX gamma, zeta, eta, rho;  ///< slacks of the last accepted solve
    OutageMetrics outages;
    Termination termination = Termination::Failed;
    int iterations = 0;  ///< outer iterations started
    int accepted = 0;
    double final_epsilon_x = 0.0;
    std::vector<IterationRecord> history;
    StepTimings timings;
    std::string message;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Runs the sequential convex loop starting from a null-control reference.
GuidanceSolution run_scp(const Scenario& scenario,
                         SolverBackend& backend,
                         const IterationObserver& observer = nullptr);

/// Null-control reference: zero torques, truth-propagated states (scaled).
ScaledTrajectory null_control_reference(const Scenario& scenario);

}  // namespace flyby
