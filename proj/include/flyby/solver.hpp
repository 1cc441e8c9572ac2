#pragma once

#include <memory>
#include <string>

#include "flyby/conic.hpp"

namespace flyby
{

enum class SolveStatus
{
    Optimal,
    Inaccurate,  ///< stopped early; residuals only meet the reduced tolerances
    Infeasible,  ///< primal infeasibility certificate found
    Unbounded,   ///< dual infeasibility certificate found
    Timeout,
    Failed       ///< numerical breakdown without a usable iterate
};

const char* to_string(SolveStatus status);

struct SolveResult
{
    SolveStatus status = SolveStatus::Failed;
    VecX primal;
    VecX dual_eq;    ///< y
    VecX dual_cone;  ///< z
    double objective = 0.0;
    double solve_time = 0.0;  ///< seconds
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
};

/// Any conic backend the SCP loop can drive.
class SolverBackend
{
public:
    virtual ~SolverBackend() = default;

    /// `warm_start` is a hint; backends may ignore it.
    virtual SolveResult solve(const ConicProblem& problem, const VecX* warm_start = nullptr) = 0;
    virtual std::string name() const = 0;
};

struct IpmSettings
{
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol_inaccurate = 1e-5;
    double abstol_inaccurate = 5e-5;
    double reltol_inaccurate = 5e-5;
    int max_iterations = 100;
    double time_limit = 0.0;        ///< seconds; 0 disables
    double static_regularization = 1e-8;
    int refinement_steps = 8;
    int equilibration_passes = 3;
    double step_fraction = 0.99;
    double step_max = 0.999;
};

/**
 * Primal-dual interior-point method on the homogeneous self-dual embedding,
 * with Nesterov-Todd scaling and a Mehrotra predictor-corrector.
 */
class InteriorPointSolver final : public SolverBackend
{
public:
    explicit InteriorPointSolver(IpmSettings settings = {});

    SolveResult solve(const ConicProblem& problem, const VecX* warm_start = nullptr) override;
    std::string name() const override { return "flyby-ipm"; }

    const IpmSettings& settings() const { return settings_; }

private:
    IpmSettings settings_;
};

std::unique_ptr<SolverBackend> make_default_backend();

}  // namespace flyby
