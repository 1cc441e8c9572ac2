#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "flyby/attitude.hpp"
#include "flyby/discretization.hpp"
#include "flyby/linearization.hpp"
#include "flyby/pointing.hpp"

namespace flyby
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Cone product R₊^{nonneg} × Q^{soc[0]} × … × Q^{soc[m-1]}, in that order.
struct ConeLayout
{
    Index nonneg = 0;
    std::vector<Index> soc;

    Index rows() const;
    Index degree() const { return nonneg + static_cast<Index>(soc.size()); }
};

/**
 * min cᵀx  subject to  A x = b,  h − G x ∈ K.
 */
struct ConicProblem
{
    VecX c;
    SparseMatrix A;
    VecX b;
    SparseMatrix G;
    VecX h;
    ConeLayout cones;

    Index variables() const { return c.size(); }
    /// Throws InvalidInput when the block dimensions disagree.
    void validate() const;
};

/// Per-node slice offsets of the stacked decision vector
/// x_s,k = [x_k; u_k; γ_k; ζ_k; η_k; ρ_k; δ_x,k; δ_u,k].
class VariableLayout
{
public:
    VariableLayout(Index nodes, Index wheel_count);

    Index nodes() const { return nodes_; }
    Index wheel_count() const { return nw_; }
    Index state_size() const { return nx_; }
    Index node_stride() const { return nx_ + nw_ + 6; }
    Index size() const { return nodes_ * node_stride(); }

    Index x(Index k) const { return k * node_stride(); }
    Index q(Index k) const { return x(k); }
    Index omega(Index k) const { return x(k) + 4; }
    Index h(Index k) const { return x(k) + 7; }
    Index u(Index k) const { return x(k) + nx_; }
    Index gamma(Index k) const { return u(k) + nw_; }
    Index zeta(Index k) const { return gamma(k) + 1; }
    Index eta(Index k) const { return gamma(k) + 2; }
    Index rho(Index k) const { return gamma(k) + 3; }
    Index delta_x(Index k) const { return gamma(k) + 4; }
    Index delta_u(Index k) const { return gamma(k) + 5; }

private:
    Index nodes_;
    Index nw_;
    Index nx_;
};

/// Everything the static part of the transcription needs, already in
/// scaled units and with constraint tightening applied.
struct TranscriptionData
{
    Index nodes = 0;
    Index wheel_count = 0;
    std::vector<ConeFactor> sun;       ///< keep-out factor per node
    std::vector<ConeFactor> visual;    ///< keep-in factor per node (visual limit)
    std::vector<ConeFactor> infrared;  ///< keep-in factor per node (infrared limit)
    double torque_bound = 1.0;         ///< |u| ≤ bound (scaled)
    double momentum_bound = 1.0;       ///< |W_h h| ≤ bound
    double rate_bound = 1.0;           ///< |W_ω ω| ≤ bound
    VecX x_init;                       ///< scaled initial state
};

/// Objective weights on (visual card, infrared card, LOS, energy, δx, δu).
using ObjectiveWeights = Eigen::Matrix<double, 6, 1>;

/**
 * Transcribed convex subproblem plus the bookkeeping needed to refresh its
 * reference-dependent values in place between iterations.
 */
class Transcription
{
public:
    Transcription(const TranscriptionData& data, const VariableLayout& layout);

    const ConicProblem& problem() const { return problem_; }
    const VariableLayout& layout() const { return layout_; }

    /// Writes A_k, B_k± into A, s_k into b, x̄_k/ū_k into the deviation
    /// cones, and the reweighted objective into c.
    void update_linearization(const DiscreteLTV& discrete,
                              const ScaledTrajectory& reference,
                              const CardinalityWeights& weights,
                              const ObjectiveWeights& beta);

    /// Writes the trust-region caps into h.
    void update_trust_region(double delta_x_max, double delta_u_max);

    /// Row offsets of the named blocks inside G / h (block-major, node-minor).
    struct Rows
    {
        Index slack_nonneg = 0;  // 2 per node
        Index box = 0;           // 4 n_w + 6 per node
        Index trust = 0;         // 2 per node
        Index sun = 0;           // 5 per node
        Index los = 0;
        Index visual = 0;
        Index infrared = 0;
        Index energy = 0;        // n_w + 1 per node
        Index u_dev = 0;         // n_w + 1 per node
        Index x_dev = 0;         // n_x + 1 per node
    };
    const Rows& rows() const { return rows_; }

private:
    VariableLayout layout_;
    ConicProblem problem_;
    Rows rows_;
    // valuePtr() offsets of A_k, B_k⁻, B_k⁺ entries, one column-major block per interval.
    std::vector<std::vector<int>> a_index_;
    std::vector<std::vector<int>> bm_index_;
    std::vector<std::vector<int>> bp_index_;
};

/// Convenience wrapper with the combined update of Algorithm-style loops.
void update_dynamic(Transcription& transcription,
                    const DiscreteLTV& discrete,
                    const ScaledTrajectory& reference,
                    const CardinalityWeights& weights,
                    double delta_x_max,
                    double delta_u_max,
                    const ObjectiveWeights& beta);

struct ResidualReport
{
    double equality = 0.0;        ///< max |A x − b|
    double nonneg = 0.0;          ///< max violation of the linear block
    double soc = 0.0;             ///< max (‖b‖ − t)₊ over second-order cones
    Index worst_soc = -1;         ///< index into cones.soc of the worst cone
    double objective = 0.0;

    double max_violation() const;
};

ResidualReport verify_solution(const ConicProblem& problem, const VecX& primal);

/// Plain-text serialisation (dimensions, cone layout, vectors, triplets).
void write_problem(std::ostream& out, const ConicProblem& problem);
ConicProblem read_problem(std::istream& in);

}  // namespace flyby
