#include "flyby/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/OrderingMethods>
#include <spdlog/spdlog.h>

namespace flyby
{

const char* to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Inaccurate: return "inaccurate";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Failed: return "failed";
    }
    return "unknown";
}

namespace
{

using Triplet = Eigen::Triplet<double, int>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VecX& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct Cones
{
    Index l = 0;
    std::vector<Index> dims;
    std::vector<Index> offsets;  // absolute row offset of each SOC
    Index m = 0;
    Index degree = 0;

    explicit Cones(const ConeLayout& layout) : l(layout.nonneg), dims(layout.soc)
    {
        Index off = l;
        for (const Index d : dims)
        {
            offsets.push_back(off);
            off += d;
        }
        m = off;
        degree = l + static_cast<Index>(dims.size());
    }
};

void add_identity(const Cones& k, VecX& v, double scale)
{
    v.head(k.l).array() += scale;
    for (const Index o : k.offsets)
    {
        v[o] += scale;
    }
}

/// Moves v into the interior of the cone if it is not already there.
void shift_into_cone(const Cones& k, VecX& v)
{
    double alpha = -kInf;
    for (Index i = 0; i < k.l; ++i)
    {
        alpha = std::max(alpha, -v[i]);
    }
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index d = k.dims[j];
        alpha = std::max(alpha, v.segment(o + 1, d - 1).norm() - v[o]);
    }
    if (alpha >= 0.0)
    {
        add_identity(k, v, 1.0 + alpha);
    }
}

void jordan_product(const Cones& k, const VecX& u, const VecX& v, VecX& out)
{
    out.resize(k.m);
    out.head(k.l) = u.head(k.l).cwiseProduct(v.head(k.l));
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index d = k.dims[j];
        out[o] = u.segment(o, d).dot(v.segment(o, d));
        out.segment(o + 1, d - 1) = u[o] * v.segment(o + 1, d - 1) + v[o] * u.segment(o + 1, d - 1);
    }
}

/// Solves λ ∘ out = d.
void jordan_divide(const Cones& k, const VecX& lambda, const VecX& d, VecX& out)
{
    out.resize(k.m);
    out.head(k.l) = d.head(k.l).cwiseQuotient(lambda.head(k.l));
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index n = k.dims[j];
        const double l0 = lambda[o];
        const auto l1 = lambda.segment(o + 1, n - 1);
        const double rho = l0 * l0 - l1.squaredNorm();
        const double u0 = (l0 * d[o] - l1.dot(d.segment(o + 1, n - 1))) / rho;
        out[o] = u0;
        out.segment(o + 1, n - 1) = (d.segment(o + 1, n - 1) - u0 * l1) / l0;
    }
}

struct NtScaling
{
    VecX w;  // nonneg part: sqrt(s/z)
    std::vector<double> eta;
    std::vector<VecX> wbar;
    VecX lambda;
};

bool compute_scaling(const Cones& k, const VecX& s, const VecX& z, NtScaling& out)
{
    out.w.resize(k.l);
    out.lambda.resize(k.m);
    for (Index i = 0; i < k.l; ++i)
    {
        if (!(s[i] > 0.0) || !(z[i] > 0.0))
        {
            return false;
        }
        out.w[i] = std::sqrt(s[i] / z[i]);
        out.lambda[i] = std::sqrt(s[i] * z[i]);
    }
    out.eta.resize(k.dims.size());
    out.wbar.resize(k.dims.size());
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index d = k.dims[j];
        const auto sj = s.segment(o, d);
        const auto zj = z.segment(o, d);
        const double s_res = sj[0] * sj[0] - sj.tail(d - 1).squaredNorm();
        const double z_res = zj[0] * zj[0] - zj.tail(d - 1).squaredNorm();
        if (!(s_res > 0.0) || !(z_res > 0.0) || !(sj[0] > 0.0) || !(zj[0] > 0.0))
        {
            return false;
        }
        const double s_norm = std::sqrt(s_res);
        const double z_norm = std::sqrt(z_res);
        const VecX s_bar = sj / s_norm;
        const VecX z_bar = zj / z_norm;
        const double gamma = std::sqrt(0.5 * (1.0 + s_bar.dot(z_bar)));
        VecX& wb = out.wbar[j];
        wb.resize(d);
        wb[0] = (s_bar[0] + z_bar[0]) / (2.0 * gamma);
        wb.tail(d - 1) = (s_bar.tail(d - 1) - z_bar.tail(d - 1)) / (2.0 * gamma);
        out.eta[j] = std::sqrt(s_norm / z_norm);
    }
    return true;
}

void apply_W(const Cones& k, const NtScaling& w, const VecX& v, VecX& out, bool inverse)
{
    out.resize(k.m);
    if (inverse)
    {
        out.head(k.l) = v.head(k.l).cwiseQuotient(w.w);
    }
    else
    {
        out.head(k.l) = v.head(k.l).cwiseProduct(w.w);
    }
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index d = k.dims[j];
        const VecX& wb = w.wbar[j];
        const auto w1 = wb.tail(d - 1);
        const auto v1 = v.segment(o + 1, d - 1);
        const double w1v1 = w1.dot(v1);
        const double sign = inverse ? -1.0 : 1.0;
        const double scale = inverse ? 1.0 / w.eta[j] : w.eta[j];
        out[o] = scale * (wb[0] * v[o] + sign * w1v1);
        out.segment(o + 1, d - 1) = scale * (v1 + (sign * v[o] + w1v1 / (1.0 + wb[0])) * w1);
    }
}

/// Largest α with λ + α d in the cone (λ interior).
double max_step(const Cones& k, const VecX& lambda, const VecX& d)
{
    double alpha = kInf;
    for (Index i = 0; i < k.l; ++i)
    {
        if (d[i] < 0.0)
        {
            alpha = std::min(alpha, -lambda[i] / d[i]);
        }
    }
    for (std::size_t j = 0; j < k.dims.size(); ++j)
    {
        const Index o = k.offsets[j];
        const Index n = k.dims[j];
        const auto l = lambda.segment(o, n);
        const auto dj = d.segment(o, n);
        const double lk2 = l[0] * l[0] - l.tail(n - 1).squaredNorm();
        if (!(lk2 > 0.0))
        {
            return 0.0;
        }
        const double lk = std::sqrt(lk2);
        const VecX lbar = l / lk;
        const double ljd = lbar[0] * dj[0] - lbar.tail(n - 1).dot(dj.tail(n - 1));
        const double rho0 = ljd / lk;
        const double factor = (ljd + dj[0]) / (lbar[0] + 1.0);
        const double rho1 = ((dj.tail(n - 1) - factor * lbar.tail(n - 1)) / lk).norm();
        const double denom = rho1 - rho0;
        if (denom > 0.0)
        {
            alpha = std::min(alpha, 1.0 / denom);
        }
    }
    return alpha;
}

/// Ruiz-style equilibration; x = D x̃, y = E ỹ, z = F z̃, s = s̃ / F.
struct Equilibration
{
    VecX D, E, F;
};

Equilibration equilibrate(SparseMatrix& A, SparseMatrix& G, const Cones& k, int passes)
{
    const Index n = A.cols();
    Equilibration eq{VecX::Ones(n), VecX::Ones(A.rows()), VecX::Ones(G.rows())};
    auto clamp_scale = [](double norm) { return 1.0 / std::sqrt(std::clamp(norm, 1e-4, 1e4)); };
    for (int pass = 0; pass < passes; ++pass)
    {
        VecX col = VecX::Zero(n);
        VecX row_a = VecX::Zero(A.rows());
        VecX row_g = VecX::Zero(G.rows());
        for (Index j = 0; j < n; ++j)
        {
            for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            {
                const double a = std::abs(it.value());
                col[j] = std::max(col[j], a);
                row_a[it.row()] = std::max(row_a[it.row()], a);
            }
            for (SparseMatrix::InnerIterator it(G, j); it; ++it)
            {
                const double a = std::abs(it.value());
                col[j] = std::max(col[j], a);
                row_g[it.row()] = std::max(row_g[it.row()], a);
            }
        }
        for (std::size_t j = 0; j < k.dims.size(); ++j)
        {
            auto block = row_g.segment(k.offsets[j], k.dims[j]);
            block.setConstant(block.maxCoeff());
        }
        const VecX d = col.unaryExpr(clamp_scale);
        const VecX e = row_a.unaryExpr(clamp_scale);
        const VecX f = row_g.unaryExpr(clamp_scale);
        for (Index j = 0; j < n; ++j)
        {
            for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            {
                it.valueRef() *= e[it.row()] * d[j];
            }
            for (SparseMatrix::InnerIterator it(G, j); it; ++it)
            {
                it.valueRef() *= f[it.row()] * d[j];
            }
        }
        eq.D.array() *= d.array();
        eq.E.array() *= e.array();
        eq.F.array() *= f.array();
    }
    return eq;
}

/// Regularised quasi-definite KKT matrix [[δI, Aᵀ, Gᵀ], [A, −δI, 0], [G, 0, −W²−δI]].
class KktSystem
{
public:
    KktSystem(const SparseMatrix& A, const SparseMatrix& G, const Cones& k, double delta)
        : cones_(k), n_(A.cols()), p_(A.rows()), m_(G.rows())
    {
        const Index dim = n_ + p_ + m_;
        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(dim + A.nonZeros() + G.nonZeros() + 12 * m_));
        for (Index j = 0; j < n_; ++j)
        {
            trip.emplace_back(j, j, delta);
        }
        for (Index j = 0; j < n_; ++j)
        {
            for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            {
                trip.emplace_back(n_ + it.row(), j, it.value());
            }
            for (SparseMatrix::InnerIterator it(G, j); it; ++it)
            {
                trip.emplace_back(n_ + p_ + it.row(), j, it.value());
            }
        }
        for (Index i = 0; i < p_; ++i)
        {
            trip.emplace_back(n_ + i, n_ + i, -delta);
        }
        const Index z0 = n_ + p_;
        for (Index i = 0; i < k.l; ++i)
        {
            trip.emplace_back(z0 + i, z0 + i, -1.0);
        }
        for (std::size_t j = 0; j < k.dims.size(); ++j)
        {
            const Index o = z0 + k.offsets[j];
            for (Index c = 0; c < k.dims[j]; ++c)
            {
                for (Index r = c; r < k.dims[j]; ++r)
                {
                    trip.emplace_back(o + r, o + c, r == c ? -1.0 : 0.0);
                }
            }
        }
        K_.resize(dim, dim);
        K_.setFromTriplets(trip.begin(), trip.end());
        K_.makeCompressed();

        reg_ = VecX::Constant(dim, -delta);
        reg_.head(n_).setConstant(delta);
        delta_ = delta;

        nonneg_index_.resize(static_cast<std::size_t>(k.l));
        for (Index i = 0; i < k.l; ++i)
        {
            nonneg_index_[static_cast<std::size_t>(i)] = offset(z0 + i, z0 + i);
        }
        soc_index_.resize(k.dims.size());
        for (std::size_t j = 0; j < k.dims.size(); ++j)
        {
            const Index o = z0 + k.offsets[j];
            for (Index c = 0; c < k.dims[j]; ++c)
            {
                for (Index r = c; r < k.dims[j]; ++r)
                {
                    soc_index_[j].push_back(offset(o + r, o + c));
                }
            }
        }
        ldlt_.analyzePattern(K_);
    }

    void set_identity_scaling()
    {
        double* v = K_.valuePtr();
        for (const int idx : nonneg_index_)
        {
            v[idx] = -1.0 - delta_;
        }
        for (std::size_t j = 0; j < soc_index_.size(); ++j)
        {
            const Index d = cones_.dims[j];
            std::size_t e = 0;
            for (Index c = 0; c < d; ++c)
            {
                for (Index r = c; r < d; ++r, ++e)
                {
                    v[soc_index_[j][e]] = r == c ? -1.0 - delta_ : 0.0;
                }
            }
        }
    }

    void set_scaling(const NtScaling& w)
    {
        double* v = K_.valuePtr();
        for (std::size_t i = 0; i < nonneg_index_.size(); ++i)
        {
            const double wi = w.w[static_cast<Index>(i)];
            v[nonneg_index_[i]] = -wi * wi - delta_;
        }
        for (std::size_t j = 0; j < soc_index_.size(); ++j)
        {
            // W² = η² (2 w̄ w̄ᵀ − J)
            const Index d = cones_.dims[j];
            const VecX& wb = w.wbar[j];
            const double eta2 = w.eta[j] * w.eta[j];
            std::size_t e = 0;
            for (Index c = 0; c < d; ++c)
            {
                for (Index r = c; r < d; ++r, ++e)
                {
                    double entry = 2.0 * wb[r] * wb[c];
                    if (r == c)
                    {
                        entry += c == 0 ? -1.0 : 1.0;
                    }
                    v[soc_index_[j][e]] = -eta2 * entry - (r == c ? delta_ : 0.0);
                }
            }
        }
    }

    bool factor()
    {
        ldlt_.factorize(K_);
        return ldlt_.info() == Eigen::Success;
    }

    /// Solves the unregularised system by refinement on the regularised factor.
    /// Keeps the best correction seen; refinement can diverge on nearly singular systems.
    VecX solve(const VecX& rhs, int refinement_steps) const
    {
        VecX sol = ldlt_.solve(rhs);
        const double scale = 1.0 + inf_norm(rhs);
        VecX err = rhs - multiply_true(sol);
        double best = inf_norm(err);
        for (int it = 0; it < refinement_steps && best > 1e-14 * scale; ++it)
        {
            const VecX candidate = sol + ldlt_.solve(err);
            const VecX cand_err = rhs - multiply_true(candidate);
            const double e = inf_norm(cand_err);
            if (!(e < best))
            {
                break;
            }
            sol = candidate;
            err = cand_err;
            best = e;
        }
        last_error_ = best / scale;
        return sol;
    }

    double last_error() const { return last_error_; }

private:
    int offset(Index row, Index col) const
    {
        const int* outer = K_.outerIndexPtr();
        const int* inner = K_.innerIndexPtr();
        const int* begin = inner + outer[col];
        const int* end = inner + outer[col + 1];
        const int* it = std::lower_bound(begin, end, static_cast<int>(row));
        return static_cast<int>(it - inner);
    }

    VecX multiply_true(const VecX& v) const
    {
        VecX out = K_.selfadjointView<Eigen::Lower>() * v;
        out -= reg_.cwiseProduct(v);
        return out;
    }

    mutable double last_error_ = 0.0;
    const Cones& cones_;
    Index n_, p_, m_;
    SparseMatrix K_;
    VecX reg_;
    double delta_ = 0.0;
    std::vector<int> nonneg_index_;
    std::vector<std::vector<int>> soc_index_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

struct Metrics
{
    double pres = kInf;
    double dres = kInf;
    double gap = kInf;
    double relgap = kInf;
    double pcost = 0.0;
    double dcost = 0.0;
    double pinf = kInf;  // primal infeasibility certificate residual
    double dinf = kInf;  // dual infeasibility certificate residual
};

}  // namespace

namespace
{
constexpr int kStallIterations = 5;
}

InteriorPointSolver::InteriorPointSolver(IpmSettings settings) : settings_(settings) {}

SolveResult InteriorPointSolver::solve(const ConicProblem& problem, const VecX* /*warm_start*/)
{
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    problem.validate();

    const Cones k(problem.cones);
    const Index n = problem.variables();
    const Index p = problem.A.rows();
    const Index m = problem.G.rows();

    SparseMatrix A = problem.A;
    SparseMatrix G = problem.G;
    const Equilibration eq = equilibrate(A, G, k, settings_.equilibration_passes);
    const VecX c = eq.D.cwiseProduct(problem.c);
    const VecX b = eq.E.cwiseProduct(problem.b);
    const VecX h = eq.F.cwiseProduct(problem.h);
    const SparseMatrix At = A.transpose();
    const SparseMatrix Gt = G.transpose();

    const double norm_b = std::max(1.0, inf_norm(problem.b));
    const double norm_h = std::max(1.0, inf_norm(problem.h));
    const double norm_c = std::max(1.0, inf_norm(problem.c));

    SolveResult result;
    auto elapsed = [&]() { return std::chrono::duration<double>(Clock::now() - start).count(); };

    KktSystem kkt(A, G, k, settings_.static_regularization);
    kkt.set_identity_scaling();
    if (!kkt.factor())
    {
        result.status = SolveStatus::Failed;
        result.solve_time = elapsed();
        return result;
    }

    const Index dim = n + p + m;
    VecX rhs = VecX::Zero(dim);
    rhs.segment(n, p) = b;
    rhs.tail(m) = h;
    VecX sol = kkt.solve(rhs, settings_.refinement_steps);
    VecX x = sol.head(n);
    VecX s = -sol.tail(m);
    shift_into_cone(k, s);

    rhs.setZero();
    rhs.head(n) = -c;
    sol = kkt.solve(rhs, settings_.refinement_steps);
    VecX y = sol.segment(n, p);
    VecX z = sol.tail(m);
    shift_into_cone(k, z);
    double tau = 1.0;
    double kappa = 1.0;

    VecX rhs1(dim);
    rhs1.head(n) = -c;
    rhs1.segment(n, p) = b;
    rhs1.tail(m) = h;

    NtScaling w;
    VecX tmp, tmp2, ds, lambda_sq;
    Metrics met;

    auto evaluate = [&]() {
        const VecX hrx = At * y + Gt * z;
        const VecX ax = A * x;
        const VecX gxs = G * x + s;
        Metrics out;
        out.pcost = c.dot(x) / tau;
        const double by_hz = b.dot(y) + h.dot(z);
        out.dcost = -by_hz / tau;
        out.gap = s.dot(z) / (tau * tau);
        out.pres = std::max(inf_norm((ax - tau * b).cwiseQuotient(eq.E)) / (tau * norm_b),
                            inf_norm((gxs - tau * h).cwiseQuotient(eq.F)) / (tau * norm_h));
        out.dres = inf_norm((hrx + tau * c).cwiseQuotient(eq.D)) / (tau * norm_c);
        if (out.pcost < 0.0)
        {
            out.relgap = out.gap / -out.pcost;
        }
        else if (out.dcost > 0.0)
        {
            out.relgap = out.gap / out.dcost;
        }
        if (by_hz < 0.0)
        {
            out.pinf = inf_norm(hrx.cwiseQuotient(eq.D)) / -by_hz;
        }
        const double cx = c.dot(x);
        if (cx < 0.0)
        {
            out.dinf = std::max(inf_norm(ax.cwiseQuotient(eq.E)), inf_norm(gxs.cwiseQuotient(eq.F))) / -cx;
        }
        return out;
    };

    auto finish = [&](SolveStatus status, int iterations) {
        result.status = status;
        result.iterations = iterations;
        result.solve_time = elapsed();
        result.primal_residual = met.pres;
        result.dual_residual = met.dres;
        result.gap = met.gap;
        const bool certificate = status == SolveStatus::Infeasible || status == SolveStatus::Unbounded;
        const double scale = certificate ? 1.0 : 1.0 / tau;
        result.primal = eq.D.cwiseProduct(x) * scale;
        result.dual_eq = eq.E.cwiseProduct(y) * scale;
        result.dual_cone = eq.F.cwiseProduct(z) * scale;
        result.objective = problem.c.dot(result.primal);
        return result;
    };

    auto meets = [&](double feastol, double abstol, double reltol) {
        return met.pres < feastol && met.dres < feastol && (met.gap < abstol || met.relgap < reltol);
    };

    const double dkappa_scale = 1.0 / static_cast<double>(k.degree + 1);

    // Best iterate by the worst of the three termination measures. Near the optimum
    // the KKT system becomes ill conditioned and progress can stall short of the
    // tight tolerances; the loop then stops early and reports the best point.
    struct Snapshot
    {
        VecX x, y, z, s;
        double tau = 1.0, kappa = 1.0;
        Metrics met;
        double merit = std::numeric_limits<double>::infinity();
    } best;
    auto merit_of = [](const Metrics& mt) { return std::max({mt.pres, mt.dres, std::min(mt.gap, mt.relgap)}); };
    int stalled = 0;
    auto restore_best = [&]() {
        if (best.x.size() && !(merit_of(met) <= best.merit))
        {
            x = best.x;
            y = best.y;
            z = best.z;
            s = best.s;
            tau = best.tau;
            kappa = best.kappa;
            met = best.met;
        }
    };

    int iteration = 0;
    for (;; ++iteration)
    {
        met = evaluate();
        spdlog::trace("ipm {:3d} pcost {:.9e} dcost {:.9e} gap {:.2e} pres {:.2e} dres {:.2e} tau {:.2e} kap {:.2e}",
                      iteration, met.pcost, met.dcost, met.gap, met.pres, met.dres, tau, kappa);
        if (meets(settings_.feastol, settings_.abstol, settings_.reltol))
        {
            return finish(SolveStatus::Optimal, iteration);
        }
        if (tau < kappa && met.pinf < settings_.feastol)
        {
            return finish(SolveStatus::Infeasible, iteration);
        }
        if (tau < kappa && met.dinf < settings_.feastol)
        {
            return finish(SolveStatus::Unbounded, iteration);
        }
        if (settings_.time_limit > 0.0 && elapsed() > settings_.time_limit)
        {
            return finish(SolveStatus::Timeout, iteration);
        }
        if (iteration >= settings_.max_iterations)
        {
            break;
        }
        const double merit = merit_of(met);
        if (merit < 0.5 * best.merit)
        {
            stalled = 0;
        }
        else if (++stalled >= kStallIterations &&
                 meets(settings_.feastol_inaccurate, settings_.abstol_inaccurate, settings_.reltol_inaccurate))
        {
            break;
        }
        if (merit < best.merit)
        {
            best = {x, y, z, s, tau, kappa, met, merit};
        }

        if (!compute_scaling(k, s, z, w))
        {
            break;
        }
        apply_W(k, w, z, w.lambda, false);
        kkt.set_scaling(w);
        if (!kkt.factor())
        {
            break;
        }
        const VecX u1 = kkt.solve(rhs1, settings_.refinement_steps);
        const double cbh1 = c.dot(u1.head(n)) + b.dot(u1.segment(n, p)) + h.dot(u1.tail(m));

        const VecX r1 = At * y + Gt * z + tau * c;
        const VecX r2 = -(A * x) + tau * b;
        const VecX r3 = -(G * x) + tau * h - s;
        const double r4 = -c.dot(x) - b.dot(y) - h.dot(z) - kappa;

        jordan_product(k, w.lambda, w.lambda, lambda_sq);

        struct Direction
        {
            VecX u;
            VecX dz, ds;
            double dtau = 0.0, dkappa = 0.0;
        };
        auto direction = [&](double eta_res, const VecX& dsv, double dk) {
            Direction out;
            VecX r(dim);
            jordan_divide(k, w.lambda, dsv, tmp);  // λ\ds
            apply_W(k, w, tmp, tmp2, false);       // W(λ\ds)
            r.head(n) = -eta_res * r1;
            r.segment(n, p) = eta_res * r2;
            r.tail(m) = eta_res * r3 - tmp2;
            const VecX u0 = kkt.solve(r, settings_.refinement_steps);
            const double cbh0 = c.dot(u0.head(n)) + b.dot(u0.segment(n, p)) + h.dot(u0.tail(m));
            out.dtau = (-eta_res * r4 + cbh0 + dk / tau) / (kappa / tau - cbh1);
            out.u = u0 + out.dtau * u1;
            out.dz = out.u.tail(m);
            VecX wdz;
            apply_W(k, w, out.dz, wdz, false);
            VecX inner = tmp - wdz;  // W⁻¹Δs
            apply_W(k, w, inner, out.ds, false);
            out.dkappa = (dk - kappa * out.dtau) / tau;
            return out;
        };
        auto step_length = [&](const Direction& d) {
            VecX scaled_s, scaled_z;
            apply_W(k, w, d.ds, scaled_s, true);
            apply_W(k, w, d.dz, scaled_z, false);
            double alpha = std::min(max_step(k, w.lambda, scaled_s), max_step(k, w.lambda, scaled_z));
            if (d.dtau < 0.0)
            {
                alpha = std::min(alpha, -tau / d.dtau);
            }
            if (d.dkappa < 0.0)
            {
                alpha = std::min(alpha, -kappa / d.dkappa);
            }
            return alpha;
        };

        // Predictor.
        const VecX ds_aff = -lambda_sq;
        const Direction aff = direction(1.0, ds_aff, -tau * kappa);
        const double alpha_aff = std::min(1.0, step_length(aff));
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);
        const double mu = (s.dot(z) + tau * kappa) * dkappa_scale;

        // Corrector.
        VecX s_tilde, z_tilde, corr;
        apply_W(k, w, aff.ds, s_tilde, true);
        apply_W(k, w, aff.dz, z_tilde, false);
        jordan_product(k, s_tilde, z_tilde, corr);
        ds = -lambda_sq - corr;
        add_identity(k, ds, sigma * mu);
        const double dk = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
        const Direction comb = direction(1.0 - sigma, ds, dk);
        const double alpha_max = step_length(comb);
        const double alpha = std::min(settings_.step_max, settings_.step_fraction * alpha_max);
        spdlog::trace("ipm     alpha_aff {:.3e} sigma {:.3e} alpha {:.3e} kkt_err {:.2e}", alpha_aff, sigma, alpha, kkt.last_error());
        if (!(alpha > 1e-12))
        {
            break;
        }

        x += alpha * comb.u.head(n);
        y += alpha * comb.u.segment(n, p);
        z += alpha * comb.dz;
        s += alpha * comb.ds;
        tau += alpha * comb.dtau;
        kappa += alpha * comb.dkappa;
        if (!x.allFinite() || !std::isfinite(tau) || !(tau > 0.0) || !(kappa > 0.0))
        {
            break;
        }
    }

    met = evaluate();
    restore_best();
    if (meets(settings_.feastol_inaccurate, settings_.abstol_inaccurate, settings_.reltol_inaccurate))
    {
        return finish(SolveStatus::Inaccurate, iteration);
    }
    if (met.pinf < settings_.feastol_inaccurate)
    {
        return finish(SolveStatus::Infeasible, iteration);
    }
    if (met.dinf < settings_.feastol_inaccurate)
    {
        return finish(SolveStatus::Unbounded, iteration);
    }
    return finish(SolveStatus::Failed, iteration);
}

std::unique_ptr<SolverBackend> make_default_backend()
{
    return std::make_unique<InteriorPointSolver>();
}

}  // namespace flyby
