#include "flyby/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace flyby
{

namespace
{

using Triplet = Eigen::Triplet<double, int>;

int value_offset(const SparseMatrix& m, Index row, Index col)
{
    const int* outer = m.outerIndexPtr();
    const int* inner = m.innerIndexPtr();
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    const int* it = std::lower_bound(begin, end, static_cast<int>(row));
    if (it == end || *it != row)
    {
        throw NumericalError("Transcription: missing structural entry");
    }
    return static_cast<int>(it - inner);
}

}  // namespace

Index ConeLayout::rows() const
{
    Index total = nonneg;
    for (const Index d : soc)
    {
        total += d;
    }
    return total;
}

void ConicProblem::validate() const
{
    const Index n = c.size();
    if (A.cols() != n || G.cols() != n)
    {
        throw InvalidInput("ConicProblem: column counts disagree with the cost vector");
    }
    if (A.rows() != b.size() || G.rows() != h.size())
    {
        throw InvalidInput("ConicProblem: right-hand sides disagree with constraint rows");
    }
    if (cones.rows() != G.rows())
    {
        throw InvalidInput("ConicProblem: cone layout does not cover the rows of G");
    }
    for (const Index d : cones.soc)
    {
        if (d < 1)
        {
            throw InvalidInput("ConicProblem: second-order cones need dimension >= 1");
        }
    }
}

VariableLayout::VariableLayout(Index nodes, Index wheel_count)
    : nodes_(nodes), nw_(wheel_count), nx_(state_dim(wheel_count))
{
    if (nodes < 2 || wheel_count < 1)
    {
        throw InvalidInput("VariableLayout: need at least two nodes and one wheel");
    }
}

Transcription::Transcription(const TranscriptionData& data, const VariableLayout& layout)
    : layout_(layout)
{
    const Index N = layout.nodes();
    const Index nw = layout.wheel_count();
    const Index nx = layout.state_size();
    if (data.nodes != N || data.wheel_count != nw)
    {
        throw InvalidInput("Transcription: layout and transcription data disagree");
    }
    if (static_cast<Index>(data.sun.size()) != N || static_cast<Index>(data.visual.size()) != N ||
        static_cast<Index>(data.infrared.size()) != N)
    {
        throw InvalidInput("Transcription: one cone factor per node is required");
    }
    if (data.x_init.size() != nx)
    {
        throw InvalidInput("Transcription: initial state has the wrong dimension");
    }
    const Index n = layout.size();

    // Equality block: x_0 = x_init; x_{k+1} − A_k x_k − B⁻ u_k − B⁺ u_{k+1} = s_k.
    std::vector<Triplet> a_trip;
    for (Index i = 0; i < nx; ++i)
    {
        a_trip.emplace_back(i, layout.x(0) + i, 1.0);
    }
    for (Index k = 0; k + 1 < N; ++k)
    {
        const Index r = nx * (k + 1);
        for (Index i = 0; i < nx; ++i)
        {
            a_trip.emplace_back(r + i, layout.x(k + 1) + i, 1.0);
            for (Index j = 0; j < nx; ++j)
            {
                a_trip.emplace_back(r + i, layout.x(k) + j, 0.0);
            }
            for (Index j = 0; j < nw; ++j)
            {
                a_trip.emplace_back(r + i, layout.u(k) + j, 0.0);
                a_trip.emplace_back(r + i, layout.u(k + 1) + j, 0.0);
            }
        }
    }
    problem_.A.resize(N * nx, n);
    problem_.A.setFromTriplets(a_trip.begin(), a_trip.end());
    problem_.A.makeCompressed();
    problem_.b = VecX::Zero(N * nx);
    problem_.b.head(nx) = data.x_init;

    a_index_.assign(static_cast<std::size_t>(N - 1), {});
    bm_index_.assign(static_cast<std::size_t>(N - 1), {});
    bp_index_.assign(static_cast<std::size_t>(N - 1), {});
    for (Index k = 0; k + 1 < N; ++k)
    {
        const Index r = nx * (k + 1);
        auto& ai = a_index_[static_cast<std::size_t>(k)];
        auto& bmi = bm_index_[static_cast<std::size_t>(k)];
        auto& bpi = bp_index_[static_cast<std::size_t>(k)];
        for (Index j = 0; j < nx; ++j)
        {
            for (Index i = 0; i < nx; ++i)
            {
                ai.push_back(value_offset(problem_.A, r + i, layout.x(k) + j));
            }
        }
        for (Index j = 0; j < nw; ++j)
        {
            for (Index i = 0; i < nx; ++i)
            {
                bmi.push_back(value_offset(problem_.A, r + i, layout.u(k) + j));
                bpi.push_back(value_offset(problem_.A, r + i, layout.u(k + 1) + j));
            }
        }
    }

    // Generalised inequalities, block-major across nodes.
    std::vector<Triplet> g_trip;
    std::vector<double> h_val;
    Index row = 0;
    auto push_h = [&](double v) {
        h_val.push_back(v);
        return row++;
    };

    rows_.slack_nonneg = row;
    for (Index k = 0; k < N; ++k)
    {
        g_trip.emplace_back(push_h(0.0), layout.gamma(k), -1.0);
        g_trip.emplace_back(push_h(0.0), layout.zeta(k), -1.0);
    }

    rows_.box = row;
    for (Index k = 0; k < N; ++k)
    {
        for (const double sign : {-1.0, 1.0})
        {
            for (Index i = 0; i < nw; ++i)
            {
                g_trip.emplace_back(push_h(data.torque_bound), layout.u(k) + i, sign);
            }
        }
        for (const double sign : {-1.0, 1.0})
        {
            for (Index i = 0; i < nw; ++i)
            {
                g_trip.emplace_back(push_h(data.momentum_bound), layout.h(k) + i, sign);
            }
        }
        for (const double sign : {-1.0, 1.0})
        {
            for (Index i = 0; i < 3; ++i)
            {
                g_trip.emplace_back(push_h(data.rate_bound), layout.omega(k) + i, sign);
            }
        }
    }

    rows_.trust = row;
    for (Index k = 0; k < N; ++k)
    {
        g_trip.emplace_back(push_h(0.0), layout.delta_x(k), 1.0);
        g_trip.emplace_back(push_h(0.0), layout.delta_u(k), 1.0);
    }
    const Index linear_rows = row;

    auto pointing_cone = [&](const ConeFactor& cone, Index k, Index slack_col, double offset) {
        const Index t_row = push_h(offset);
        if (slack_col >= 0)
        {
            g_trip.emplace_back(t_row, slack_col, -1.0);
        }
        for (Index i = 0; i < 4; ++i)
        {
            const Index r = push_h(0.0);
            for (Index j = 0; j < 4; ++j)
            {
                if (cone.matrix(i, j) != 0.0)
                {
                    g_trip.emplace_back(r, layout.q(k) + j, -cone.matrix(i, j));
                }
            }
        }
    };

    std::vector<Index> soc;
    rows_.sun = row;
    for (Index k = 0; k < N; ++k)
    {
        pointing_cone(data.sun[static_cast<std::size_t>(k)], k, -1, data.sun[static_cast<std::size_t>(k)].rhs);
        soc.push_back(5);
    }
    rows_.los = row;
    for (Index k = 0; k < N; ++k)
    {
        pointing_cone(data.visual[static_cast<std::size_t>(k)], k, layout.eta(k), 0.0);
        soc.push_back(5);
    }
    rows_.visual = row;
    for (Index k = 0; k < N; ++k)
    {
        pointing_cone(data.visual[static_cast<std::size_t>(k)], k, layout.gamma(k),
                      data.visual[static_cast<std::size_t>(k)].rhs);
        soc.push_back(5);
    }
    rows_.infrared = row;
    for (Index k = 0; k < N; ++k)
    {
        pointing_cone(data.infrared[static_cast<std::size_t>(k)], k, layout.zeta(k),
                      data.infrared[static_cast<std::size_t>(k)].rhs);
        soc.push_back(5);
    }
    rows_.energy = row;
    for (Index k = 0; k < N; ++k)
    {
        g_trip.emplace_back(push_h(0.0), layout.rho(k), -1.0);
        for (Index i = 0; i < nw; ++i)
        {
            g_trip.emplace_back(push_h(0.0), layout.u(k) + i, -1.0);
        }
        soc.push_back(nw + 1);
    }
    rows_.u_dev = row;
    for (Index k = 0; k < N; ++k)
    {
        g_trip.emplace_back(push_h(0.0), layout.delta_u(k), -1.0);
        for (Index i = 0; i < nw; ++i)
        {
            g_trip.emplace_back(push_h(0.0), layout.u(k) + i, 1.0);
        }
        soc.push_back(nw + 1);
    }
    rows_.x_dev = row;
    for (Index k = 0; k < N; ++k)
    {
        g_trip.emplace_back(push_h(0.0), layout.delta_x(k), -1.0);
        for (Index i = 0; i < nx; ++i)
        {
            g_trip.emplace_back(push_h(0.0), layout.x(k) + i, 1.0);
        }
        soc.push_back(nx + 1);
    }

    problem_.G.resize(row, n);
    problem_.G.setFromTriplets(g_trip.begin(), g_trip.end());
    problem_.G.makeCompressed();
    problem_.h = Eigen::Map<const VecX>(h_val.data(), static_cast<Index>(h_val.size()));
    problem_.cones.nonneg = linear_rows;
    problem_.cones.soc = std::move(soc);
    problem_.c = VecX::Zero(n);
    problem_.validate();
}

void Transcription::update_linearization(const DiscreteLTV& discrete,
                                         const ScaledTrajectory& reference,
                                         const CardinalityWeights& weights,
                                         const ObjectiveWeights& beta)
{
    const Index N = layout_.nodes();
    const Index nw = layout_.wheel_count();
    const Index nx = layout_.state_size();
    if (static_cast<Index>(discrete.size()) != N - 1 || static_cast<Index>(reference.size()) != N ||
        weights.gamma_prev.size() != N || weights.zeta_prev.size() != N)
    {
        throw InvalidInput("update_linearization: node counts disagree with the layout");
    }

    double* values = problem_.A.valuePtr();
    for (Index k = 0; k + 1 < N; ++k)
    {
        const auto& interval = discrete.intervals[static_cast<std::size_t>(k)];
        if (interval.A.rows() != nx || interval.B_minus.cols() != nw)
        {
            throw InvalidInput("update_linearization: interval matrices have the wrong shape");
        }
        const auto& ai = a_index_[static_cast<std::size_t>(k)];
        const auto& bmi = bm_index_[static_cast<std::size_t>(k)];
        const auto& bpi = bp_index_[static_cast<std::size_t>(k)];
        for (Index e = 0; e < nx * nx; ++e)
        {
            values[ai[static_cast<std::size_t>(e)]] = -interval.A.data()[e];
        }
        for (Index e = 0; e < nx * nw; ++e)
        {
            values[bmi[static_cast<std::size_t>(e)]] = -interval.B_minus.data()[e];
            values[bpi[static_cast<std::size_t>(e)]] = -interval.B_plus.data()[e];
        }
        problem_.b.segment(nx * (k + 1), nx) = interval.s;
    }

    for (Index k = 0; k < N; ++k)
    {
        const VecX& x_bar = reference.states[static_cast<std::size_t>(k)];
        const VecX& u_bar = reference.controls[static_cast<std::size_t>(k)];
        if (x_bar.size() != nx || u_bar.size() != nw)
        {
            throw InvalidInput("update_linearization: reference has the wrong dimensions");
        }
        problem_.h.segment(rows_.u_dev + k * (nw + 1) + 1, nw) = u_bar;
        problem_.h.segment(rows_.x_dev + k * (nx + 1) + 1, nx) = x_bar;

        problem_.c.segment(layout_.x(k), nx + nw).setZero();
        problem_.c[layout_.gamma(k)] = beta[0] * card_weight(weights.gamma_prev[k], weights.epsilon);
        problem_.c[layout_.zeta(k)] = beta[1] * card_weight(weights.zeta_prev[k], weights.epsilon);
        problem_.c[layout_.eta(k)] = beta[2];
        problem_.c[layout_.rho(k)] = beta[3];
        problem_.c[layout_.delta_x(k)] = beta[4];
        problem_.c[layout_.delta_u(k)] = beta[5];
    }
}

void Transcription::update_trust_region(double delta_x_max, double delta_u_max)
{
    if (!(delta_x_max > 0.0) || !(delta_u_max > 0.0))
    {
        throw InvalidInput("update_trust_region: radii must be positive");
    }
    for (Index k = 0; k < layout_.nodes(); ++k)
    {
        problem_.h[rows_.trust + 2 * k] = delta_x_max;
        problem_.h[rows_.trust + 2 * k + 1] = delta_u_max;
    }
}

void update_dynamic(Transcription& transcription,
                    const DiscreteLTV& discrete,
                    const ScaledTrajectory& reference,
                    const CardinalityWeights& weights,
                    double delta_x_max,
                    double delta_u_max,
                    const ObjectiveWeights& beta)
{
    transcription.update_linearization(discrete, reference, weights, beta);
    transcription.update_trust_region(delta_x_max, delta_u_max);
}

double ResidualReport::max_violation() const
{
    return std::max({equality, nonneg, soc});
}

ResidualReport verify_solution(const ConicProblem& problem, const VecX& primal)
{
    if (primal.size() != problem.variables())
    {
        throw InvalidInput("verify_solution: primal has the wrong length");
    }
    ResidualReport report;
    report.objective = problem.c.dot(primal);
    if (problem.A.rows() > 0)
    {
        report.equality = (problem.A * primal - problem.b).cwiseAbs().maxCoeff();
    }
    const VecX slack = problem.h - problem.G * primal;
    for (Index i = 0; i < problem.cones.nonneg; ++i)
    {
        report.nonneg = std::max(report.nonneg, -slack[i]);
    }
    Index offset = problem.cones.nonneg;
    for (std::size_t j = 0; j < problem.cones.soc.size(); ++j)
    {
        const Index d = problem.cones.soc[j];
        const double deficit = slack.segment(offset + 1, d - 1).norm() - slack[offset];
        if (deficit > report.soc)
        {
            report.soc = deficit;
            report.worst_soc = static_cast<Index>(j);
        }
        offset += d;
    }
    return report;
}

namespace
{

void write_vector(std::ostream& out, const char* name, const VecX& v)
{
    out << name << ' ' << v.size() << '\n';
    for (Index i = 0; i < v.size(); ++i)
    {
        out << v[i] << (i + 1 == v.size() ? '\n' : ' ');
    }
    if (v.size() == 0)
    {
        out << '\n';
    }
}

void write_matrix(std::ostream& out, const char* name, const SparseMatrix& m)
{
    out << name << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (Index col = 0; col < m.outerSize(); ++col)
    {
        for (SparseMatrix::InnerIterator it(m, col); it; ++it)
        {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

void expect_token(std::istream& in, const std::string& token)
{
    std::string got;
    if (!(in >> got) || got != token)
    {
        throw InvalidInput("read_problem: expected '" + token + "', got '" + got + "'");
    }
}

VecX read_vector(std::istream& in, const std::string& name)
{
    expect_token(in, name);
    Index n = 0;
    in >> n;
    VecX v(n);
    for (Index i = 0; i < n; ++i)
    {
        in >> v[i];
    }
    if (!in)
    {
        throw InvalidInput("read_problem: truncated vector " + name);
    }
    return v;
}

SparseMatrix read_matrix(std::istream& in, const std::string& name)
{
    expect_token(in, name);
    Index rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nnz));
    for (Index e = 0; e < nnz; ++e)
    {
        int i = 0, j = 0;
        double v = 0.0;
        in >> i >> j >> v;
        trip.emplace_back(i, j, v);
    }
    if (!in)
    {
        throw InvalidInput("read_problem: truncated matrix " + name);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

}  // namespace

void write_problem(std::ostream& out, const ConicProblem& problem)
{
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    out << "conic-problem 1\n";
    out << "dims " << problem.variables() << ' ' << problem.A.rows() << ' ' << problem.G.rows() << '\n';
    out << "nonneg " << problem.cones.nonneg << '\n';
    out << "soc " << problem.cones.soc.size();
    for (const Index d : problem.cones.soc)
    {
        out << ' ' << d;
    }
    out << '\n';
    write_vector(out, "c", problem.c);
    write_vector(out, "b", problem.b);
    write_vector(out, "h", problem.h);
    write_matrix(out, "A", problem.A);
    write_matrix(out, "G", problem.G);
    out.flags(flags);
    out.precision(precision);
}

ConicProblem read_problem(std::istream& in)
{
    expect_token(in, "conic-problem");
    int version = 0;
    in >> version;
    if (version != 1)
    {
        throw InvalidInput("read_problem: unsupported version");
    }
    expect_token(in, "dims");
    Index n = 0, p = 0, m = 0;
    in >> n >> p >> m;
    ConicProblem problem;
    expect_token(in, "nonneg");
    in >> problem.cones.nonneg;
    expect_token(in, "soc");
    std::size_t count = 0;
    in >> count;
    problem.cones.soc.resize(count);
    for (auto& d : problem.cones.soc)
    {
        in >> d;
    }
    problem.c = read_vector(in, "c");
    problem.b = read_vector(in, "b");
    problem.h = read_vector(in, "h");
    problem.A = read_matrix(in, "A");
    problem.G = read_matrix(in, "G");
    if (problem.c.size() != n || problem.A.rows() != p || problem.G.rows() != m)
    {
        throw InvalidInput("read_problem: header dimensions disagree with the payload");
    }
    problem.validate();
    return problem;
}

}  // namespace flyby
