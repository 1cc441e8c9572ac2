#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstddef>
#include <string>
#include <type_traits>

#include <Eigen/Core>

namespace flyby
{

/// Error-control settings for the adaptive integrator.
struct IntegratorSettings
{
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();

    /// Profile used while building linearisation trajectories.
    static IntegratorSettings loose() { return {1e-5, 1e-5}; }
    /// Profile used for truth propagation.
    static IntegratorSettings tight() { return {1e-10, 1e-10}; }

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0))
        {
            throw std::invalid_argument("IntegratorSettings: tolerances and max_step must be positive");
        }
    }
};

/// Thrown when the step size collapses; carries the time at which it happened.
class IntegrationFailure : public std::runtime_error
{
public:
    IntegrationFailure(const std::string& what, double time)
        : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time)
    {
    }
    double time() const { return time_; }

private:
    double time_;
};

struct IntegrationStats
{
    long accepted_steps = 0;
    long rejected_steps = 0;
    long rhs_evaluations = 0;
};

/**
 * Continuous extension of one accepted Dormand–Prince step (fourth order).
 */
struct DenseStep
{
    double t0 = 0.0;
    double h = 0.0;
    Eigen::VectorXd r1, r2, r3, r4, r5;

    Eigen::VectorXd operator()(double t) const
    {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
    }
};

/**
 * Dormand–Prince 5(4) with FSAL, stabilised step-size control and dense
 * output. `rhs(t, y, dy)` must write dy/dt into dy (pre-sized).
 *
 * `on_step(const DenseStep&)` is invoked after each accepted step when the
 * observer is not a nullptr_t.
 */
template <typename Rhs, typename Observer = std::nullptr_t>
Eigen::VectorXd integrate_dopri5(Rhs&& rhs,
                                 double t0,
                                 double t1,
                                 Eigen::VectorXd y,
                                 const IntegratorSettings& settings,
                                 Observer&& on_step = nullptr,
                                 IntegrationStats* stats = nullptr)
{
    using Eigen::VectorXd;
    settings.validate();
    if (!(t1 > t0))
    {
        throw std::invalid_argument("integrate_dopri5: t1 must exceed t0");
    }

    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                     a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    const Eigen::Index n = y.size();
    VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    long evals = 0;
    auto eval = [&](double t, const VectorXd& state, VectorXd& out) {
        rhs(t, state, out);
        ++evals;
    };

    const double span = t1 - t0;
    const double rtol = settings.rel_tol;
    const double atol = settings.abs_tol;
    const double h_max = std::min(settings.max_step, span);

    double t = t0;
    eval(t, y, k1);

    // Initial step guess (Hairer, Nørsett & Wanner, II.4).
    double h;
    {
        const VectorXd sc = (atol + rtol * y.array().abs()).matrix();
        const double d0 = (y.array() / sc.array()).matrix().norm() / std::sqrt(double(n));
        const double d1n = (k1.array() / sc.array()).matrix().norm() / std::sqrt(double(n));
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, h_max);
        ytmp = y + h0 * k1;
        eval(t + h0, ytmp, k2);
        const double d2 = ((k2 - k1).array() / sc.array()).matrix().norm() / std::sqrt(double(n)) / h0;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, h_max});
    }

    const double h_min = 1e-14 * std::max(std::abs(t0), std::abs(t1)) + 1e-300;
    bool last_rejected = false;
    double fac_old = 1e-4;
    while (t < t1)
    {
        bool final_step = false;
        if (t + 1.01 * h >= t1)
        {
            h = t1 - t;
            final_step = true;
        }
        if (h < h_min)
        {
            throw IntegrationFailure("integrate_dopri5: step size underflow", t);
        }

        ytmp = y + h * a21 * k1;
        eval(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        eval(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        eval(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        eval(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        eval(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        eval(t + h, ynew, k7);

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double ratio = err[i] / sk;
            err_norm += ratio * ratio;
        }
        err_norm = std::sqrt(err_norm / double(n));
        if (!std::isfinite(err_norm))
        {
            h *= 0.1;
            last_rejected = true;
            if (stats)
            {
                ++stats->rejected_steps;
            }
            continue;
        }

        // Lund-stabilised controller as in DOPRI5 (beta = 0.04).
        const double fac11 = std::pow(err_norm, 0.2 - 0.04 * 0.75);
        double fac = fac11 / std::pow(fac_old, 0.04);
        fac = std::clamp(fac / 0.9, 1.0 / 10.0, 1.0 / 0.2);
        double h_new = h / fac;

        if (err_norm <= 1.0)
        {
            fac_old = std::max(err_norm, 1e-4);
            if constexpr (!std::is_same_v<std::decay_t<Observer>, std::nullptr_t>)
            {
                DenseStep step;
                step.t0 = t;
                step.h = h;
                step.r1 = y;
                step.r2 = ynew - y;
                step.r3 = h * k1 - step.r2;
                step.r4 = step.r2 - h * k7 - step.r3;
                step.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                on_step(step);
            }
            t = final_step ? t1 : t + h;
            y.swap(ynew);
            k1.swap(k7);
            if (stats)
            {
                ++stats->accepted_steps;
            }
            if (last_rejected)
            {
                h_new = std::min(h_new, h);
            }
            last_rejected = false;
            h = std::min(h_new, h_max);
        }
        else
        {
            h_new = h / std::min(1.0 / 0.2, fac11 / 0.9);
            h = h_new;
            last_rejected = true;
            if (stats)
            {
                ++stats->rejected_steps;
            }
        }
    }
    if (stats)
    {
        stats->rhs_evaluations += evals;
    }
    return y;
}

}  // namespace flyby
