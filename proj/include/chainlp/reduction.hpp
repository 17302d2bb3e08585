#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "chainlp/error.hpp"
#include "chainlp/model.hpp"

// Reward-mechanism layer.
//
// n agents with types q_i (the best quality each can produce) pay C * x / q_i
// to produce quality x, and the designer pays f(x) to every agent producing
// x out of a budget B.  With agents sorted by type, a monotone profile x* is
// implementable by some f iff
//
//     C * sum_i z_i x*_i <= B,
//     z_i = (n-1-i) (1/q_i - 1/q_{i+1}) + 1/q_i   (0-based, i < n-1),
//     z_{n-1} = 1/q_{n-1},
//
// so the optimal mechanism is the chain LP with those weights and K = B / C.
// The implementing f is the step function whose level at x*_i telescopes as
// C * sum_{j<=i} (x*_j - x*_{j-1}) / q_j.
//
// Profiles handed to this module are in sorted (ascending type) order;
// to_caller_order / to_sorted_order translate.

namespace chainlp {

struct SortedTypes {
    std::vector<double> q;
    /// order[k] is the caller index of the k-th smallest type.
    std::vector<std::size_t> order;
};

/// Stable ascending sort of agent types.
inline SortedTypes sort_types(std::span<const double> raw_q) {
    for (std::size_t i = 0; i < raw_q.size(); ++i)
        if (!(raw_q[i] > 0.0) || !std::isfinite(raw_q[i]))
            throw Error(ErrorCode::NonPositiveBound, "type q[" + std::to_string(i) + "] must be positive");
    SortedTypes out;
    out.order.resize(raw_q.size());
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return raw_q[a] < raw_q[b]; });
    out.q.reserve(raw_q.size());
    for (std::size_t k : out.order)
        out.q.push_back(raw_q[k]);
    return out;
}

class MechanismInstance {
public:
    MechanismInstance(std::span<const double> raw_q, double budget, double cost) {
        if (raw_q.empty())
            throw Error(ErrorCode::EmptyInstance, "mechanism has no agents");
        if (!(budget > 0.0) || !std::isfinite(budget))
            throw Error(ErrorCode::NegativeBudget, "budget B must be positive");
        if (!(cost > 0.0) || !std::isfinite(cost))
            throw Error(ErrorCode::NonPositiveCost, "cost constant C must be positive");
        auto sorted = sort_types(raw_q);
        q_ = std::move(sorted.q);
        order_ = std::move(sorted.order);
        B_ = budget;
        C_ = cost;
    }
    MechanismInstance(const std::vector<double>& raw_q, double budget, double cost)
        : MechanismInstance(std::span<const double>(raw_q), budget, cost) {}

    std::size_t size() const noexcept { return q_.size(); }
    std::span<const double> q() const noexcept { return q_; }
    double q(std::size_t i) const { return q_[i]; }
    double B() const noexcept { return B_; }
    double C() const noexcept { return C_; }
    std::span<const std::size_t> original_order() const noexcept { return order_; }

private:
    std::vector<double> q_;
    std::vector<std::size_t> order_;
    double B_ = 0.0;
    double C_ = 0.0;
};

template <typename T>
std::vector<T> to_caller_order(const MechanismInstance& mech, std::span<const T> sorted) {
    if (sorted.size() != mech.size())
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from number of agents");
    std::vector<T> out(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k)
        out[mech.original_order()[k]] = sorted[k];
    return out;
}

template <typename T>
std::vector<T> to_sorted_order(const MechanismInstance& mech, std::span<const T> caller) {
    if (caller.size() != mech.size())
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from number of agents");
    std::vector<T> out(caller.size());
    for (std::size_t k = 0; k < caller.size(); ++k)
        out[k] = caller[mech.original_order()[k]];
    return out;
}

/// Budget weights of the equivalent LP.
inline std::vector<double> budget_weights(std::span<const double> q) {
    const std::size_t n = q.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        z[i] = static_cast<double>(n - 1 - i) * (1.0 / q[i] - 1.0 / q[i + 1]) + 1.0 / q[i];
    if (n > 0)
        z[n - 1] = 1.0 / q[n - 1];
    return z;
}

inline LpInstance to_lp(const MechanismInstance& mech) {
    return validate(mech.q(), budget_weights(mech.q()), mech.B() / mech.C());
}

/// Minimum total reward any implementing f must pay for the sorted profile x:
/// C * (x_{n-1}/q_{n-1} + sum_{i<n-1} ((n-1-i)(1/q_i - 1/q_{i+1}) + 1/q_i) x_i).
inline double budget_lhs(const MechanismInstance& mech, std::span<const double> x) {
    const std::size_t n = mech.size();
    if (x.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from number of agents");
    double acc = x[n - 1] / mech.q(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double coeff = static_cast<double>(n - 1 - i) * (1.0 / mech.q(i) - 1.0 / mech.q(i + 1)) + 1.0 / mech.q(i);
        acc += coeff * x[i];
    }
    return mech.C() * acc;
}

struct Breakpoint {
    double threshold = 0.0;  ///< quality at which the level starts
    double level = 0.0;      ///< reward paid for qualities in [threshold, next threshold)

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Non-decreasing, right-continuous step function; 0 below the first
/// threshold.
class RewardSchedule {
public:
    RewardSchedule() = default;
    explicit RewardSchedule(std::vector<Breakpoint> breakpoints) : breakpoints_(std::move(breakpoints)) {
        for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
            if (!(breakpoints_[k].level >= 0.0))
                throw Error(ErrorCode::InvalidArgument, "reward levels must be non-negative");
            if (k > 0 && !(breakpoints_[k].threshold > breakpoints_[k - 1].threshold))
                throw Error(ErrorCode::InvalidArgument, "thresholds must be strictly increasing");
            if (k > 0 && breakpoints_[k].level < breakpoints_[k - 1].level)
                throw Error(ErrorCode::InvalidArgument, "levels must be non-decreasing");
        }
    }

    std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }

    double operator()(double x) const {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x,
                                   [](double v, const Breakpoint& b) { return v < b.threshold; });
        return it == breakpoints_.begin() ? 0.0 : std::prev(it)->level;
    }

private:
    std::vector<Breakpoint> breakpoints_;
};

/// Builds the step reward that implements the sorted profile x_star.
/// Runs of equal x_star values collapse into one breakpoint, and zero
/// entries fold into the base level 0.
inline RewardSchedule build_reward(const MechanismInstance& mech, std::span<const double> x_star,
                                   double eps_feas = 1e-9) {
    const std::size_t n = mech.size();
    if (x_star.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from number of agents");
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && x_star[i] < x_star[i - 1])
            throw Error(ErrorCode::NonMonotoneProfile,
                        "x[" + std::to_string(i) + "] < x[" + std::to_string(i - 1) + "]");
        if (x_star[i] < 0.0 || x_star[i] > mech.q(i) * (1.0 + eps_feas))
            throw Error(ErrorCode::InfeasibleProfile, "x[" + std::to_string(i) + "] outside [0, q_i]");
    }
    const double lhs = budget_lhs(mech, x_star);
    if (lhs > mech.B() * (1.0 + eps_feas))
        throw Error(ErrorCode::BudgetExceeded,
                    "profile needs total reward " + std::to_string(lhs) + " > B = " + std::to_string(mech.B()));

    std::vector<Breakpoint> points;
    double level = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        level += mech.C() * (x_star[i] - previous) / mech.q(i);
        previous = x_star[i];
        if (x_star[i] <= 0.0)
            continue;
        if (!points.empty() && points.back().threshold == x_star[i])
            points.back().level = std::max(points.back().level, level);
        else
            points.push_back({x_star[i], level});
    }
    return RewardSchedule(std::move(points));
}

struct AgentCheck {
    std::size_t agent = 0;          ///< sorted index
    bool passed = true;
    double target = 0.0;            ///< prescribed quality x*_i
    double target_utility = 0.0;    ///< f(x*_i) - C x*_i / q_i
    double best_deviation = 0.0;    ///< most profitable alternative quality
    double deviation_utility = 0.0;
};

struct IncentiveReport {
    std::vector<AgentCheck> agents;
    double total_reward = 0.0;
    bool budget_ok = true;
    bool nonnegative = true;

    bool passed() const {
        return budget_ok && nonnegative &&
               std::all_of(agents.begin(), agents.end(), [](const AgentCheck& a) { return a.passed; });
    }
};

/// Checks that no agent gains more than eps_feas * C by leaving x*_i.  Within
/// a step the utility falls with x, so only 0 and the thresholds reachable by
/// the agent need to be tried.
inline IncentiveReport verify_incentives(const RewardSchedule& f, const MechanismInstance& mech,
                                         std::span<const double> x_star, double eps_feas = 1e-9) {
    const std::size_t n = mech.size();
    if (x_star.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from number of agents");

    IncentiveReport report;
    for (const auto& bp : f.breakpoints())
        if (bp.level < 0.0)
            report.nonnegative = false;

    const double slack = eps_feas * mech.C();
    for (std::size_t i = 0; i < n; ++i) {
        auto utility = [&](double x) { return f(x) - x * mech.C() / mech.q(i); };
        AgentCheck check;
        check.agent = i;
        check.target = x_star[i];
        check.target_utility = utility(x_star[i]);
        check.best_deviation = 0.0;
        check.deviation_utility = utility(0.0);
        for (const auto& bp : f.breakpoints()) {
            if (bp.threshold > mech.q(i))
                break;
            const double u = utility(bp.threshold);
            if (u > check.deviation_utility) {
                check.deviation_utility = u;
                check.best_deviation = bp.threshold;
            }
        }
        check.passed = check.target_utility + slack >= check.deviation_utility;
        report.total_reward += f(x_star[i]);
        report.agents.push_back(check);
    }
    report.budget_ok = report.total_reward <= mech.B() * (1.0 + eps_feas);
    return report;
}

} // namespace chainlp
