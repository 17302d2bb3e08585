#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainlp/error.hpp"

// Core types for the chain-ordered LP
//
//     maximize    sum_i x_i
//     subject to  0 <= x_0 <= x_1 <= ... <= x_{n-1},   x_i <= q_i,
//                 sum_i z_i x_i <= K
//
// with 0 < q_0 <= ... <= q_{n-1}, z_i > 0 and K >= 0.  Indices are 0-based
// throughout the library; index ranges are half-open [i, j).

namespace chainlp {

struct Tolerances {
    /// Relative slack used by every feasibility check.
    double eps_feas = 1e-9;
    /// Residual budget at or below which the budget counts as exhausted.
    double eps_zero = 1e-300;

    static Tolerances for_budget(double K, double eps_feas = 1e-9) {
        Tolerances t;
        t.eps_feas = eps_feas;
        t.eps_zero = std::max(1e-12 * K, 1e-300);
        return t;
    }
};

class LpInstance {
public:
    std::size_t size() const noexcept { return q_.size(); }
    std::span<const double> q() const noexcept { return q_; }
    std::span<const double> z() const noexcept { return z_; }
    double q(std::size_t i) const { return q_[i]; }
    double z(std::size_t i) const { return z_[i]; }
    double K() const noexcept { return K_; }

    friend bool operator==(const LpInstance&, const LpInstance&) = default;

    friend LpInstance validate(std::span<const double>, std::span<const double>, double);

private:
    LpInstance() = default;

    std::vector<double> q_;
    std::vector<double> z_;
    double K_ = 0.0;
};

/// Checks the constraints on (q, z, K) and returns an owning instance.
/// Equal adjacent bounds are allowed; K = 0 is allowed and forces x = 0.
inline LpInstance validate(std::span<const double> q, std::span<const double> z, double K) {
    if (q.empty() && z.empty())
        throw Error(ErrorCode::EmptyInstance, "instance has no variables");
    if (q.size() != z.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "q has " + std::to_string(q.size()) + " entries, z has " + std::to_string(z.size()));
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0.0) || !std::isfinite(q[i]))
            throw Error(ErrorCode::NonPositiveBound, "q[" + std::to_string(i) + "] must be positive");
        if (i > 0 && q[i] < q[i - 1])
            throw Error(ErrorCode::UnsortedBounds,
                        "q[" + std::to_string(i) + "] < q[" + std::to_string(i - 1) + "]");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0) || !std::isfinite(z[i]))
            throw Error(ErrorCode::NonPositiveWeight, "z[" + std::to_string(i) + "] must be positive");
    }
    if (!(K >= 0.0) || !std::isfinite(K))
        throw Error(ErrorCode::NegativeBudget, "K must be a finite non-negative number");

    LpInstance inst;
    inst.q_.assign(q.begin(), q.end());
    inst.z_.assign(z.begin(), z.end());
    inst.K_ = K;
    return inst;
}

inline LpInstance validate(const std::vector<double>& q, const std::vector<double>& z, double K) {
    return validate(std::span<const double>(q), std::span<const double>(z), K);
}

struct Solution {
    std::vector<double> x;
    double objective = 0.0;
    double budget_used = 0.0;
};

inline Solution make_solution(const LpInstance& inst, std::vector<double> x) {
    if (x.size() != inst.size())
        throw Error(ErrorCode::DimensionMismatch, "profile length differs from instance size");
    Solution s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.objective += x[i];
        s.budget_used += inst.z(i) * x[i];
    }
    s.x = std::move(x);
    return s;
}

/// Empty string when `x` satisfies every constraint of `inst` within the
/// relative slack `eps`, otherwise a description of the first violation.
inline std::string feasibility_violation(const LpInstance& inst, std::span<const double> x, double eps) {
    if (x.size() != inst.size())
        return "profile length differs from instance size";
    const double scale = inst.q(inst.size() - 1);
    double used = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            return "x[" + std::to_string(i) + "] is not finite";
        if (x[i] < -eps * scale)
            return "x[" + std::to_string(i) + "] is negative";
        if (x[i] > inst.q(i) * (1.0 + eps))
            return "x[" + std::to_string(i) + "] exceeds its bound";
        if (i > 0 && x[i] < x[i - 1] - eps * std::max(std::abs(x[i - 1]), scale))
            return "x[" + std::to_string(i) + "] < x[" + std::to_string(i - 1) + "]";
        used += inst.z(i) * x[i];
    }
    if (used > inst.K() + eps * std::max(inst.K(), 1.0))
        return "budget exceeded";
    return {};
}

inline void require_feasible(const LpInstance& inst, std::span<const double> x, double eps) {
    if (auto why = feasibility_violation(inst, x, eps); !why.empty())
        throw Error(ErrorCode::InfeasibleProfile, why);
}

/// Accumulator for weight sums.  Quad precision keeps short segments far to
/// the right accurate, and segments whose exact means tie round to the same
/// double.
using WideSum = __float128;

/// O(1) segment sums over the weights.
class PrefixSums {
public:
    explicit PrefixSums(std::span<const double> z) : cumulative_(z.size() + 1, WideSum(0)) {
        for (std::size_t i = 0; i < z.size(); ++i)
            cumulative_[i + 1] = cumulative_[i] + static_cast<WideSum>(z[i]);
    }
    explicit PrefixSums(const LpInstance& inst) : PrefixSums(inst.z()) {}

    std::size_t size() const noexcept { return cumulative_.size() - 1; }

    /// z_i + ... + z_{j-1}
    double sum(std::size_t i, std::size_t j) const {
        check(i, j);
        return static_cast<double>(cumulative_[j] - cumulative_[i]);
    }

    /// sum(i, j) / (j - i)
    double avg(std::size_t i, std::size_t j) const {
        check(i, j);
        return static_cast<double>((cumulative_[j] - cumulative_[i]) / static_cast<WideSum>(j - i));
    }

    std::span<const WideSum> cumulative() const noexcept { return cumulative_; }

private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= j || j > size())
            throw Error(ErrorCode::IndexOutOfRange,
                        "segment [" + std::to_string(i) + ", " + std::to_string(j) + ") is empty or exceeds n = " +
                            std::to_string(size()));
    }

    std::vector<WideSum> cumulative_;
};

} // namespace chainlp
