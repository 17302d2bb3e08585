#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainlp/error.hpp"
#include "chainlp/fast_solver.hpp"
#include "chainlp/reduction.hpp"

// Proportional mechanism: the budget B is split in proportion to quality,
//
//     u_i(x) = x_i B / sum_j x_j - x_i C / q_i,   u_i = 0 when every x_j = 0.
//
// For two agents the pure equilibrium has a closed form with total
// B q_1 q_2 / (C (q_1 + q_2)).  Anything with more agents is solved
// numerically here; those profiles are an extension, not a proven result.

namespace chainlp {

enum class EquilibriumMethod { closed_form_2agent, interior_formula, best_response };

constexpr std::string_view to_string(EquilibriumMethod m) noexcept {
    switch (m) {
    case EquilibriumMethod::closed_form_2agent: return "closed_form_2agent";
    case EquilibriumMethod::interior_formula: return "interior_formula";
    case EquilibriumMethod::best_response: return "best_response";
    }
    return "unknown";
}

struct EquilibriumProfile {
    std::vector<double> x;
    bool converged = true;
    std::size_t iterations = 0;
    EquilibriumMethod method = EquilibriumMethod::closed_form_2agent;
    /// Largest utility gain any agent finds by deviating (checked profiles only).
    double max_gain = 0.0;

    double total() const { return std::accumulate(x.begin(), x.end(), 0.0); }
};

class DidNotConverge : public Error {
public:
    explicit DidNotConverge(EquilibriumProfile last)
        : Error(ErrorCode::DidNotConverge,
                "best-response dynamics stopped after " + std::to_string(last.iterations) + " sweeps"),
          profile(std::move(last)) {}

    EquilibriumProfile profile;
};

inline double proportional_utility(std::span<const double> q, double B, double C, std::span<const double> x,
                                   std::size_t i) {
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (total <= 0.0)
        return 0.0;
    return x[i] * B / total - x[i] * C / q[i];
}

/// Utility of agent i choosing `xi` while the others sum to `others`.
inline double proportional_utility(double qi, double B, double C, double xi, double others) {
    const double total = xi + others;
    if (total <= 0.0)
        return 0.0;
    return xi * B / total - xi * C / qi;
}

/// Stationary point of agent i's concave utility, clipped to [0, q_i]:
/// sqrt(B s q_i / C) - s with s the others' total.  Returns a negative value
/// when others == 0, where no best response exists (any x > 0 wins B and
/// smaller is always better).
inline double best_response(double qi, double B, double C, double others) {
    if (others <= 0.0)
        return -1.0;
    return std::clamp(std::sqrt(B * others * qi / C) - others, 0.0, qi);
}

inline EquilibriumProfile equilibrium_2agent(double q1, double q2, double B, double C) {
    if (!(q1 > 0.0 && q2 > 0.0 && B > 0.0 && C > 0.0))
        throw Error(ErrorCode::InvalidArgument, "q1, q2, B and C must be positive");
    const double total = B * q1 * q2 / (C * (q1 + q2));
    EquilibriumProfile p;
    p.method = EquilibriumMethod::closed_form_2agent;
    p.x = {total * total * C / (q2 * B), total * total * C / (q1 * B)};
    if (p.x[0] > q1 || p.x[1] > q2)
        throw Error(ErrorCode::NotInterior, "closed-form profile exceeds an agent's type");
    return p;
}

/// n-agent interior solution of the first-order conditions: total
/// S = (n-1) B / (C sum 1/q_i) and x_i = S (1 - S C / (B q_i)).  Throws
/// NotInterior when some x_i leaves [0, q_i].
inline EquilibriumProfile interior_equilibrium(std::span<const double> q, double B, double C) {
    if (q.size() < 2)
        throw Error(ErrorCode::TooFewAgents, "the proportional game needs at least two agents");
    double inv_sum = 0.0;
    for (double qi : q)
        inv_sum += 1.0 / qi;
    const double total = static_cast<double>(q.size() - 1) * B / (C * inv_sum);
    EquilibriumProfile p;
    p.method = EquilibriumMethod::interior_formula;
    p.x.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        p.x[i] = total * (1.0 - total * C / (B * q[i]));
        if (p.x[i] < 0.0 || p.x[i] > q[i])
            throw Error(ErrorCode::NotInterior, "interior formula leaves [0, q_i] for agent " + std::to_string(i));
    }
    return p;
}

/// Largest gain over agents of switching to the best of a 1001-point grid on
/// [0, q_i] plus the analytic stationary point.
inline double max_deviation_gain(std::span<const double> q, double B, double C, std::span<const double> x) {
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double others = total - x[i];
        const double current = proportional_utility(q[i], B, C, x[i], others);
        double best = current;
        for (int k = 0; k <= 1000; ++k)
            best = std::max(best, proportional_utility(q[i], B, C, q[i] * k / 1000.0, others));
        if (const double br = best_response(q[i], B, C, others); br >= 0.0)
            best = std::max(best, proportional_utility(q[i], B, C, br, others));
        worst = std::max(worst, best - current);
    }
    return worst;
}

/// Gauss-Seidel best-response iteration.  Starts from the interior formula
/// clipped to [0, q_i]; an agent whose update changes direction twice in a
/// row only moves halfway.  Throws DidNotConverge (carrying the last
/// profile) when max_iter sweeps do not bring the largest move below tol.
inline EquilibriumProfile best_response_dynamics(std::span<const double> q, double B, double C, double tol = 1e-12,
                                                 std::size_t max_iter = 10000) {
    const std::size_t n = q.size();
    if (n < 2)
        throw Error(ErrorCode::TooFewAgents, "the proportional game needs at least two agents");
    if (!(tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tol must be positive");

    EquilibriumProfile p;
    p.method = EquilibriumMethod::best_response;
    p.converged = false;
    p.x.resize(n);
    {
        double inv_sum = 0.0;
        for (double qi : q)
            inv_sum += 1.0 / qi;
        const double total = static_cast<double>(n - 1) * B / (C * inv_sum);
        for (std::size_t i = 0; i < n; ++i)
            p.x[i] = std::clamp(total * (1.0 - total * C / (B * q[i])), 0.0, q[i]);
    }

    std::vector<double> last_step(n, 0.0);
    std::vector<int> flips(n, 0);
    for (p.iterations = 1; p.iterations <= max_iter; ++p.iterations) {
        double total = std::accumulate(p.x.begin(), p.x.end(), 0.0);
        double largest_move = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double others = total - p.x[i];
            double target = best_response(q[i], B, C, others);
            if (target < 0.0)  // everyone else is out: re-enter at an interior point
                target = 0.5 * q[i] * std::min(1.0, B / C);
            double step = target - p.x[i];
            if (step != 0.0 && last_step[i] != 0.0 && (step > 0.0) != (last_step[i] > 0.0))
                ++flips[i];
            else
                flips[i] = 0;
            if (flips[i] >= 2)
                step *= 0.5;
            last_step[i] = step;
            p.x[i] += step;
            total += step;
            largest_move = std::max(largest_move, std::abs(step));
        }
        if (largest_move < tol) {
            p.converged = true;
            break;
        }
    }
    if (!p.converged) {
        p.iterations = max_iter;
        p.max_gain = max_deviation_gain(q, B, C, p.x);
        throw DidNotConverge(std::move(p));
    }
    p.max_gain = max_deviation_gain(q, B, C, p.x);
    return p;
}

/// Equilibrium of the proportional mechanism in sorted agent order: the
/// closed form for two agents when it is interior, best response otherwise.
inline EquilibriumProfile proportional_equilibrium(const MechanismInstance& mech, double tol = 1e-12,
                                                   std::size_t max_iter = 10000) {
    if (mech.size() < 2)
        throw Error(ErrorCode::TooFewAgents, "the proportional game needs at least two agents");
    if (mech.size() == 2) {
        try {
            auto p = equilibrium_2agent(mech.q(0), mech.q(1), mech.B(), mech.C());
            p.max_gain = max_deviation_gain(mech.q(), mech.B(), mech.C(), p.x);
            return p;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotInterior)
                throw;
        }
    }
    return best_response_dynamics(mech.q(), mech.B(), mech.C(), tol, max_iter);
}

struct MechanismComparison {
    EquilibriumProfile proportional;
    double proportional_total = 0.0;
    double optimal_objective = 0.0;
    double ratio = 0.0;
};

inline MechanismComparison compare_mechanisms(const MechanismInstance& mech, double tol = 1e-12,
                                              std::size_t max_iter = 10000) {
    MechanismComparison out;
    out.proportional = proportional_equilibrium(mech, tol, max_iter);
    out.proportional_total = out.proportional.total();
    out.optimal_objective = solve_fast(to_lp(mech)).objective;
    out.ratio = out.proportional_total / out.optimal_objective;
    return out;
}

/// Proportional-equilibrium gross product over the optimal gross product.
inline double efficiency_ratio(const MechanismInstance& mech) { return compare_mechanisms(mech).ratio; }

} // namespace chainlp
