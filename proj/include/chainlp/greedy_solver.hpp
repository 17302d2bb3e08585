#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "chainlp/error.hpp"
#include "chainlp/model.hpp"

// Quadratic reference solver.
//
// The set S of "full" indices starts empty (the sentinels -1 and n are
// implicit).  Every iteration picks the non-full index with the smallest
// (y_i, i), where y_i is the mean weight of the run [i, right(i)) up to the
// next full index, and raises that whole run together until either x_i hits
// q_i or the budget runs out.  The indices left of the pivot then see a
// shorter run, so their y values are refreshed.
//
// This is the correctness reference for the fast solver; every iteration is
// recorded so tests can inspect the run structure.

namespace chainlp {

struct GreedyStep {
    std::size_t pivot = 0;      ///< the chosen index
    std::ptrdiff_t left = -1;   ///< nearest full index below the pivot, -1 if none
    std::size_t right = 0;      ///< nearest full index above the pivot, n if none
    double increment = 0.0;     ///< amount added to x[pivot .. right)
    double remaining_after = 0.0;
};

struct GreedyState {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<bool> in_set;
    double remaining = 0.0;
    std::vector<GreedyStep> trace;
};

/// argmin over i not in S of (y_i, i); ties go to the smallest index.
inline std::size_t select_next(const GreedyState& state) {
    std::size_t best = state.y.size();
    for (std::size_t i = 0; i < state.y.size(); ++i) {
        if (state.in_set[i])
            continue;
        if (best == state.y.size() || state.y[i] < state.y[best])
            best = i;
    }
    if (best == state.y.size())
        throw Error(ErrorCode::NoCandidate, "every index is already full");
    return best;
}

struct GreedyResult {
    Solution solution;
    std::vector<GreedyStep> trace;
};

using GreedyObserver = std::function<void(const GreedyState&)>;

/// Runs the greedy to completion.  `observer`, when set, is called with the
/// full state after every iteration.
inline GreedyResult solve_greedy(const LpInstance& inst, const Tolerances& tol, const GreedyObserver& observer = {}) {
    const std::size_t n = inst.size();
    const PrefixSums sums(inst);
    const auto cum = sums.cumulative();
    auto avg = [&](std::size_t i, std::size_t j) {
        return static_cast<double>((cum[j] - cum[i]) / static_cast<WideSum>(j - i));
    };

    GreedyState st;
    st.x.assign(n, 0.0);
    st.y.resize(n);
    st.in_set.assign(n, false);
    st.remaining = inst.K();
    for (std::size_t i = 0; i < n; ++i)
        st.y[i] = avg(i, n);

    // One entry per gap between consecutive full indices: the gap's best
    // candidate (y, i) together with the gap bounds (left, right).  The
    // global argmin is then the smallest entry.
    using Candidate = std::tuple<double, std::size_t, std::ptrdiff_t, std::size_t>;
    std::set<Candidate> gaps;
    auto push_gap = [&](std::ptrdiff_t left, std::size_t right) {
        const std::size_t first = static_cast<std::size_t>(left + 1);
        if (first >= right)
            return;
        std::size_t best = first;
        for (std::size_t i = first + 1; i < right; ++i)
            if (st.y[i] < st.y[best])
                best = i;
        gaps.emplace(st.y[best], best, left, right);
    };
    push_gap(-1, n);

    while (st.remaining > tol.eps_zero && !gaps.empty()) {
        const auto [y_pivot, pivot, left, right] = *gaps.begin();
        gaps.erase(gaps.begin());

        const double run_cost = static_cast<double>(right - pivot) * y_pivot;
        const double headroom = inst.q(pivot) - st.x[pivot];
        const double by_budget = st.remaining / run_cost;
        const double d = std::min(by_budget, headroom);
        st.remaining -= d * run_cost;
        // The run shares one value, so assign it; a filled pivot lands on q exactly.
        const double level = by_budget < headroom ? st.x[pivot] + d : inst.q(pivot);
        for (std::size_t i = pivot; i < right; ++i)
            st.x[i] = level;
        for (std::size_t i = static_cast<std::size_t>(left + 1); i < pivot; ++i)
            st.y[i] = avg(i, pivot);
        st.in_set[pivot] = true;

        push_gap(left, pivot);
        push_gap(static_cast<std::ptrdiff_t>(pivot), right);
        st.trace.push_back({pivot, left, right, d, st.remaining});
        if (observer)
            observer(st);
    }

    GreedyResult result{make_solution(inst, std::move(st.x)), std::move(st.trace)};
    return result;
}

inline GreedyResult solve_greedy(const LpInstance& inst) {
    return solve_greedy(inst, Tolerances::for_budget(inst.K()));
}

} // namespace chainlp
