#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "chainlp/range_add.hpp"
#include "chainlp/model.hpp"

// O(n log n) solver.
//
// The greedy refreshes y_i many times, but only the value it holds when i is
// finally chosen matters.  That value is avg(i, b(i)) where the blocker b(i)
// is the full index that ends i's run at that moment.  Blockers satisfy
//
//     b(i) = b(b(...b(i+1)))
//
// stopping at the first hop whose own run has a smaller mean than the run
// accumulated so far, so a right-to-left sweep that keeps merging runs while
// the mean does not decrease finds all of them in amortized O(n).
//
// With y fixed up front the greedy's argmin over the shrinking candidate set
// is just ascending (y_i, i) order, and the run raise x[i .. b(i)) += d is a
// range update on a segment tree.

namespace chainlp {

struct BlockerTable {
    /// b[i] in (i, n]; n means "no blocker".
    std::vector<std::size_t> b;
    /// y[i] = avg(i, b[i])
    std::vector<double> y;
    /// Number of merge-loop bodies executed while building the table.
    std::size_t merge_steps = 0;
};

/// Right-to-left sweep using the weighted-average update, no prefix sums.
/// Run means are carried in quad precision and compared after rounding, so
/// runs with equal exact means merge.
inline BlockerTable compute_blockers(std::span<const double> z) {
    const std::size_t n = z.size();
    BlockerTable t;
    t.b.resize(n);
    t.y.resize(n);
    if (n == 0)
        return t;
    std::vector<WideSum> mean(n);
    t.b[n - 1] = n;
    mean[n - 1] = z[n - 1];
    t.y[n - 1] = z[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        std::size_t b = i + 1;
        WideSum y = z[i];
        while (b != n && static_cast<double>(y) <= t.y[b]) {
            const std::size_t next = t.b[b];
            y = (static_cast<WideSum>(b - i) * y + static_cast<WideSum>(next - b) * mean[b]) /
                static_cast<WideSum>(next - i);
            b = next;
            ++t.merge_steps;
        }
        t.b[i] = b;
        mean[i] = y;
        t.y[i] = static_cast<double>(y);
    }
    return t;
}

inline BlockerTable compute_blockers(const LpInstance& inst) { return compute_blockers(inst.z()); }

/// Same sweep, but comparing avg(i, b_i) <= avg(b_i, b_{b_i}) through prefix
/// sums.  Kept as an independent route for cross-checking the update above.
inline BlockerTable compute_blockers(const LpInstance& inst, const PrefixSums& sums) {
    const std::size_t n = inst.size();
    BlockerTable t;
    t.b.resize(n);
    t.y.resize(n);
    t.b[n - 1] = n;
    t.y[n - 1] = sums.avg(n - 1, n);
    for (std::size_t i = n - 1; i-- > 0;) {
        std::size_t b = i + 1;
        while (b != n && sums.avg(i, b) <= sums.avg(b, t.b[b])) {
            b = t.b[b];
            ++t.merge_steps;
        }
        t.b[i] = b;
        t.y[i] = sums.avg(i, b);
    }
    return t;
}

inline Solution solve_fast(const LpInstance& inst, const BlockerTable& blockers, const Tolerances& tol) {
    const std::size_t n = inst.size();

    // Runs [i, b_i) are nested, and a run must be processed before any pivot
    // inside it.  Exactly, y never decreases into a nested run; rounding in
    // y can break that on ties, so each key is lifted to its parent's key.
    std::vector<double> key(blockers.y.begin(), blockers.y.end());
    {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < n; ++i) {
            while (!open.empty() && blockers.b[open.back()] <= i)
                open.pop_back();
            if (!open.empty())
                key[i] = std::max(key[i], key[open.back()]);
            open.push_back(i);
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        return key[a] < key[c] || (key[a] == key[c] && a < c);
    });

    RangeAddArray<double> x(n);
    std::vector<std::size_t> filled;
    double remaining = inst.K();
    for (std::size_t pivot : order) {
        if (!(remaining > tol.eps_zero))
            break;
        const std::size_t right = blockers.b[pivot];
        const double run_cost = static_cast<double>(right - pivot) * blockers.y[pivot];
        const double headroom = inst.q(pivot) - x.point_query(pivot);
        const double by_budget = remaining / run_cost;
        const double d = std::min(by_budget, headroom);
        if (by_budget >= headroom)
            filled.push_back(pivot);
        x.range_add(pivot, right - 1, d);
        remaining -= d * run_cost;
    }
    // A filled pivot sits exactly on its bound; the tree sum may be off by an
    // ulp.  Then project onto 0 <= x_0 <= ... <= x_i <= q_i.
    std::vector<double> values = x.materialize();
    for (std::size_t p : filled)
        values[p] = inst.q(p);
    double floor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = std::min(std::max(values[i], floor), inst.q(i));
        floor = values[i];
    }
    return make_solution(inst, std::move(values));
}

inline Solution solve_fast(const LpInstance& inst, const Tolerances& tol) {
    return solve_fast(inst, compute_blockers(inst), tol);
}

inline Solution solve_fast(const LpInstance& inst) { return solve_fast(inst, Tolerances::for_budget(inst.K())); }

} // namespace chainlp
