// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chainlp/chainlp.hpp"
#include "chainlp/oracle.hpp"
#include "chainlp/random.hpp"
#include "support.hpp"

using namespace chainlp;
using oracle::Rational;
using support::close_rel;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool passed = true;
    std::string detail;
    std::string first_failure;

    void fail(const std::string& why) {
        if (passed)
            first_failure = why;
        passed = false;
    }
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct ExactAverages {
    explicit ExactAverages(std::span<const double> z) : prefix(z.size() + 1) {
        for (std::size_t i = 0; i < z.size(); ++i)
            prefix[i + 1] = prefix[i] + Rational(z[i]);
    }
    Rational operator()(std::size_t i, std::size_t j) const {
        return (prefix[j] - prefix[i]) / Rational(static_cast<unsigned long>(j - i));
    }
    std::vector<Rational> prefix;
};

/// Blockers straight from their definition: run the greedy in exact
/// arithmetic with an unlimited budget and record, for every i, the pivot of
/// the last refresh of y_i (n when y_i is never refreshed).
std::vector<std::size_t> blockers_by_definition(std::span<const double> z) {
    const std::size_t n = z.size();
    const ExactAverages avg(z);
    std::vector<Rational> y(n);
    std::vector<std::size_t> last(n, n);
    std::vector<bool> in_set(n, false);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = avg(i, n);
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t pivot = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_set[i] && (pivot == n || y[i] < y[pivot]))
                pivot = i;
        std::ptrdiff_t left = static_cast<std::ptrdiff_t>(pivot) - 1;
        while (left >= 0 && !in_set[static_cast<std::size_t>(left)])
            --left;
        for (auto i = static_cast<std::size_t>(left + 1); i < pivot; ++i) {
            y[i] = avg(i, pivot);
            last[i] = pivot;
        }
        in_set[pivot] = true;
    }
    return last;
}

LpInstance with_budget(const LpInstance& inst, double K) { return validate(inst.q(), inst.z(), K); }

double full_cost(const LpInstance& inst) {
    double c = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i)
        c += inst.z(i) * inst.q(i);
    return c;
}

random::WeightMode mode_for(int k) { return k % 2 ? random::WeightMode::iid : random::WeightMode::mechanism; }

// 1. Greedy, fast and exact oracle agree on small rational instances.
Outcome oracle_equivalence() {
    Outcome o;
    const auto start = Clock::now();
    random::Engine rng(1001);
    double worst = 0.0;
    const int count = 1000;
    for (int k = 0; k < count; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 7);
        const auto inst = support::random_small_instance(n, rng);
        const auto exact = oracle::solve_exact(inst.exact);
        if (!oracle::is_feasible(inst.exact, exact.x))
            o.fail(fmt("instance %d: oracle point infeasible", k));
        const double ref = exact.objective.get_d();
        const auto g = solve_greedy(inst.lp).solution;
        const auto f = solve_fast(inst.lp);
        for (const auto* s : {&g, &f}) {
            const double err = std::abs(s->objective - ref) / std::max(std::abs(ref), 1e-300);
            worst = std::max(worst, ref == 0.0 ? std::abs(s->objective) : err);
            if (!close_rel(s->objective, ref, 1e-9) && !(ref == 0.0 && s->objective == 0.0))
                o.fail(fmt("instance %d (n=%zu): objective %.17g vs exact %.17g", k, n, s->objective, ref));
            if (auto why = feasibility_violation(inst.lp, s->x, 1e-9); !why.empty())
                o.fail(fmt("instance %d: %s", k, why.c_str()));
        }
    }
    const double t = seconds_since(start);
    if (t >= 120.0)
        o.fail(fmt("took %.1f s (limit 120 s)", t));
    o.detail = fmt("%d instances, n in 1..7, max rel objective error %.2e, %.1f s", count, worst, t);
    return o;
}

// 2. Fast equals greedy elementwise at large n.
Outcome differential_equivalence() {
    Outcome o;
    const auto start = Clock::now();
    random::Engine rng(2002);
    struct Tier {
        std::size_t n;
        int count;
    };
    const Tier tiers[] = {{1000, 120}, {10000, 60}, {100000, 20}};
    double worst = 0.0;
    int done = 0;
    for (const auto& tier : tiers) {
        for (int k = 0; k < tier.count; ++k, ++done) {
            const auto inst = random::random_lp(tier.n, rng, mode_for(k));
            const auto g = solve_greedy(inst).solution;
            const auto f = solve_fast(inst);
            for (std::size_t i = 0; i < tier.n; ++i) {
                const double a = g.x[i], b = f.x[i];
                const double scale = std::max(std::abs(a), std::abs(b));
                if (scale > 0.0)
                    worst = std::max(worst, std::abs(a - b) / scale);
                if (!close_rel(a, b, 1e-9)) {
                    o.fail(fmt("n=%zu instance %d index %zu: greedy %.17g fast %.17g", tier.n, k, i, a, b));
                    break;
                }
            }
        }
    }
    const double t = seconds_since(start);
    if (t >= 600.0)
        o.fail(fmt("took %.1f s (limit 600 s)", t));
    o.detail = fmt("%d instances (120 x 1e3, 60 x 1e4, 20 x 1e5), max rel elementwise diff %.2e, %.1f s", done, worst,
                   t);
    return o;
}

// 3. Two-agent family q = (eps, 1 - eps), B = C = 1.
Outcome proportional_gap() {
    Outcome o;
    std::ostringstream detail;
    for (double eps : {0.1, 0.01, 0.001}) {
        const MechanismInstance mech({eps, 1.0 - eps}, 1.0, 1.0);
        const auto cmp = compare_mechanisms(mech);
        const double gross = cmp.proportional_total;
        // Independent route: best-response iteration instead of the closed form.
        const auto br = best_response_dynamics(mech.q(), 1.0, 1.0, 1e-14);
        if (std::abs(gross - eps * (1 - eps)) > 1e-9)
            o.fail(fmt("eps=%g: gross product %.17g, expected %.17g", eps, gross, eps * (1 - eps)));
        if (std::abs(br.total() - eps * (1 - eps)) > 1e-9)
            o.fail(fmt("eps=%g: best-response gross product %.17g", eps, br.total()));
        if (std::abs(cmp.ratio - eps) > 1e-9)
            o.fail(fmt("eps=%g: ratio %.17g", eps, cmp.ratio));
        if (std::abs(cmp.optimal_objective - (1 - eps)) > 1e-12)
            o.fail(fmt("eps=%g: optimum %.17g, expected %.17g", eps, cmp.optimal_objective, 1 - eps));
        detail << fmt("eps=%g ratio=%.12g; ", eps, cmp.ratio);
    }
    o.detail = detail.str();
    return o;
}

// 4. Every output spends the whole budget or fills every bound.
Outcome budget_or_full() {
    Outcome o;
    random::Engine rng(4004);
    std::uniform_int_distribution<int> size(1, 300);
    const int count = 10000;
    int full_cases = 0;
    for (int k = 0; k < count; ++k) {
        auto inst = random::random_lp(static_cast<std::size_t>(size(rng)), rng, mode_for(k));
        if (k % 10 == 0)
            inst = with_budget(inst, 1.5 * full_cost(inst));
        const double slack = 1e-9 * std::max(inst.K(), 1.0);
        const auto g = solve_greedy(inst).solution;
        const auto f = solve_fast(inst);
        for (const auto* s : {&g, &f}) {
            double used = 0.0;
            bool full = true;
            for (std::size_t i = 0; i < inst.size(); ++i) {
                used += inst.z(i) * s->x[i];
                full = full && s->x[i] == inst.q(i);
            }
            full_cases += full;
            if (!(std::abs(used - inst.K()) <= slack || full))
                o.fail(fmt("instance %d: spend %.17g of K=%.17g and not full", k, used, inst.K()));
        }
    }
    o.detail = fmt("%d instances x 2 solvers, %d full-profile outputs, 0 allowed violations", count, full_cases);
    return o;
}

// 5. The reward built for each optimum implements it within budget.
Outcome reward_sufficiency() {
    Outcome o;
    random::Engine rng(5005);
    std::uniform_int_distribution<int> size(1, 100);
    const int count = 1000;
    double worst_budget = 0.0;
    for (int k = 0; k < count; ++k) {
        const auto mech = random::random_mechanism(static_cast<std::size_t>(size(rng)), rng);
        const auto lp = to_lp(mech);
        for (const auto& x : {solve_greedy(lp).solution.x, solve_fast(lp).x}) {
            try {
                const auto f = build_reward(mech, x);
                const auto r = verify_incentives(f, mech, x);
                worst_budget = std::max(worst_budget, r.total_reward / mech.B());
                if (!r.passed())
                    o.fail(fmt("mechanism %d: incentive check failed", k));
                if (r.total_reward > mech.B() * (1 + 1e-9))
                    o.fail(fmt("mechanism %d: rewards %.17g exceed B=%.17g", k, r.total_reward, mech.B()));
            } catch (const Error& e) {
                o.fail(fmt("mechanism %d: %s", k, e.what()));
            }
        }
    }
    o.detail = fmt("%d mechanisms x 2 solvers, max sum f / B = %.15f", count, worst_budget);
    return o;
}

// 6. Blocker recurrence, trace boundaries, processing order and the run
//    average inequalities, all compared in exact arithmetic.
Outcome blocker_structure() {
    Outcome o;
    const auto start = Clock::now();
    random::Engine rng(6006);
    std::uniform_int_distribution<int> size(1, 200);
    const int count = 1000;
    std::size_t definition_checked = 0, iterations = 0;
    for (int k = 0; k < count && o.passed; ++k) {
        const auto base = random::random_lp(static_cast<std::size_t>(size(rng)), rng, mode_for(k));
        const std::size_t n = base.size();
        const auto t = compute_blockers(base);
        const ExactAverages avg(base.z());

        // b(i) is on the blocker chain from i+1, with the two inequalities.
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t hop = i + 1;
            while (hop != t.b[i]) {
                if (hop >= n || hop > t.b[i]) {
                    o.fail(fmt("instance %d: b(%zu)=%zu not on the chain from %zu", k, i, t.b[i], i + 1));
                    break;
                }
                if (!(avg(i, hop) <= avg(hop, t.b[hop])))
                    o.fail(fmt("instance %d: merge inequality fails at i=%zu hop=%zu", k, i, hop));
                hop = t.b[hop];
            }
            if (hop == t.b[i] && hop < n && !(avg(i, hop) > avg(hop, t.b[hop])))
                o.fail(fmt("instance %d: stop inequality fails at i=%zu b=%zu", k, i, hop));
        }
        if (t.merge_steps > 2 * n)
            o.fail(fmt("instance %d: %zu merge steps for n=%zu", k, t.merge_steps, n));
        if (n <= 60) {
            if (blockers_by_definition(base.z()) != t.b)
                o.fail(fmt("instance %d: blockers differ from the exact greedy definition", k));
            ++definition_checked;
        }

        for (const auto& inst : {base, with_budget(base, 2.0 * full_cost(base))}) {
            const auto trace = solve_greedy(inst).trace;
            std::vector<std::size_t> pos(n, n + 1);
            for (std::size_t s = 0; s < trace.size(); ++s) {
                const auto& step = trace[s];
                ++iterations;
                pos[step.pivot] = s;
                if (step.right != t.b[step.pivot])
                    o.fail(fmt("instance %d: pivot %zu has right %zu but b=%zu", k, step.pivot, step.right,
                               t.b[step.pivot]));
                const std::size_t p = step.pivot, R = t.b[p];
                for (std::size_t i = p + 1; i < R; ++i)
                    if (!(avg(p, i) <= avg(i, R)))
                        o.fail(fmt("instance %d: avg(%zu,%zu) > avg(%zu,%zu)", k, p, i, i, R));
                for (auto i = static_cast<std::size_t>(step.left + 1); i < p; ++i)
                    if (!(avg(i, R) < avg(i, p)))
                        o.fail(fmt("instance %d: avg(%zu,%zu) >= avg(%zu,%zu)", k, i, R, i, p));
            }
            // Order: b(i) before i, and i before everything inside its run.
            for (std::size_t i = 0; i < n; ++i) {
                if (pos[i] > n)
                    continue;
                if (t.b[i] < n && pos[t.b[i]] > pos[i])
                    o.fail(fmt("instance %d: pivot %zu precedes its blocker %zu", k, i, t.b[i]));
                for (std::size_t j = i + 1; j < t.b[i]; ++j)
                    if (pos[j] < pos[i])
                        o.fail(fmt("instance %d: pivot %zu precedes %zu", k, j, i));
            }
        }
    }
    o.detail = fmt("%d instances (n <= 200), %zu greedy iterations, %zu checked against the exact definition, %.1f s",
                   count, iterations, definition_checked, seconds_since(start));
    return o;
}

// 7. Fast solver scales log-linearly.
Outcome runtime_scaling() {
    Outcome o;
    auto median_time = [](std::size_t n, std::size_t& merges) {
        random::Engine rng(7007 + n);
        const auto inst = random::random_lp(n, rng);
        merges = compute_blockers(inst).merge_steps;
        std::vector<double> times;
        for (int r = 0; r < 5; ++r) {
            const auto start = Clock::now();
            const auto sol = solve_fast(inst);
            times.push_back(seconds_since(start));
            if (sol.objective <= 0.0)
                return -1.0;
        }
        std::sort(times.begin(), times.end());
        return times[2];
    };
    std::size_t m_small = 0, m_large = 0;
    const std::size_t small = std::size_t{1} << 17, large = std::size_t{1} << 20;
    const double t_small = median_time(small, m_small);
    const double t_large = median_time(large, m_large);
    const double ratio = t_large / t_small;
    if (!(ratio < 16.0))
        o.fail(fmt("t(2^20)/t(2^17) = %.2f", ratio));
    if (m_small > 2 * small || m_large > 2 * large)
        o.fail("blocker merge count exceeds 2n");
    o.detail = fmt("t(2^17)=%.4f s, t(2^20)=%.4f s, ratio %.2f (limit 16), merges/n %.3f", t_small, t_large, ratio,
                   static_cast<double>(m_large) / static_cast<double>(large));
    return o;
}

// 8. Range-add tree against a plain array.
Outcome range_add_correctness() {
    Outcome o;
    std::mt19937_64 rng(8008);
    const std::size_t n = 1000;
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    const int ops = 10000;

    RangeAddArray<std::int64_t> ti(n);
    std::vector<std::int64_t> ni(n, 0);
    std::uniform_int_distribution<std::int64_t> di(-1000000, 1000000);
    // Positive deltas keep the float reference free of cancellation, so a
    // relative bound is meaningful.
    RangeAddArray<double> tf(n);
    std::vector<long double> nf(n, 0.0L);
    std::uniform_real_distribution<double> df(0.0, 1000.0);
    double worst = 0.0;
    for (int op = 0; op < ops; ++op) {
        if (op % 2 == 0) {
            auto i = idx(rng), j = idx(rng);
            if (i > j)
                std::swap(i, j);
            const auto d = di(rng);
            const double e = df(rng);
            ti.range_add(i, j, d);
            tf.range_add(i, j, e);
            for (auto k = i; k <= j; ++k) {
                ni[k] += d;
                nf[k] += e;
            }
        } else {
            const auto k = idx(rng);
            if (ti.point_query(k) != ni[k])
                o.fail(fmt("integer mismatch at op %d index %zu", op, k));
            const double ref = static_cast<double>(nf[k]);
            const double got = tf.point_query(k);
            if (ref != 0.0)
                worst = std::max(worst, std::abs(got - ref) / ref);
            if (!close_rel(got, ref, 1e-12))
                o.fail(fmt("float mismatch at op %d index %zu: %.17g vs %.17g", op, k, got, ref));
        }
    }
    if (ti.materialize() != ni)
        o.fail("integer materialize mismatch");
    o.detail = fmt("%d ops on n=%zu, integer exact, float max rel err %.2e", ops, n, worst);
    return o;
}

// 9. Hand-traced examples, each value first confirmed exactly.
Outcome worked_examples() {
    Outcome o;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok)
            o.fail(what);
    };
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };

    // Equal pair: q = [0.5, 0.5], B = C = 1.
    {
        const MechanismInstance mech({0.5, 0.5}, 1.0, 1.0);
        const auto lp = to_lp(mech);
        expect(lp.z(0) == 2.0 && lp.z(1) == 2.0 && lp.K() == 1.0, "pair: z or K");
        const auto exact = oracle::solve_exact(oracle::from_lp(lp));
        expect(exact.objective == Rational(1, 2) && exact.x == oracle::Point{Rational(1, 4), Rational(1, 4)},
               "pair: oracle optimum");
        for (const auto& x : {solve_greedy(lp).solution.x, solve_fast(lp).x})
            expect(near(x[0], 0.25) && near(x[1], 0.25), "pair: solver x");
        const std::vector<double> high_only{0.0, 0.5};
        const auto f = build_reward(mech, high_only);
        expect(f.breakpoints().size() == 1 && near(f.breakpoints()[0].threshold, 0.5) &&
                   near(f.breakpoints()[0].level, 1.0),
               "pair: breakpoint (0.5, 1)");
        expect(verify_incentives(f, mech, high_only).passed(), "pair: incentives");
        const auto p = equilibrium_2agent(0.5, 0.5, 1.0, 1.0);
        expect(near(p.x[0], 0.125) && near(p.x[1], 0.125), "pair: proportional equilibrium");
    }

    // Three types: q = [1, 2, 4], z = [2, 3/4, 1/4], K = 2.
    {
        const auto lp = validate({1.0, 2.0, 4.0}, {2.0, 0.75, 0.25}, 2.0);
        const oracle::RationalInstance exact_inst{
            {1, 2, 4}, oracle::budget_weights(std::vector<Rational>{1, 2, 4}), 2};
        expect(exact_inst.z == std::vector<Rational>{2, Rational(3, 4), Rational(1, 4)}, "three: exact weights");
        const auto exact = oracle::solve_exact(exact_inst);
        const oracle::Point x_star{0, Rational(4, 3), 4};
        expect(exact.x == x_star && exact.objective == Rational(16, 3), "three: oracle optimum");
        // Exact telescoping levels C * sum (x_j - x_{j-1}) / q_j.
        std::vector<Rational> levels;
        Rational level = 0, prev = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            level += (x_star[i] - prev) / exact_inst.q[i];
            prev = x_star[i];
            if (sgn(x_star[i]) > 0)
                levels.push_back(level);
        }
        expect(levels == std::vector<Rational>{Rational(2, 3), Rational(4, 3)}, "three: exact levels");

        const auto g = solve_greedy(lp);
        const auto f = solve_fast(lp);
        for (const auto& x : {g.solution.x, f.x})
            expect(near(x[0], 0.0) && near(x[1], 4.0 / 3.0) && near(x[2], 4.0), "three: solver x");
        expect(g.trace.size() == 2 && g.trace[0].pivot == 2 && g.trace[1].pivot == 1, "three: pivot order");
        const MechanismInstance mech({1.0, 2.0, 4.0}, 2.0, 1.0);
        expect(near(budget_lhs(mech, f.x), 2.0), "three: budget_lhs");
        const auto reward = build_reward(mech, f.x);
        const auto bp = reward.breakpoints();
        expect(bp.size() == 2 && near(bp[0].threshold, 4.0 / 3.0) && near(bp[0].level, levels[0].get_d()) &&
                   near(bp[1].threshold, 4.0) && near(bp[1].level, levels[1].get_d()),
               "three: breakpoints");
        expect(verify_incentives(reward, mech, f.x).passed(), "three: incentives");
    }

    // Increasing weights z = [1, 2, 3]: everything blocks at the end.
    {
        const std::vector<double> z{1.0, 2.0, 3.0};
        const auto def = blockers_by_definition(z);
        expect(def == std::vector<std::size_t>{3, 3, 3}, "blockers: exact definition");
        const ExactAverages avg(z);
        const std::vector<Rational> y_exact{avg(0, 3), avg(1, 3), avg(2, 3)};
        expect(y_exact == std::vector<Rational>{2, Rational(5, 2), 3}, "blockers: exact averages");
        for (const auto& t : {compute_blockers(z), compute_blockers(validate({1.0, 1.0, 1.0}, z, 1.0),
                                                                    PrefixSums(z))}) {
            expect(t.b == def, "blockers: b");
            for (std::size_t i = 0; i < 3; ++i)
                expect(near(t.y[i], y_exact[i].get_d()), "blockers: y");
        }
    }
    o.detail = "equal pair, three-type trace and rewards, increasing-weight blockers";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"fast/greedy differential", differential_equivalence},
        {"proportional efficiency gap", proportional_gap},
        {"budget-or-full termination", budget_or_full},
        {"reward sufficiency", reward_sufficiency},
        {"blocker structure", blocker_structure},
        {"runtime scaling", runtime_scaling},
        {"range-add tree", range_add_correctness},
        {"worked examples", worked_examples},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s  [%d] %s: %s\n", o.passed ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
        if (!o.passed) {
            std::printf("        first failure: %s\n", o.first_failure.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
