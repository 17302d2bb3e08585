#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chainlp/error.hpp"
#include "chainlp/fast_solver.hpp"
#include "chainlp/greedy_solver.hpp"
#include "chainlp/io.hpp"
#include "chainlp/oracle.hpp"
#include "chainlp/proportional.hpp"
#include "chainlp/random.hpp"
#include "chainlp/reduction.hpp"

// Subcommands behind the chainlp executable.  Each returns the process exit
// code and writes diagnostics to `err`.

namespace chainlp::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;        ///< I/O or internal error
inline constexpr int invalid = 2;        ///< instance failed validation
inline constexpr int too_large = 3;      ///< oracle asked for n > 12
inline constexpr int not_converged = 4;  ///< compare: best response did not settle
} // namespace exit_code

enum class Algorithm { greedy, fast, oracle };

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "greedy")
        return Algorithm::greedy;
    if (s == "fast")
        return Algorithm::fast;
    if (s == "oracle")
        return Algorithm::oracle;
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + s + "'");
}

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::greedy: return "greedy";
    case Algorithm::fast: return "fast";
    case Algorithm::oracle: return "oracle";
    }
    return "unknown";
}

/// eps_feas, overridable through CHAINLP_TOL.
inline double feasibility_tolerance() {
    if (const char* env = std::getenv("CHAINLP_TOL"); env && *env) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end && *end == '\0' && v > 0.0 && std::isfinite(v))
            return v;
        throw Error(ErrorCode::InvalidArgument, std::string("CHAINLP_TOL='") + env + "' is not a positive number");
    }
    return 1e-9;
}

/// Solves `inst` with the requested algorithm.  `exact` is only consulted by
/// the oracle and must describe the same instance.
inline Solution run_algorithm(Algorithm algo, const LpInstance& inst, const oracle::RationalInstance* exact,
                              double eps_feas) {
    const auto tol = Tolerances::for_budget(inst.K(), eps_feas);
    switch (algo) {
    case Algorithm::greedy:
        return solve_greedy(inst, tol).solution;
    case Algorithm::fast:
        return solve_fast(inst, tol);
    case Algorithm::oracle: {
        const auto converted = exact ? *exact : oracle::from_lp(inst);
        const auto best = oracle::solve_exact(converted);
        std::vector<double> x;
        for (const auto& v : best.x)
            x.push_back(v.get_d());
        return make_solution(inst, std::move(x));
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

struct SolvedInstance {
    io::InstanceFile file;
    std::optional<MechanismInstance> mech;
    LpInstance lp;
    Solution sorted;           ///< solution in sorted (LP) order
    std::vector<double> x;     ///< solution in caller order
    double seconds = 0.0;
};

inline SolvedInstance load_and_solve(const std::string& path, Algorithm algo, double eps_feas) {
    auto file = io::read_instance(path);
    std::optional<MechanismInstance> mech;
    std::optional<LpInstance> lp;
    std::optional<oracle::RationalInstance> exact;
    if (file.is_mechanism()) {
        const auto& form = std::get<io::MechanismForm>(file.body);
        mech.emplace(io::to_mechanism(form));
        lp.emplace(to_lp(*mech));
        if (algo == Algorithm::oracle)
            exact = io::exact_lp(form, *mech);
    } else {
        const auto& form = std::get<io::LpForm>(file.body);
        lp.emplace(io::to_lp(form));
        if (algo == Algorithm::oracle)
            exact = io::exact_lp(form);
    }

    const auto start = std::chrono::steady_clock::now();
    Solution sol = run_algorithm(algo, *lp, exact ? &*exact : nullptr, eps_feas);
    const auto stop = std::chrono::steady_clock::now();

    // Feasibility gate: nothing is reported that does not re-validate.
    require_feasible(*lp, sol.x, eps_feas);

    std::vector<double> x = mech ? to_caller_order<double>(*mech, sol.x) : sol.x;
    return SolvedInstance{std::move(file), std::move(mech), std::move(*lp), std::move(sol), std::move(x),
                          std::chrono::duration<double>(stop - start).count()};
}

inline io::Json report_header(const SolvedInstance& s, const std::string& command) {
    io::Json instance{{"form", s.mech ? "mechanism" : "lp"}, {"n", s.lp.size()}};
    if (s.file.name)
        instance["name"] = *s.file.name;
    if (s.file.seed)
        instance["seed"] = *s.file.seed;
    return io::Json{{"schema_version", io::schema_version}, {"command", command}, {"instance", std::move(instance)}};
}

inline io::Json solution_json(const SolvedInstance& s) {
    io::Json sol{{"x", io::to_json(s.x)}, {"objective", s.sorted.objective}, {"budget_used", s.sorted.budget_used}};
    if (s.mech)
        sol["reward_spent"] = budget_lhs(*s.mech, s.sorted.x);
    return sol;
}

inline int emit(const io::Json& report, const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (out_path.empty() || out_path == "-") {
        io::write_json(out, report);
        return exit_code::ok;
    }
    std::ofstream f(out_path);
    if (!f) {
        err << "error: cannot write '" << out_path << "'\n";
        return exit_code::failure;
    }
    io::write_json(f, report);
    return f ? exit_code::ok : exit_code::failure;
}

/// Maps library exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const DidNotConverge& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::not_converged;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == ErrorCode::TooLarge)
            return exit_code::too_large;
        return is_validation_error(e.code()) ? exit_code::invalid : exit_code::failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::failure;
    }
}

struct SolveOptions {
    std::string path;
    Algorithm algorithm = Algorithm::fast;
    std::string out;
    bool timing = false;
};

inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double eps = feasibility_tolerance();
        const auto s = load_and_solve(opt.path, opt.algorithm, eps);
        auto report = report_header(s, "solve");
        report["algorithm"] = to_string(opt.algorithm);
        report["solution"] = solution_json(s);
        if (opt.timing)
            report["timing"] = io::Json{{"seconds", s.seconds}};
        return emit(report, opt.out, out, err);
    });
}

struct RewardOptions {
    std::string path;
    Algorithm algorithm = Algorithm::fast;
    std::string out;
};

inline int cmd_reward(const RewardOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double eps = feasibility_tolerance();
        const auto s = load_and_solve(opt.path, opt.algorithm, eps);
        if (!s.mech)
            throw Error(ErrorCode::InvalidArgument, "reward needs a mechanism-form instance {q, B, C}");
        const auto f = build_reward(*s.mech, s.sorted.x, eps);
        const auto check = verify_incentives(f, *s.mech, s.sorted.x, eps);

        auto report = report_header(s, "reward");
        report["algorithm"] = to_string(opt.algorithm);
        report["solution"] = solution_json(s);
        report["reward"] = io::Json{{"breakpoints", io::to_json(f)}, {"incentives", io::to_json(check, *s.mech)}};
        const int rc = emit(report, opt.out, out, err);
        if (rc == exit_code::ok && !check.passed()) {
            err << "error: incentive verification failed\n";
            return exit_code::failure;
        }
        return rc;
    });
}

struct CompareOptions {
    std::string path;
    std::string out;
    double tol = 1e-12;
    std::size_t max_iter = 10000;
};

inline int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double eps = feasibility_tolerance();
        const auto s = load_and_solve(opt.path, Algorithm::fast, eps);
        if (!s.mech)
            throw Error(ErrorCode::InvalidArgument, "compare needs a mechanism-form instance {q, B, C}");

        auto report = report_header(s, "compare");
        report["optimal"] = solution_json(s);
        auto equilibrium_json = [&](const EquilibriumProfile& p) {
            return io::Json{{"method", std::string(to_string(p.method))},
                            {"converged", p.converged},
                            {"iterations", p.iterations},
                            {"max_deviation_gain", p.max_gain},
                            {"x", io::to_json(to_caller_order<double>(*s.mech, p.x))},
                            {"gross_product", p.total()}};
        };
        try {
            const auto p = proportional_equilibrium(*s.mech, opt.tol, opt.max_iter);
            report["proportional"] = equilibrium_json(p);
            report["efficiency_ratio"] = p.total() / s.sorted.objective;
        } catch (const DidNotConverge& e) {
            report["proportional"] = equilibrium_json(e.profile);
            report["efficiency_ratio"] = e.profile.total() / s.sorted.objective;
            emit(report, opt.out, out, err);
            throw;
        }
        return emit(report, opt.out, out, err);
    });
}

/// Parses "1024", "2^10" and power-of-two ranges "2^14..2^20".
inline std::vector<std::size_t> parse_sizes(const std::vector<std::string>& items) {
    auto one = [](const std::string& s) -> std::pair<std::size_t, std::optional<unsigned>> {
        try {
            if (auto caret = s.find('^'); caret != std::string::npos) {
                if (s.substr(0, caret) != "2")
                    throw Error(ErrorCode::InvalidArgument, "only powers of two may use '^': '" + s + "'");
                const unsigned k = static_cast<unsigned>(std::stoul(s.substr(caret + 1)));
                if (k > 40)
                    throw Error(ErrorCode::InvalidArgument, "size '" + s + "' is too large");
                return {std::size_t{1} << k, k};
            }
            std::size_t pos = 0;
            const auto v = std::stoull(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument(s);
            return {static_cast<std::size_t>(v), std::nullopt};
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, "malformed size '" + s + "'");
        }
    };
    std::vector<std::size_t> out;
    for (const auto& item : items) {
        if (auto dots = item.find(".."); dots != std::string::npos) {
            const auto lo = one(item.substr(0, dots));
            const auto hi = one(item.substr(dots + 2));
            if (!lo.second || !hi.second || *lo.second > *hi.second)
                throw Error(ErrorCode::InvalidArgument, "ranges must look like 2^a..2^b with a <= b: '" + item + "'");
            for (unsigned k = *lo.second; k <= *hi.second; ++k)
                out.push_back(std::size_t{1} << k);
        } else {
            out.push_back(one(item).first);
        }
    }
    for (auto n : out)
        if (n == 0)
            throw Error(ErrorCode::InvalidArgument, "sizes must be positive");
    return out;
}

struct BenchOptions {
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::fast};
    random::WeightMode weights = random::WeightMode::iid;
    std::size_t repeats = 1;
    std::string csv;
};

struct BenchRow {
    std::size_t n = 0;
    Algorithm algorithm = Algorithm::fast;
    double seconds = 0.0;
    double objective = 0.0;
};

/// Times every algorithm on one random instance per size; the reported time
/// is the median over `repeats` runs.  Runs are strictly sequential.
inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
    if (opt.repeats == 0)
        throw Error(ErrorCode::InvalidArgument, "repeats must be positive");
    std::vector<BenchRow> rows;
    for (std::size_t s = 0; s < opt.sizes.size(); ++s) {
        random::Engine rng(opt.seed + 0x9e3779b97f4a7c15ULL * (s + 1));
        const auto inst = random::random_lp(opt.sizes[s], rng, opt.weights);
        for (Algorithm algo : opt.algorithms) {
            std::vector<double> times;
            double objective = 0.0;
            for (std::size_t r = 0; r < opt.repeats; ++r) {
                const auto start = std::chrono::steady_clock::now();
                const auto sol = run_algorithm(algo, inst, nullptr, 1e-9);
                const auto stop = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(stop - start).count());
                objective = sol.objective;
            }
            std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
            rows.push_back({opt.sizes[s], algo, times[times.size() / 2], objective});
        }
    }
    return rows;
}

inline void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << "n,algorithm,seconds,objective\n";
    for (const auto& r : rows)
        os << r.n << ',' << to_string(r.algorithm) << ',' << io::format_number(r.seconds) << ','
           << io::format_number(r.objective) << '\n';
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto rows = run_bench(opt);
        if (opt.csv.empty() || opt.csv == "-") {
            write_csv(out, rows);
            return exit_code::ok;
        }
        std::ofstream f(opt.csv);
        if (!f) {
            err << "error: cannot write '" << opt.csv << "'\n";
            return exit_code::failure;
        }
        write_csv(f, rows);
        for (const auto& r : rows)
            out << "n=" << r.n << ' ' << to_string(r.algorithm) << ' ' << io::format_number(r.seconds) << "s objective "
                << io::format_number(r.objective) << '\n';
        return exit_code::ok;
    });
}

} // namespace chainlp::cli
