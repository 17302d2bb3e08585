#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainlp/commands.hpp"

namespace cli = chainlp::cli;

int main(int argc, char** argv) {
    CLI::App app{"Chain-ordered LP solvers and optimal reward mechanisms"};
    app.require_subcommand(1);

    std::string algorithm = "fast";
    const std::vector<std::string> algorithms{"greedy", "fast", "oracle"};

    cli::SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file and write a report");
    solve_cmd->add_option("path", solve.path, "Instance file (JSON)")->required();
    solve_cmd->add_option("--algorithm,-a", algorithm, "greedy | fast | oracle")
        ->check(CLI::IsMember(algorithms));
    solve_cmd->add_option("--out,-o", solve.out, "Report path (default: stdout)");
    solve_cmd->add_flag("--timing", solve.timing, "Include solver wall time in the report");

    cli::RewardOptions reward;
    auto* reward_cmd = app.add_subcommand("reward", "Emit the optimal step reward and its incentive check");
    reward_cmd->add_option("path", reward.path, "Mechanism-form instance file (JSON)")->required();
    reward_cmd->add_option("--algorithm,-a", algorithm, "greedy | fast | oracle")
        ->check(CLI::IsMember(algorithms));
    reward_cmd->add_option("--out,-o", reward.out, "Report path (default: stdout)");

    cli::CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "Compare the proportional mechanism with the optimum");
    compare_cmd->add_option("path", compare.path, "Mechanism-form instance file (JSON)")->required();
    compare_cmd->add_option("--out,-o", compare.out, "Report path (default: stdout)");
    compare_cmd->add_option("--tol", compare.tol, "Best-response convergence tolerance")->check(CLI::PositiveNumber);
    compare_cmd->add_option("--max-iter", compare.max_iter, "Best-response sweep limit");

    std::vector<std::string> sizes{"2^10..2^14"};
    std::vector<std::string> bench_algorithms{"fast"};
    std::string weights = "iid";
    cli::BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time solvers on random instances");
    bench_cmd->add_option("--sizes", sizes, "Sizes: N, 2^k or 2^a..2^b")->delimiter(',');
    bench_cmd->add_option("--seed", bench.seed, "Random seed");
    bench_cmd->add_option("--algorithm,-a", bench_algorithms, "Algorithms to time")
        ->delimiter(',')
        ->check(CLI::IsMember(algorithms));
    bench_cmd->add_option("--weights", weights, "mechanism | iid")->check(CLI::IsMember({"mechanism", "iid"}));
    bench_cmd->add_option("--repeats", bench.repeats, "Runs per measurement (median reported)")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--csv", bench.csv, "CSV output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        solve.algorithm = cli::parse_algorithm(algorithm);
        return cli::cmd_solve(solve, std::cout, std::cerr);
    }
    if (reward_cmd->parsed()) {
        reward.algorithm = cli::parse_algorithm(algorithm);
        return cli::cmd_reward(reward, std::cout, std::cerr);
    }
    if (compare_cmd->parsed())
        return cli::cmd_compare(compare, std::cout, std::cerr);

    return cli::guarded(std::cerr, [&] {
        bench.sizes = cli::parse_sizes(sizes);
        bench.algorithms.clear();
        for (const auto& a : bench_algorithms)
            bench.algorithms.push_back(cli::parse_algorithm(a));
        bench.weights = chainlp::random::parse_weight_mode(weights);
        return cli::cmd_bench(bench, std::cout, std::cerr);
    });
}
