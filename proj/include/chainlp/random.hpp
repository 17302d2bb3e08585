#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string_view>
#include <vector>

#include "chainlp/model.hpp"
#include "chainlp/reduction.hpp"

// Random instance generators shared by the benchmark and the test suites.

namespace chainlp::random {

using Engine = std::mt19937_64;

enum class WeightMode {
    mechanism,  ///< z from the mechanism reduction of random types
    iid,        ///< z_i ~ uniform(0.1, 10)
};

inline WeightMode parse_weight_mode(std::string_view s) {
    if (s == "mechanism")
        return WeightMode::mechanism;
    if (s == "iid")
        return WeightMode::iid;
    throw Error(ErrorCode::InvalidArgument, "unknown weight mode '" + std::string(s) + "'");
}

/// |N(0,1)| draws mapped affinely onto [0.1, 10] (clipped at 4 sigma), sorted.
inline std::vector<double> random_types(std::size_t n, Engine& rng, bool sorted = true) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> q(n);
    for (auto& v : q)
        v = 0.1 + 9.9 * std::min(std::abs(normal(rng)), 4.0) / 4.0;
    if (sorted)
        std::sort(q.begin(), q.end());
    return q;
}

/// K drawn uniformly in (0, sum z_i q_i), so the budget always binds.
inline LpInstance random_lp(std::size_t n, Engine& rng, WeightMode mode = WeightMode::iid) {
    auto q = random_types(n, rng);
    std::vector<double> z;
    if (mode == WeightMode::mechanism) {
        z = budget_weights(q);
    } else {
        std::uniform_real_distribution<double> weight(0.1, 10.0);
        z.resize(n);
        for (auto& v : z)
            v = weight(rng);
    }
    double full = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        full += z[i] * q[i];
    std::uniform_real_distribution<double> share(0.0, 1.0);
    double s = share(rng);
    while (s == 0.0)
        s = share(rng);
    return validate(q, z, s * full);
}

/// Types in caller (unsorted) order, B and C log-uniform in [0.1, 10].
inline MechanismInstance random_mechanism(std::size_t n, Engine& rng) {
    auto q = random_types(n, rng, false);
    std::uniform_real_distribution<double> logu(std::log(0.1), std::log(10.0));
    const double B = std::exp(logu(rng));
    const double C = std::exp(logu(rng));
    return MechanismInstance(q, B, C);
}

} // namespace chainlp::random
