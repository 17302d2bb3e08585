#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "chainlp/model.hpp"
#include "chainlp/oracle.hpp"
#include "chainlp/random.hpp"
#include "chainlp/reduction.hpp"

namespace chainlp::support {

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

/// Small random LP whose data are exactly representable both as doubles and
/// as short rationals: dyadic values, or weights from the mechanism
/// reduction converted exactly from their double values.
struct SmallInstance {
    LpInstance lp;
    oracle::RationalInstance exact;
};

inline SmallInstance random_small_instance(std::size_t n, random::Engine& rng) {
    std::uniform_int_distribution<int> numer(1, 64);
    std::uniform_int_distribution<int> flavour(0, 3);
    std::vector<double> q(n), z(n);
    for (auto& v : q)
        v = numer(rng) / 8.0;
    std::sort(q.begin(), q.end());
    if (flavour(rng) == 0) {
        z = budget_weights(q);
    } else {
        for (auto& v : z)
            v = numer(rng) / 16.0;
    }
    // Occasionally force ties in q or in z, which exercise the tie-breaks.
    if (n >= 2 && flavour(rng) == 1)
        q[n - 1] = q[n - 2];
    if (n >= 2 && flavour(rng) == 2)
        z[0] = z[1];
    double full = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        full += z[i] * q[i];
    std::uniform_int_distribution<int> share(1, 256);
    const double K = full * share(rng) / 256.0;
    auto lp = validate(q, z, K);
    auto exact = oracle::from_lp(lp);
    return {std::move(lp), std::move(exact)};
}

} // namespace chainlp::support
