#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainlp/error.hpp"
#include "chainlp/model.hpp"

// Exact ground truth for small instances.
//
// The feasible set is a bounded polytope described by 2n+1 inequalities
//
//     x_i <= q_i                       (n bound rows)
//     x_{i-1} <= x_i,  x_{-1} := 0     (n chain rows)
//     sum_i z_i x_i <= K               (1 budget row)
//
// so the optimum sits on a vertex.  Every n-subset of rows is solved as an
// equality system in exact rationals; nonsingular solutions that satisfy all
// rows are the vertices.  This knows nothing about the greedy structure.

namespace chainlp::oracle {

using Rational = mpq_class;
using Point = std::vector<Rational>;

inline constexpr std::size_t max_size = 12;

struct RationalInstance {
    std::vector<Rational> q;
    std::vector<Rational> z;
    Rational K;
};

/// Parses "p/q", an integer, or a plain decimal such as "0.125" exactly.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty())
        throw Error(ErrorCode::InvalidArgument, "empty rational literal");
    const auto dot = s.find('.');
    const auto exp = s.find_first_of("eE");
    if (dot == std::string::npos && exp == std::string::npos) {
        Rational r;
        if (r.set_str(s, 10) != 0)
            throw Error(ErrorCode::InvalidArgument, "malformed rational literal '" + s + "'");
        if (r.get_den() == 0)
            throw Error(ErrorCode::InvalidArgument, "zero denominator in '" + s + "'");
        r.canonicalize();
        return r;
    }
    // Decimal with optional exponent: mantissa digits over a power of ten.
    std::string mantissa = exp == std::string::npos ? s : s.substr(0, exp);
    long exponent = 0;
    if (exp != std::string::npos) {
        try {
            exponent = std::stol(s.substr(exp + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "malformed exponent in '" + s + "'");
        }
    }
    if (const auto d = mantissa.find('.'); d != std::string::npos) {
        exponent -= static_cast<long>(mantissa.size() - d - 1);
        mantissa.erase(d, 1);
    }
    mpz_class digits;
    if (mantissa.empty() || mantissa == "-" || mantissa == "+" || digits.set_str(mantissa, 10) != 0)
        throw Error(ErrorCode::InvalidArgument, "malformed decimal literal '" + s + "'");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational r = exponent < 0 ? Rational(digits, scale) : Rational(digits * scale);
    r.canonicalize();
    return r;
}

/// Binary doubles are rationals; the conversion is exact.
inline RationalInstance from_lp(const LpInstance& inst) {
    RationalInstance r;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        r.q.emplace_back(inst.q(i));
        r.z.emplace_back(inst.z(i));
    }
    r.K = Rational(inst.K());
    return r;
}

inline LpInstance to_lp(const RationalInstance& inst) {
    std::vector<double> q, z;
    for (const auto& v : inst.q)
        q.push_back(v.get_d());
    for (const auto& v : inst.z)
        z.push_back(v.get_d());
    return validate(q, z, inst.K.get_d());
}

/// Exact budget weights of the mechanism reduction for sorted types q.
inline std::vector<Rational> budget_weights(std::span<const Rational> q) {
    const std::size_t n = q.size();
    std::vector<Rational> z(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        z[i] = Rational(static_cast<unsigned long>(n - 1 - i)) * (1 / q[i] - 1 / q[i + 1]) + 1 / q[i];
    if (n > 0)
        z[n - 1] = 1 / q[n - 1];
    return z;
}

inline void check_instance(const RationalInstance& inst) {
    if (inst.q.empty())
        throw Error(ErrorCode::EmptyInstance, "instance has no variables");
    if (inst.q.size() != inst.z.size())
        throw Error(ErrorCode::DimensionMismatch, "q and z differ in length");
    for (std::size_t i = 0; i < inst.q.size(); ++i) {
        if (sgn(inst.q[i]) <= 0)
            throw Error(ErrorCode::NonPositiveBound, "q[" + std::to_string(i) + "] must be positive");
        if (i > 0 && inst.q[i] < inst.q[i - 1])
            throw Error(ErrorCode::UnsortedBounds, "q[" + std::to_string(i) + "] < q[" + std::to_string(i - 1) + "]");
        if (sgn(inst.z[i]) <= 0)
            throw Error(ErrorCode::NonPositiveWeight, "z[" + std::to_string(i) + "] must be positive");
    }
    if (sgn(inst.K) < 0)
        throw Error(ErrorCode::NegativeBudget, "K must be non-negative");
    if (inst.q.size() > max_size)
        throw Error(ErrorCode::TooLarge,
                    "vertex enumeration is limited to n <= " + std::to_string(max_size) + ", got " +
                        std::to_string(inst.q.size()));
}

/// True when x satisfies every inequality exactly.
inline bool is_feasible(const RationalInstance& inst, std::span<const Rational> x) {
    if (x.size() != inst.q.size())
        return false;
    Rational used = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > inst.q[i])
            return false;
        if (x[i] < (i == 0 ? Rational(0) : x[i - 1]))
            return false;
        used += inst.z[i] * x[i];
    }
    return used <= inst.K;
}

namespace detail {

// Row r of the constraint system as an equality: coefficients and rhs.
//   r <  n        : x_r = q_r
//   n <= r < 2n   : x_k - x_{k-1} = 0 (k = r - n; for k = 0 just x_0 = 0)
//   r == 2n       : z . x = K
inline void fill_row(const RationalInstance& inst, std::size_t r, std::vector<Rational>& row) {
    const std::size_t n = inst.q.size();
    for (auto& v : row)
        v = 0;
    if (r < n) {
        row[r] = 1;
        row[n] = inst.q[r];
    } else if (r < 2 * n) {
        const std::size_t k = r - n;
        row[k] = 1;
        if (k > 0)
            row[k - 1] = -1;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            row[i] = inst.z[i];
        row[n] = inst.K;
    }
}

// Gauss-Jordan elimination on an n x (n+1) augmented matrix.  Returns false
// when the system is singular.  Zero entries are skipped, which matters
// because most rows have one or two nonzeros.
inline bool solve_system(std::vector<std::vector<Rational>>& m, Point& out) {
    const std::size_t n = m.size();
    Rational factor;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && sgn(m[pivot][col]) == 0)
            ++pivot;
        if (pivot == n)
            return false;
        std::swap(m[pivot], m[col]);
        if (m[col][col] != 1) {
            const Rational inv = 1 / m[col][col];
            for (std::size_t c = col; c <= n; ++c)
                if (sgn(m[col][c]) != 0)
                    m[col][c] *= inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(m[r][col]) == 0)
                continue;
            factor = m[r][col];
            for (std::size_t c = col; c <= n; ++c)
                if (sgn(m[col][c]) != 0)
                    m[r][c] -= factor * m[col][c];
        }
    }
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = m[i][n];
    return true;
}

} // namespace detail

/// Every feasible vertex, each exactly once, in lexicographic order.
inline std::vector<Point> enumerate_candidates(const RationalInstance& inst) {
    check_instance(inst);
    const std::size_t n = inst.q.size();
    const std::size_t rows = 2 * n + 1;

    std::vector<Point> vertices;
    std::vector<std::size_t> pick(n);
    for (std::size_t k = 0; k < n; ++k)
        pick[k] = k;
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
    Point x;
    for (;;) {
        for (std::size_t k = 0; k < n; ++k)
            detail::fill_row(inst, pick[k], m[k]);
        if (detail::solve_system(m, x) && is_feasible(inst, x))
            vertices.push_back(x);

        // next n-combination of {0, ..., rows-1}
        std::size_t k = n;
        while (k > 0 && pick[k - 1] == rows - n + (k - 1))
            --k;
        if (k == 0)
            break;
        ++pick[k - 1];
        for (std::size_t j = k; j < n; ++j)
            pick[j] = pick[j - 1] + 1;
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    return vertices;
}

struct ExactSolution {
    Point x;
    Rational objective;
    Rational budget_used;
};

/// Maximum-objective vertex; ties go to the lexicographically largest x.
inline ExactSolution solve_exact(const RationalInstance& inst) {
    const auto vertices = enumerate_candidates(inst);
    // x = 0 is always a vertex, so the list is never empty.
    ExactSolution best;
    bool have = false;
    for (const auto& v : vertices) {
        Rational total = 0;
        for (const auto& xi : v)
            total += xi;
        if (!have || total > best.objective || (total == best.objective && v > best.x)) {
            best.x = v;
            best.objective = total;
            have = true;
        }
    }
    best.budget_used = 0;
    for (std::size_t i = 0; i < best.x.size(); ++i)
        best.budget_used += inst.z[i] * best.x[i];
    return best;
}

} // namespace chainlp::oracle
