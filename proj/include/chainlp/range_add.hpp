#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chainlp/error.hpp"

namespace chainlp {

/// Range add, point query in O(log n).  Bottom-up segment tree: a range
/// update lands on the O(log n) nodes that tile it, and a point's value is
/// the sum along its leaf-to-root path.  Only deltas whose range covers the
/// point enter that sum, so floating-point values never carry residue from
/// cancelled updates.
template <typename T>
class RangeAddArray {
public:
    explicit RangeAddArray(std::size_t n) : n_(n), node_(2 * n, T{}) {}

    std::size_t size() const noexcept { return n_; }

    /// Adds delta to every index in the closed range [first, last].
    void range_add(std::size_t first, std::size_t last, T delta) {
        if (first > last || last >= n_)
            throw Error(ErrorCode::IndexOutOfRange,
                        "range [" + std::to_string(first) + ", " + std::to_string(last) + "] outside [0, " +
                            std::to_string(n_) + ")");
        for (std::size_t lo = first + n_, hi = last + 1 + n_; lo < hi; lo >>= 1, hi >>= 1) {
            if (lo & 1)
                node_[lo++] += delta;
            if (hi & 1)
                node_[--hi] += delta;
        }
    }

    T point_query(std::size_t i) const {
        if (i >= n_)
            throw Error(ErrorCode::IndexOutOfRange,
                        "index " + std::to_string(i) + " outside [0, " + std::to_string(n_) + ")");
        T acc{};
        for (std::size_t k = i + n_; k > 0; k >>= 1)
            acc += node_[k];
        return acc;
    }

    /// All n values in O(n): push node sums down to the leaves.
    std::vector<T> materialize() const {
        std::vector<T> pushed = node_;
        for (std::size_t k = 2; k < 2 * n_; ++k)
            pushed[k] += pushed[k >> 1];
        return std::vector<T>(pushed.begin() + static_cast<std::ptrdiff_t>(n_), pushed.end());
    }

private:
    std::size_t n_;
    // node_[1] is the root, leaves are node_[n_ .. 2 n_); node_[0] is unused.
    std::vector<T> node_;
};

} // namespace chainlp
