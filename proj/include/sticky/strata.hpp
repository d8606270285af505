#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"

namespace sticky {

// 2^n strata must stay enumerable in memory.
inline constexpr int kMaxDimension = 24;

using StratumMask = std::uint32_t;

// A face of the orthant: bit j set <=> coordinate j+1 strictly positive.
// Full mask = interior, empty mask = the corner {(0,...,0)}.
struct StratumId {
    StratumMask mask = 0;

    int popcount() const { return std::popcount(mask); }
    bool contains(int coord) const { return (mask >> coord) & 1u; }

    friend bool operator==(const StratumId&, const StratumId&) = default;
    friend auto operator<=>(const StratumId&, const StratumId&) = default;
};

// Classification is by exact zero: boundary contact is produced only by the
// dynamics' snap-to-zero rule, so no epsilon enters here.
inline StratumId stratum_of(std::span<const double> heights) {
    StratumMask mask = 0;
    for (std::size_t j = 0; j < heights.size(); ++j) {
        const double v = heights[j];
        if (!std::isfinite(v))
            throw err::NonFinite("strata: coordinate " + std::to_string(j + 1) + " is not finite");
        if (v < 0.0)
            throw err::Negative("strata: coordinate " + std::to_string(j + 1) + " is negative");
        if (v > 0.0) mask |= StratumMask{1} << j;
    }
    return StratumId{mask};
}

// All 2^n masks in ascending integer order; disjoint and exhaustive.
inline std::vector<StratumId> enumerate_strata(int n) {
    if (n < 1 || n > kMaxDimension)
        throw err::DimensionTooLarge("strata: dimension " + std::to_string(n) + " outside [1," +
                                     std::to_string(kMaxDimension) + "]");
    std::vector<StratumId> out;
    out.reserve(std::size_t{1} << n);
    for (StratumMask m = 0; m < (StratumMask{1} << n); ++m) out.push_back(StratumId{m});
    return out;
}

// Weight s^(n-#B) multiplying the face Lebesgue measure.
struct StratumWeight {
    double s = 1.0;
    int n = 0;
    double value = 1.0;
};

inline StratumWeight stratum_weight(int n, double s, StratumId b) {
    if (!(s > 0.0)) throw err::InvalidStickiness("strata: stickiness must be in (0,inf), got " +
                                                 std::to_string(s));
    return StratumWeight{s, n, std::pow(s, n - b.popcount())};
}

}  // namespace sticky
