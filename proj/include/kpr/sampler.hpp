#pragma once
#include <cstdint>

#include "kpr/rng.hpp"
#include "kpr/strategy.hpp"

namespace kpr {

// Inverse-CDF sampler over a weight vector. `prefix[i]` is the sum of the
// first i+1 weights, accumulated left to right in rank order; that
// accumulation order is part of the contract so the binary-search and
// linear-scan paths agree draw for draw, not just in distribution.
struct CumulativeSampler {
    std::vector<double> prefix;
    double total = 0.0;
};

CumulativeSampler build_sampler(const WeightVector& w);

// Smallest rank k with prefix[k] > u * total, by binary search.
std::uint32_t rank_for_uniform(const CumulativeSampler& s, double u);

// Same contract as rank_for_uniform, as a left-to-right linear scan over the
// identical running sums. Reference oracle for the binary-search path.
std::uint32_t rank_for_uniform_naive(const WeightVector& w, double u);

// Each draw consumes exactly one uniform real from the stream.
std::uint32_t draw(const CumulativeSampler& s, RngStream& rng);
std::uint32_t draw_naive(const WeightVector& w, RngStream& rng);

}  // namespace kpr
