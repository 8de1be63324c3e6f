#include "kpr/sampler.hpp"

#include <algorithm>

namespace kpr {

CumulativeSampler build_sampler(const WeightVector& w) {
    w.validate();
    CumulativeSampler s;
    s.prefix.resize(w.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sum += w.weights[i];
        s.prefix[i] = sum;
    }
    s.total = sum;
    return s;
}

std::uint32_t rank_for_uniform(const CumulativeSampler& s, double u) {
    const double target = u * s.total;
    auto it = std::upper_bound(s.prefix.begin(), s.prefix.end(), target);
    if (it == s.prefix.end()) --it;  // u < 1 keeps target below the last prefix
    return static_cast<std::uint32_t>(it - s.prefix.begin()) + 1;
}

std::uint32_t rank_for_uniform_naive(const WeightVector& w, double u) {
    w.validate();
    // Re-derive the total by the same left-to-right sum the sampler builds,
    // so both paths compare against bit-identical partial sums.
    double total = 0.0;
    for (double x : w.weights) total += x;
    const double target = u * total;
    double running = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        running += w.weights[i];
        if (running > target) return static_cast<std::uint32_t>(i) + 1;
    }
    return static_cast<std::uint32_t>(w.size());
}

std::uint32_t draw(const CumulativeSampler& s, RngStream& rng) {
    return rank_for_uniform(s, rng.next_double());
}

std::uint32_t draw_naive(const WeightVector& w, RngStream& rng) {
    return rank_for_uniform_naive(w, rng.next_double());
}

}  // namespace kpr
