#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kpr/rng.hpp"
#include "kpr/stats.hpp"
#include "kpr/strategy.hpp"

namespace kpr {

struct SimulationConfig {
    std::uint32_t restaurants = 0;
    std::uint32_t agents = 0;
    StrategyParams params;
    std::uint64_t evenings = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 1;

    void validate() const;

    // Stable 64-bit identifier of the full configuration (FNV-1a over a
    // canonical rendering); ties outputs back to the run that produced them.
    std::uint64_t digest() const;
};

struct OccupancyState {
    std::vector<std::uint32_t> counts;  // counts[k-1] = arrivals at rank k
    std::uint64_t evening = 0;
};

struct UtilizationSeries {
    std::vector<double> values;  // f per recorded evening, post burn-in
    std::uint32_t n_restaurants = 0;
    std::uint64_t config_digest = 0;
};

// Rank occupied by agent i (1-based) on evening t under rotation: each agent
// shifts down one rank per evening, wrapping to the top.
std::uint32_t dictated_rank(std::uint32_t agent, std::uint64_t evening, std::uint32_t n);

// Advances one evening: all agents choose from the distribution implied by
// prev, then the new counts and the occupied fraction are returned.
std::pair<OccupancyState, double> step(const OccupancyState& prev,
                                       const SimulationConfig& cfg, RngStream& rng);

UtilizationSeries run(const SimulationConfig& cfg);

// Pooled distribution of per-restaurant arrival counts m over all recorded
// evenings and restaurants.
Histogram occupancy_census(const SimulationConfig& cfg);

}  // namespace kpr
