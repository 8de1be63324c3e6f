#include "kpr/engine.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>

#include "kpr/sampler.hpp"

namespace kpr {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string canonical_config_string(const SimulationConfig& cfg) {
    char temp[64];
    switch (cfg.params.temperature.kind()) {
        case Temperature::Kind::Infinite:
            std::snprintf(temp, sizeof temp, "inf");
            break;
        case Temperature::Kind::Zero:
            std::snprintf(temp, sizeof temp, "0");
            break;
        case Temperature::Kind::Finite:
            std::snprintf(temp, sizeof temp, "%.17g", cfg.params.temperature.value());
            break;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "n=%u;m=%u;alpha=%.17g;T=%s;mode=%s;evenings=%" PRIu64
                  ";burn_in=%" PRIu64 ";seed=%" PRIu64,
                  cfg.restaurants, cfg.agents, cfg.params.alpha, temp,
                  cfg.params.mode == ChoiceMode::DictatedRotation ? "dictated" : "probabilistic",
                  cfg.evenings, cfg.burn_in, cfg.seed);
    return buf;
}

}  // namespace

void SimulationConfig::validate() const {
    if (restaurants == 0) throw std::invalid_argument("need at least one restaurant");
    if (agents == 0) throw std::invalid_argument("need at least one agent");
    if (evenings == 0) throw std::invalid_argument("need at least one evening");
    if (burn_in >= evenings) throw std::invalid_argument("burn-in must leave evenings to record");
    params.validate();
}

std::uint64_t SimulationConfig::digest() const {
    return fnv1a64(canonical_config_string(*this));
}

std::uint32_t dictated_rank(std::uint32_t agent, std::uint64_t evening, std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("need at least one restaurant");
    if (agent == 0) throw std::invalid_argument("agents are numbered from one");
    return static_cast<std::uint32_t>((agent - 1 + evening) % n) + 1;
}

std::pair<OccupancyState, double> step(const OccupancyState& prev,
                                       const SimulationConfig& cfg, RngStream& rng) {
    const std::uint32_t n = cfg.restaurants;
    if (prev.counts.size() != n) throw std::invalid_argument("occupancy length mismatch");

    OccupancyState next;
    next.counts.assign(n, 0);
    next.evening = prev.evening + 1;
    std::uint32_t occupied = 0;

    if (cfg.params.mode == ChoiceMode::DictatedRotation) {
        for (std::uint32_t i = 1; i <= cfg.agents; ++i) {
            const std::uint32_t k = dictated_rank(i, next.evening, n);
            if (next.counts[k - 1]++ == 0) ++occupied;
        }
    } else {
        const WeightVector w = compute_weights(cfg.params, prev.counts);
        const CumulativeSampler sampler = build_sampler(w);
        for (std::uint32_t i = 0; i < cfg.agents; ++i) {
            const std::uint32_t k = draw(sampler, rng);
            if (next.counts[k - 1]++ == 0) ++occupied;
        }
    }
    return {std::move(next), static_cast<double>(occupied) / static_cast<double>(n)};
}

UtilizationSeries run(const SimulationConfig& cfg) {
    cfg.validate();

    RngStream rng(cfg.seed);
    OccupancyState state;
    state.counts.assign(cfg.restaurants, 0);
    state.evening = 0;

    UtilizationSeries series;
    series.n_restaurants = cfg.restaurants;
    series.config_digest = cfg.digest();
    series.values.reserve(cfg.evenings - cfg.burn_in);

    for (std::uint64_t t = 1; t <= cfg.evenings; ++t) {
        auto [next, f] = step(state, cfg, rng);
        state = std::move(next);
        if (t > cfg.burn_in) series.values.push_back(f);
    }
    return series;
}

Histogram occupancy_census(const SimulationConfig& cfg) {
    cfg.validate();

    RngStream rng(cfg.seed);
    OccupancyState state;
    state.counts.assign(cfg.restaurants, 0);
    state.evening = 0;

    std::vector<std::uint64_t> pooled;  // pooled[m] = cells with exactly m arrivals
    for (std::uint64_t t = 1; t <= cfg.evenings; ++t) {
        auto [next, f] = step(state, cfg, rng);
        state = std::move(next);
        if (t <= cfg.burn_in) continue;
        for (std::uint32_t c : state.counts) {
            if (c >= pooled.size()) pooled.resize(c + 1, 0);
            ++pooled[c];
        }
    }
    return occupancy_histogram(pooled);
}

}  // namespace kpr
