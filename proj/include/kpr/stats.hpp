#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace kpr {

// Normalized histogram: densities over contiguous bins, sum(density * width) = 1.
//
// Utilization fractions are exact multiples of 1/N, so the factory below bins
// them into width-1/N bins centered on those attainable values instead of
// generic edges (generic binning would alias neighbouring multiples).
struct Histogram {
    std::vector<double> bin_edges;  // size bins + 1
    std::vector<double> densities;  // size bins
    std::uint64_t n_samples = 0;

    std::size_t bin_count() const { return densities.size(); }
    double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
    double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
    double mass() const;
    double mode() const;  // center of the highest-density bin, ties to the lowest center

    void validate() const;
};

struct SummaryStats {
    double mean = 0.0;
    double std = 0.0;       // sample standard deviation (n-1)
    double mode = 0.0;      // histogram argmax center
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct GaussianCheck {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double max_cdf_gap = 0.0;  // sup |empirical CDF - fitted normal CDF|
};

// Distribution of utilization fractions over width-1/N bins centered on the
// attainable multiples j/N, j = 0..N.
Histogram histogram(std::span<const double> series, std::uint32_t n_restaurants);

// Distribution of per-cell occupancy counts as unit-width integer bins, so
// densities read directly as fractions. `counts[m]` holds the number of cells
// with exactly m arrivals.
Histogram occupancy_histogram(std::span<const std::uint64_t> counts);

// Moment estimators plus the histogram mode. Skewness and excess kurtosis are
// reported as 0 for a zero-variance series.
SummaryStats summary(std::span<const double> series, std::uint32_t n_restaurants);

// Shape moments and the maximum CDF gap against a normal with the sample
// mean and std. No hypothesis-test machinery; thresholds live with the tests.
GaussianCheck gaussian_check(std::span<const double> series);

}  // namespace kpr
