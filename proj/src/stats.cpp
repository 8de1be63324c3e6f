#include "kpr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kpr {

namespace {

struct Moments {
    double mean, m2, m3, m4;  // central moments, 1/n normalization
};

Moments central_moments(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    return {mean, m2 / n, m3 / n, m4 / n};
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

double Histogram::mass() const {
    double total = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) total += densities[i] * width(i);
    return total;
}

double Histogram::mode() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < densities.size(); ++i) {
        if (densities[i] > densities[best]) best = i;
    }
    return center(best);
}

void Histogram::validate() const {
    if (densities.empty() || bin_edges.size() != densities.size() + 1) {
        throw std::invalid_argument("histogram shape is inconsistent");
    }
    for (double d : densities) {
        if (!(d >= 0.0)) throw std::invalid_argument("histogram density must be non-negative");
    }
    if (std::abs(mass() - 1.0) > 1e-9) {
        throw std::invalid_argument("histogram mass must be 1");
    }
}

Histogram histogram(std::span<const double> series, std::uint32_t n_restaurants) {
    if (series.empty()) throw std::invalid_argument("empty series");
    if (n_restaurants == 0) throw std::invalid_argument("need at least one restaurant");

    const auto n = static_cast<double>(n_restaurants);
    std::vector<std::uint64_t> counts(n_restaurants + 1, 0);
    for (double f : series) {
        const auto j = static_cast<long>(std::lround(f * n));
        if (j < 0 || j > static_cast<long>(n_restaurants)) {
            throw std::invalid_argument("utilization value outside [0, 1]");
        }
        ++counts[static_cast<std::size_t>(j)];
    }

    Histogram h;
    h.n_samples = series.size();
    h.bin_edges.resize(n_restaurants + 2);
    for (std::size_t j = 0; j < h.bin_edges.size(); ++j) {
        h.bin_edges[j] = (static_cast<double>(j) - 0.5) / n;
    }
    h.densities.resize(n_restaurants + 1);
    const double samples = static_cast<double>(series.size());
    for (std::size_t j = 0; j < h.densities.size(); ++j) {
        h.densities[j] = static_cast<double>(counts[j]) * n / samples;
    }
    return h;
}

Histogram occupancy_histogram(std::span<const std::uint64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("empty occupancy census");
    std::uint64_t cells = 0;
    for (std::uint64_t c : counts) cells += c;
    if (cells == 0) throw std::invalid_argument("occupancy census has no cells");

    Histogram h;
    h.n_samples = cells;
    h.bin_edges.resize(counts.size() + 1);
    for (std::size_t m = 0; m < h.bin_edges.size(); ++m) {
        h.bin_edges[m] = static_cast<double>(m);
    }
    h.densities.resize(counts.size());
    for (std::size_t m = 0; m < counts.size(); ++m) {
        h.densities[m] = static_cast<double>(counts[m]) / static_cast<double>(cells);
    }
    return h;
}

SummaryStats summary(std::span<const double> series, std::uint32_t n_restaurants) {
    if (series.size() < 2) throw std::invalid_argument("series too short");

    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const Moments m = central_moments(series);
    const double n = static_cast<double>(series.size());

    SummaryStats s;
    s.mean = m.mean;
    s.mode = histogram(series, n_restaurants).mode();
    // A constant series reports zero spread and, by convention, zero shape.
    if (*lo < *hi && m.m2 > 0.0) {
        s.std = std::sqrt(m.m2 * n / (n - 1.0));
        s.skewness = m.m3 / std::pow(m.m2, 1.5);
        s.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
    }
    return s;
}

GaussianCheck gaussian_check(std::span<const double> series) {
    if (series.size() < 1000) throw std::invalid_argument("series too short");
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (!(*lo < *hi)) throw std::invalid_argument("zero variance series");
    const Moments m = central_moments(series);
    if (!(m.m2 > 0.0)) throw std::invalid_argument("zero variance series");

    GaussianCheck r;
    r.skewness = m.m3 / std::pow(m.m2, 1.5);
    r.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;

    const double n = static_cast<double>(series.size());
    const double sd = std::sqrt(m.m2 * n / (n - 1.0));
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    double gap = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double phi = normal_cdf((sorted[i] - m.mean) / sd);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        gap = std::max(gap, std::max(std::abs(hi - phi), std::abs(phi - lo)));
    }
    r.max_cdf_gap = gap;
    return r;
}

}  // namespace kpr
