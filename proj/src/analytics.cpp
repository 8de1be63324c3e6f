#include "kpr/analytics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace kpr {

namespace {

constexpr std::array<double, 21> factorials = [] {
    std::array<double, 21> f{};
    f[0] = 1.0;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
    return f;
}();

}  // namespace

double poisson_pmf(double lambda, std::uint64_t m) {
    if (!(std::isfinite(lambda)) || lambda < 0.0) {
        throw std::invalid_argument("lambda must be finite and non-negative");
    }
    if (lambda == 0.0) return m == 0 ? 1.0 : 0.0;
    if (m < factorials.size()) {
        return std::pow(lambda, static_cast<double>(m)) * std::exp(-lambda) /
               factorials[m];
    }
    const double md = static_cast<double>(m);
    return std::exp(md * std::log(lambda) - lambda - std::lgamma(md + 1.0));
}

double poisson_utilization(double lambda) {
    return 1.0 - poisson_pmf(lambda, 0);
}

double rank_pair_expectation(std::uint32_t n, std::uint32_t k) {
    if (n == 0 || n % 2 != 0) throw std::invalid_argument("pairing needs an even rank count");
    if (k < 1 || k > n / 2) throw std::invalid_argument("pair index out of range");
    const double kd = k;
    const double other = static_cast<double>(n) + 1.0 - kd;
    const double denom = static_cast<double>(n) + 1.0;
    return (kd * kd + other * other + 4.0 * kd * other) / (denom * denom);
}

RankUtilizationEstimate rank_utilization_estimate(std::uint32_t n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("pairing needs an even rank count");
    RankUtilizationEstimate e;
    e.f0 = poisson_utilization(2.0);
    double sum = 0.0;
    for (std::uint32_t k = 1; k <= n / 2; ++k) sum += rank_pair_expectation(n, k);
    e.f1 = sum / static_cast<double>(n);
    e.f_bar = e.f0 * e.f1;
    return e;
}

double avoid_crowd_equation(double f) {
    const double vacant = 1.0 - f;
    return vacant * (1.0 - std::exp(-1.0 / vacant)) - f;
}

FixedPointResult avoid_crowd_fixed_point(double tolerance) {
    if (!(tolerance > 0.0) || tolerance > 1e-6) {
        throw std::invalid_argument("tolerance must be in (0, 1e-6]");
    }

    double prev = avoid_crowd_equation(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double cur = avoid_crowd_equation(static_cast<double>(i) / 100.0 * (1.0 - 1e-15));
        if (!(cur < prev)) throw std::runtime_error("equation is not strictly decreasing");
        prev = cur;
    }

    double lo = 0.0, hi = 1.0 - 1e-15;
    FixedPointResult r;
    while (true) {
        const double mid = 0.5 * (lo + hi);
        const double g = avoid_crowd_equation(mid);
        ++r.iterations;
        if (std::abs(g) < tolerance) {
            r.value = mid;
            r.residual = g;
            return r;
        }
        if (g > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

}  // namespace kpr
