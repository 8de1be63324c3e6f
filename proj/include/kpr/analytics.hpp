#pragma once

#include <cstdint>

namespace kpr {

enum class AnalyticSource {
    PoissonUtilization,
    PoissonPmf,
    RankPairing,
    AvoidCrowdFixedPoint,
};

// Echo of whichever inputs the source used; unrelated fields stay default.
struct AnalyticInputs {
    double lambda = 0.0;
    std::uint64_t m = 0;
    std::uint32_t n = 0;
    double tolerance = 0.0;
};

struct AnalyticPrediction {
    double value = 0.0;
    AnalyticSource source = AnalyticSource::PoissonUtilization;
    AnalyticInputs inputs;
};

// P[m arrivals] when arrivals per restaurant are Poisson with mean lambda.
double poisson_pmf(double lambda, std::uint64_t m);

// Expected occupied fraction under fully random choice: 1 - P[no arrivals].
double poisson_utilization(double lambda);

// Expected occupied restaurants in the rank pair {k, n+1-k} when both its
// agents pick within the pair with rank-proportional odds.
double rank_pair_expectation(std::uint32_t n, std::uint32_t k);

struct RankUtilizationEstimate {
    double f0 = 0.0;   // fraction of pairs drawing at least one agent
    double f1 = 0.0;   // mean occupied fraction inside an active pair
    double f_bar = 0.0;
};

RankUtilizationEstimate rank_utilization_estimate(std::uint32_t n);

// g(f) = (1-f)(1 - exp(-1/(1-f))) - f; its root is the stationary occupied
// fraction when agents spread uniformly over last evening's vacancies.
double avoid_crowd_equation(double f);

struct FixedPointResult {
    double value = 0.0;
    std::uint32_t iterations = 0;
    double residual = 0.0;
};

FixedPointResult avoid_crowd_fixed_point(double tolerance);

}  // namespace kpr
