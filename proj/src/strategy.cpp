#include "kpr/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpr {

Temperature Temperature::finite(double value) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw std::invalid_argument("finite temperature must be a positive real");
    }
    return Temperature(Kind::Finite, value);
}

double Temperature::value() const {
    if (kind_ != Kind::Finite) {
        throw std::logic_error("temperature value is only defined in the finite regime");
    }
    return value_;
}

void StrategyParams::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw std::invalid_argument("alpha must be finite and non-negative");
    }
}

WeightVector WeightVector::from_weights(std::vector<double> w) {
    WeightVector out;
    out.weights = std::move(w);
    double sum = 0.0;
    for (double x : out.weights) sum += x;
    out.total = sum;
    out.validate();
    return out;
}

void WeightVector::validate() const {
    if (weights.empty()) throw std::invalid_argument("weight vector is empty");
    for (double x : weights) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("weights must be finite and non-negative");
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw std::invalid_argument("weight total must be positive");
    }
    double sum = 0.0;
    for (double x : weights) sum += x;
    const double scale = std::max(std::abs(total), std::abs(sum));
    const double ulp = std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale;
    if (std::abs(total - sum) > 8.0 * ulp) {
        throw std::invalid_argument("weight total is inconsistent with the weights");
    }
}

std::vector<double> WeightVector::probabilities() const {
    std::vector<double> p(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / total;
    return p;
}

WeightVector compute_weights(const StrategyParams& params,
                             std::span<const std::uint32_t> prev_counts) {
    params.validate();
    if (params.mode != ChoiceMode::Probabilistic) {
        throw std::invalid_argument("compute_weights requires probabilistic mode");
    }
    const std::size_t n = prev_counts.size();
    if (n == 0) throw std::invalid_argument("empty restaurant set");

    const double alpha = params.alpha;
    const auto rank_term = [alpha](std::size_t i) {
        return alpha != 0.0 ? alpha * std::log(static_cast<double>(i + 1)) : 0.0;
    };

    // Exponent of each admissible rank; -inf marks an excluded rank.
    constexpr double kExcluded = -std::numeric_limits<double>::infinity();
    std::vector<double> exponent(n);
    switch (params.temperature.kind()) {
        case Temperature::Kind::Finite: {
            const double t = params.temperature.value();
            for (std::size_t i = 0; i < n; ++i) {
                exponent[i] = rank_term(i) - static_cast<double>(prev_counts[i]) / t;
            }
            break;
        }
        case Temperature::Kind::Infinite: {
            for (std::size_t i = 0; i < n; ++i) exponent[i] = rank_term(i);
            break;
        }
        case Temperature::Kind::Zero: {
            bool any_vacant = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (prev_counts[i] == 0) {
                    exponent[i] = rank_term(i);
                    any_vacant = true;
                } else {
                    exponent[i] = kExcluded;
                }
            }
            if (!any_vacant) {
                // Every restaurant was visited: fall back to pure rank weights.
                for (std::size_t i = 0; i < n; ++i) exponent[i] = rank_term(i);
            }
            break;
        }
    }

    const double shift = *std::max_element(exponent.begin(), exponent.end());

    WeightVector out;
    out.weights.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = exponent[i] == kExcluded ? 0.0 : std::exp(exponent[i] - shift);
        if (!std::isfinite(w)) {
            throw std::invalid_argument("non-finite weight; strategy parameters overflow");
        }
        out.weights[i] = w;
        sum += w;
    }
    out.total = sum;
    if (!(out.total > 0.0)) {
        throw std::invalid_argument("all choice weights vanished");
    }
    return out;
}

}  // namespace kpr
