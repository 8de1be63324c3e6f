#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace kpr {

// Noise scale of the crowd-avoidance factor, with the two analytic limits
// kept as explicit states instead of huge/tiny floating values.
class Temperature {
public:
    enum class Kind { Finite, Infinite, Zero };

    static Temperature finite(double value);  // requires value > 0 and finite
    static Temperature infinite() { return Temperature(Kind::Infinite, 0.0); }
    static Temperature zero() { return Temperature(Kind::Zero, 0.0); }

    Kind kind() const { return kind_; }
    double value() const;  // Finite only

    bool operator==(const Temperature&) const = default;

private:
    Temperature(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

enum class ChoiceMode { Probabilistic, DictatedRotation };

// Parameters of the uniform learning rule: every agent picks rank k with
// probability proportional to k^alpha * exp(-n_k / T), where n_k is the
// previous evening's arrival count at rank k.
struct StrategyParams {
    double alpha = 0.0;
    Temperature temperature = Temperature::infinite();
    ChoiceMode mode = ChoiceMode::Probabilistic;

    void validate() const;  // alpha finite and >= 0
};

// Unnormalized choice weights, one per rank (index k-1 holds rank k).
// `total` is the left-to-right sum of `weights`; dividing by it yields the
// choice probabilities.
struct WeightVector {
    std::vector<double> weights;
    double total = 0.0;

    static WeightVector from_weights(std::vector<double> w);

    std::size_t size() const { return weights.size(); }
    std::vector<double> probabilities() const;
    void validate() const;
};

// Choice weights for the evening after the one recorded in `prev_counts`.
//
// Finite T:   w_k = k^alpha * exp(-n_k / T), evaluated in log space with the
//             largest exponent subtracted so small T cannot underflow the
//             whole vector (the common rescaling cancels on normalization).
// Infinite T: w_k = k^alpha.
// Zero T:     w_k = k^alpha on ranks left vacant, 0 elsewhere; if nothing
//             was vacant, falls back to w_k = k^alpha on every rank.
WeightVector compute_weights(const StrategyParams& params,
                             std::span<const std::uint32_t> prev_counts);

}  // namespace kpr
