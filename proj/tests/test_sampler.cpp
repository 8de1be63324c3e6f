#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kpr/rng.hpp"
#include "kpr/sampler.hpp"
#include "kpr/strategy.hpp"

using kpr::build_sampler;
using kpr::CumulativeSampler;
using kpr::draw;
using kpr::draw_naive;
using kpr::rank_for_uniform;
using kpr::rank_for_uniform_naive;
using kpr::RngStream;
using kpr::WeightVector;

namespace {

WeightVector wv(std::vector<double> w) { return WeightVector::from_weights(std::move(w)); }

std::vector<WeightVector> assorted_weights() {
    std::vector<WeightVector> out;
    out.push_back(wv({1, 1, 1, 1}));
    out.push_back(wv({1, 2, 3, 4}));
    out.push_back(wv({0, 5, 0}));
    out.push_back(wv({0.3, 0, 0.7}));
    out.push_back(wv({1e-12, 1, 1e-12}));
    out.push_back(wv({1, 0, 0}));
    RngStream rng(77);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> w(1 + rng.next_u64() % 32);
        for (auto& x : w) {
            x = rng.next_double();
            if (rng.next_u64() % 4 == 0) x = 0.0;
        }
        bool any = false;
        for (double x : w) any = any || x > 0.0;
        if (!any) w[0] = 0.5;
        out.push_back(wv(std::move(w)));
    }
    return out;
}

}  // namespace

TEST_CASE("prefix sums accumulate left to right") {
    CHECK(build_sampler(wv({1, 1, 1, 1})).prefix == std::vector<double>{1, 2, 3, 4});
    CHECK(build_sampler(wv({1, 2, 3, 4})).prefix == std::vector<double>{1, 3, 6, 10});
    CHECK(build_sampler(wv({0, 5, 0})).prefix == std::vector<double>{0, 5, 5});
    CHECK(build_sampler(wv({1, 2, 3, 4})).total == 10.0);
}

TEST_CASE("degenerate weight vector always returns its only rank") {
    const auto s = build_sampler(wv({1, 0, 0}));
    for (double u = 0.0; u < 1.0; u += 0.01) CHECK(rank_for_uniform(s, u) == 1);
}

TEST_CASE("inverse CDF picks the bin containing u") {
    const auto even = build_sampler(wv({1, 1}));
    CHECK(rank_for_uniform(even, 0.3) == 1);
    CHECK(rank_for_uniform(even, 0.7) == 2);

    const auto quarters = build_sampler(wv({1, 1, 1, 1}));
    CHECK(rank_for_uniform(quarters, 0.99) == 4);

    const auto skew = wv({2, 1});
    CHECK(rank_for_uniform_naive(skew, 0.5) == 1);
    CHECK(rank_for_uniform(build_sampler(skew), 0.5) == 1);
}

TEST_CASE("binary search and linear scan agree on a dense u grid") {
    for (const auto& w : assorted_weights()) {
        const auto s = build_sampler(w);
        for (int i = 0; i < 1000; ++i) {
            const double u = i / 1000.0;
            CHECK(rank_for_uniform(s, u) == rank_for_uniform_naive(w, u));
        }
    }
}

TEST_CASE("shared-stream draws are identical between implementations") {
    for (const auto& w : assorted_weights()) {
        const auto s = build_sampler(w);
        RngStream fast(101), slow(101);
        for (int i = 0; i < 200; ++i) CHECK(draw(s, fast) == draw_naive(w, slow));
    }
}

TEST_CASE("zero-weight ranks are never drawn") {
    const auto w = wv({0, 1, 0, 2});
    const auto s = build_sampler(w);
    for (int i = 0; i < 1000; ++i) {
        const double u = i / 1000.0;
        const auto k = rank_for_uniform(s, u);
        CHECK((k == 2 || k == 4));
    }
    RngStream rng(5);
    for (int i = 0; i < 100000; ++i) {
        const auto k = draw(s, rng);
        CHECK((k == 2 || k == 4));
    }
}

TEST_CASE("empirical frequencies match the weights") {
    const auto w = wv({1, 2, 3, 4});
    const auto s = build_sampler(w);
    RngStream rng(2024);
    std::vector<double> freq(4, 0.0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) freq[draw(s, rng) - 1] += 1.0 / n;
    CHECK(freq[0] == doctest::Approx(0.1).epsilon(0.03));
    CHECK(freq[1] == doctest::Approx(0.2).epsilon(0.015));
    CHECK(freq[2] == doctest::Approx(0.3).epsilon(0.01));
    CHECK(freq[3] == doctest::Approx(0.4).epsilon(0.0075));
}

TEST_CASE("fixed seed reproduces the draw sequence") {
    const auto w = wv({0.2, 0.5, 0.3});
    const auto s = build_sampler(w);
    RngStream a(31), b(31);
    for (int i = 0; i < 1000; ++i) CHECK(draw(s, a) == draw(s, b));
}

TEST_CASE("unsamplable weight vectors are rejected") {
    CHECK_THROWS_AS(build_sampler(WeightVector::from_weights({0.0, 0.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_sampler(WeightVector::from_weights({})), std::invalid_argument);
}
