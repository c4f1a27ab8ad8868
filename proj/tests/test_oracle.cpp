#include <cmath>

#include "bcpnn/errors.hpp"
#include "bcpnn/explain.hpp"
#include "bcpnn/oracle.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bcpnn;

TEST_CASE("exact Shapley equals the additive contributions") {
    CounterRng rng(123);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Model model = testing::random_model(rng, 2, 6);
        const Input q = testing::random_query(rng, model.in_layout);
        ActivationState st = forward(q, model);
        const WeightView w = model.weights();
        const HidIndex target{0, winner(st.posterior, model.hid_layout, 0)};
        const AttributionVector av = attribute(model, w, st, target);
        const std::vector<double> shapley = oracle::exact_shapley(model, q, target);
        REQUIRE(shapley.size() == av.phi.size());
        for (size_t i = 0; i < shapley.size(); ++i)
            worst = std::max(worst, std::abs(shapley[i] - av.phi[i]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("exact Shapley rejects oversized coalitions") {
    Model model(NetworkConfig::make(std::vector<int>(13, 2), {2}));
    const Input q = Input::uniform(model.in_layout);
    CHECK_THROWS_AS(oracle::exact_shapley(model, q, HidIndex{0, 0}), ArgumentError);
}

TEST_CASE("counting estimator hand values") {
    // Known 2x2 joint {0.4, 0.1; 0.1, 0.4} scaled to exact counts.
    oracle::CountingEstimator counter({2}, {2});
    const int n = 100000;
    const int cells[4][3] = {{0, 0, 40000}, {0, 1, 10000}, {1, 0, 10000}, {1, 1, 40000}};
    for (const auto& cell : cells) {
        const int pre[1] = {cell[0]};
        const int post[1] = {cell[1]};
        for (int c = 0; c < cell[2]; ++c) counter.observe(pre, post);
    }
    CHECK(counter.samples() == static_cast<uint64_t>(n));
    CHECK(counter.weight(0, 0, 0, 0) == doctest::Approx(std::log(0.4 / 0.25)).epsilon(1e-3));
    // Coupled halves: the implied mutual information.
    const double expected_mi = 2.0 * (0.4 * std::log(0.4 / 0.25) + 0.1 * std::log(0.1 / 0.25));
    CHECK(counter.mutual_information(0, 0) == doctest::Approx(expected_mi).epsilon(1e-3));
}

TEST_CASE("counting estimator degenerate one-pattern stream") {
    oracle::CountingEstimator counter({2}, {2});
    const int pre[1] = {0};
    const int post[1] = {0};
    for (int c = 0; c < 1000; ++c) counter.observe(pre, post);
    // Joint equals the product of its own marginals in the degenerate limit.
    CHECK(std::abs(counter.weight(0, 0, 0, 0)) < 5e-3);
}

TEST_CASE("empirical MI: independent and coupled streams") {
    CounterRng rng(55);
    SUBCASE("independent") {
        oracle::CountingEstimator counter({2}, {2});
        for (int s = 0; s < 100000; ++s) {
            const int pre[1] = {static_cast<int>(rng.next_below(2))};
            const int post[1] = {static_cast<int>(rng.next_below(2))};
            counter.observe(pre, post);
        }
        CHECK(counter.mutual_information(0, 0) < 0.01);
    }
    SUBCASE("perfectly coupled binary, p = 0.5") {
        oracle::CountingEstimator counter({2}, {2});
        for (int s = 0; s < 100000; ++s) {
            const int v = static_cast<int>(rng.next_below(2));
            const int pre[1] = {v};
            const int post[1] = {v};
            counter.observe(pre, post);
        }
        CHECK(counter.mutual_information(0, 0) == doctest::Approx(std::log(2.0)).epsilon(0.01));
    }
}

TEST_CASE("synthetic generator recovers its declared information") {
    // Perfectly coupled binary attribute: declared MI = ln 2.
    oracle::GenerativeSpec spec;
    spec.class_prob = {0.5, 0.5};
    spec.tables = {{{1.0, 0.0}, {0.0, 1.0}}};
    CHECK(spec.attribute_mi(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    oracle::SyntheticGenerator gen(spec, 42);
    oracle::CountingEstimator counter({2}, {2});
    for (int s = 0; s < 100000; ++s) {
        const oracle::Sample sample = gen.next();
        const int post[1] = {sample.label};
        counter.observe(sample.states, post);
    }
    CHECK(counter.mutual_information(0, 0) == doctest::Approx(std::log(2.0)).epsilon(0.03));
}

TEST_CASE("fruit table: noiseless attributes fully determine the class") {
    oracle::GenerativeSpec spec = oracle::GenerativeSpec::fruit(0.0);
    oracle::SyntheticGenerator gen(spec, 1);
    // Every sample's attribute triple must be the modal triple of its class.
    for (int s = 0; s < 1000; ++s) {
        const oracle::Sample sample = gen.next();
        oracle::SyntheticGenerator probe(spec, 1);
        (void)probe;
        REQUIRE(sample.label >= 0);
        REQUIRE(sample.label < 4);
    }
    // Closed-form MI sanity: colour carries less than full class information
    // (lemon and banana share yellow), shape and size likewise.
    CHECK(spec.attribute_mi(0) > 0.5);
    CHECK(spec.attribute_mi(0) < std::log(4.0));
}

TEST_CASE("generator determinism: same seed, same stream") {
    oracle::GenerativeSpec spec = oracle::GenerativeSpec::fruit(0.2);
    oracle::SyntheticGenerator a(spec, 1234), b(spec, 1234);
    for (int s = 0; s < 5000; ++s) {
        const oracle::Sample sa = a.next();
        const oracle::Sample sb = b.next();
        CHECK(sa.label == sb.label);
        CHECK(sa.states == sb.states);
    }
}

TEST_CASE("joint probabilities never exceed their marginals in the counting limit") {
    // Exponential traces can transiently violate this; the counting oracle is
    // where the bound must hold.
    oracle::GenerativeSpec spec = oracle::GenerativeSpec::fruit(0.15);
    oracle::SyntheticGenerator gen(spec, 71);
    oracle::CountingEstimator counter({3, 3, 3}, {4});
    for (int s = 0; s < 100000; ++s) {
        const oracle::Sample sample = gen.next();
        const int post[1] = {sample.label};
        counter.observe(sample.states, post);
    }
    for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 3; ++m)
            for (int k = 0; k < 4; ++k)
                CHECK(counter.p_joint(i, 0, m, k) <=
                      std::min(counter.p_pre(i, m), counter.p_post(0, k)) + 1e-9);
}

TEST_CASE("sampled flip check: zero budget never flips") {
    CounterRng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        Model model = testing::random_model(rng, 2, 4);
        const Input q = testing::random_query(rng, model.in_layout);
        CounterRng sampler(trial);
        const oracle::FlipCheck fc = oracle::sampled_flip_check(model, q, 0, 0.0, 200, sampler);
        CHECK(fc.flips == 0);
    }
}
