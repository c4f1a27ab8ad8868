#include <cmath>
#include <cstring>

#include "bcpnn/errors.hpp"
#include "bcpnn/spiking.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bcpnn;

namespace {

NetworkConfig spiking_config(double f_max = 100.0, double tau_z = 50.0, double tau_p = 1e9) {
    NetworkConfig cfg = NetworkConfig::make({2}, {2});
    cfg.spiking = true;
    cfg.f_max_hz = f_max;
    cfg.tau_zi_ms = tau_z;
    cfg.tau_zj_ms = tau_z;
    cfg.spike_tau_p = tau_p;
    return cfg;
}

}  // namespace

TEST_CASE("silent populations never spike and z decays to zero") {
    SpikingRun run(spiking_config(), 1);
    std::vector<double> silent_in(2, 0.0), silent_hid(2, 0.0);
    // Prime one spike deterministically via a saturated rate, then silence.
    NetworkConfig hot = spiking_config(1000.0);
    SpikingRun primed(hot, 1);
    const std::vector<double> on{1.0, 0.0};
    primed.step(on, on);
    CHECK(primed.state().z_in[0] == 1.0);
    for (int t = 0; t < 2000; ++t) primed.step(silent_in, silent_hid);
    CHECK(primed.state().z_in[0] < 1e-15);

    for (int t = 0; t < 1000; ++t) {
        run.step(silent_in, silent_hid);
        CHECK(run.last_spikes_in()[0] == 0);
        CHECK(run.last_spikes_in()[1] == 0);
        CHECK(run.last_spikes_hid()[0] == 0);
    }
    CHECK(run.state().z_in[0] == 0.0);
}

TEST_CASE("dt must be positive") {
    NetworkConfig cfg = spiking_config();
    cfg.dt_ms = 0.0;
    CHECK_THROWS_AS(SpikingRun(cfg, 1), ConfigError);
}

TEST_CASE("stationary z mean matches the geometric-series value") {
    // Constant rate 0.6 at f_max 100 Hz, dt 1 ms: spike prob 0.06 per step.
    SpikingRun run(spiking_config(), 42);
    const std::vector<double> rates{0.6, 0.4};
    const int burn = 2000, steps = 1000000;
    for (int t = 0; t < burn; ++t) run.step(rates, rates);
    double sum = 0.0;
    for (int t = 0; t < steps; ++t) {
        run.step(rates, rates);
        sum += run.state().z_in[0];
    }
    const double lambda = std::exp(-1.0 / 50.0);
    const double expected = 0.06 / (1.0 - lambda);
    CHECK(sum / steps == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("expected spike counts stay within 3-sigma Poisson bounds") {
    SpikingRun run(spiking_config(), 7);
    const std::vector<double> rates{0.5, 0.5};
    const int steps = 100000;
    int count = 0;
    for (int t = 0; t < steps; ++t) {
        run.step(rates, rates);
        count += run.last_spikes_in()[0];
    }
    const double expected = 0.05 * steps;
    const double sigma = std::sqrt(expected * 0.95);
    CHECK(std::abs(count - expected) < 3.0 * sigma);
}

TEST_CASE("normalized traces are unbiased rate estimates") {
    SpikingRun run(spiking_config(), 11);
    const std::vector<double> rates{0.7, 0.3};
    for (int t = 0; t < 300000; ++t) run.step(rates, rates);
    // Long-run p-traces track the rate values themselves.
    CHECK(run.state().p.marginal_pre[0] == doctest::Approx(0.7).epsilon(0.03));
    CHECK(run.state().p.marginal_pre[1] == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("identical trains with identical time constants give identical traces") {
    NetworkConfig cfg = spiking_config(1000.0);  // saturated: deterministic spikes
    SpikingRun run(cfg, 3);
    CounterRng pattern_rng(5);
    for (int t = 0; t < 500; ++t) {
        const int m = static_cast<int>(pattern_rng.next_below(2));
        std::vector<double> r(2, 0.0);
        r[static_cast<size_t>(m)] = 1.0;
        run.step(r, r);  // same drive to both populations
        CHECK(std::memcmp(run.state().z_in.data(), run.state().z_hid.data(),
                          2 * sizeof(double)) == 0);
    }
}

TEST_CASE("spiking learning recovers the rate-based weights") {
    // Two alternating patterns, long presentations; compare against the
    // closed-form rate weights (ln 2 diagonal / strongly negative off cells).
    NetworkConfig cfg = spiking_config();
    SpikingRun run(cfg, 99);
    const int presentation_ms = 2000, presentations = 100;
    for (int p = 0; p < presentations; ++p) {
        std::vector<double> r(2, 0.0);
        r[static_cast<size_t>(p % 2)] = 1.0;
        for (int t = 0; t < presentation_ms; ++t) run.step(r, r);
    }
    Model probe(cfg);
    probe.traces = run.state().p;
    const WeightView w = probe.weights();
    CHECK(w.ff[0] == doctest::Approx(std::log(2.0)).epsilon(0.08));
    CHECK(w.ff[3] == doctest::Approx(std::log(2.0)).epsilon(0.08));
    CHECK(w.ff[1] < -0.5);
}

TEST_CASE("temporal saliency mechanics") {
    // Deterministic spikes, hand weight w(0,0;0,0) = 1.
    NetworkConfig cfg = spiking_config(1000.0);
    Model model(cfg);
    TraceState& t = model.traces;
    t.marginal_pre = {0.5, 0.5};
    t.marginal_post = {0.5, 0.5};
    t.ff_joint = {std::exp(1.0) * 0.25, 0.25, 0.25, 0.25};
    const WeightView w = model.weights();

    SpikingRun run(cfg, 1);
    run.record_history(true);
    const std::vector<double> on{1.0, 0.0};
    const std::vector<double> off{0.0, 0.0};
    run.step(on, on);  // synchronous pre/post spike pair at t = 0
    for (int s = 0; s < 99; ++s) run.step(off, off);

    TemporalSaliency sal = temporal_saliency(run.history(), model, w, HidIndex{0, 0}, 10);

    SUBCASE("peak at the spike, decaying with the product time constant") {
        const double z0 = run.history().zhat_in[0][0];
        CHECK(sal.map[0] == doctest::Approx(z0 * z0 * 1.0).epsilon(1e-12));
        const double lambda2 = std::exp(-2.0 / 50.0);
        for (int s = 1; s < 20; ++s)
            CHECK(sal.map[static_cast<size_t>(s) * 2] ==
                  doctest::Approx(sal.map[static_cast<size_t>(s - 1) * 2] * lambda2).epsilon(1e-9));
        CHECK(sal.peak_window == 0);
    }
    SUBCASE("quiet windows carry zero contribution from silent units") {
        // Unit (0, m=1) never spiked: its contributions are identically 0.
        for (int s = 0; s < sal.steps; ++s) CHECK(sal.map[static_cast<size_t>(s) * 2 + 1] == 0.0);
    }
    SUBCASE("window validation") {
        CHECK_THROWS_AS(temporal_saliency(run.history(), model, w, HidIndex{0, 0}, 101),
                        ArgumentError);
        CHECK_THROWS_AS(temporal_saliency(run.history(), model, w, HidIndex{0, 9}, 10),
                        ArgumentError);
    }
}

TEST_CASE("temporal saliency is exactly zero on masked connections") {
    NetworkConfig cfg = NetworkConfig::make({2, 2}, {2});
    cfg.spiking = true;
    cfg.f_max_hz = 1000.0;
    cfg.connectivity = {0, 1};  // input 0 masked
    Model model(cfg);
    for (double& v : model.traces.ff_joint) v = 0.4;  // nonzero weights everywhere
    const WeightView w = model.weights();

    SpikingRun run(cfg, 1);
    run.record_history(true);
    const std::vector<double> in_rates{1.0, 0.0, 1.0, 0.0};
    const std::vector<double> hid_rates{1.0, 0.0};
    for (int s = 0; s < 50; ++s) run.step(in_rates, hid_rates);

    TemporalSaliency sal = temporal_saliency(run.history(), model, w, HidIndex{0, 0}, 10);
    for (int s = 0; s < sal.steps; ++s) {
        CHECK(sal.map[static_cast<size_t>(s) * 4 + 0] == 0.0);
        CHECK(sal.map[static_cast<size_t>(s) * 4 + 1] == 0.0);
        CHECK(sal.map[static_cast<size_t>(s) * 4 + 2] != 0.0);
    }
}

TEST_CASE("time-averaged saliency matches the stationary evidence product") {
    // Stationary soft rates; E[zhat_i zhat_j] = pi_i * pi_j for independent
    // spike trains, so the mean saliency approaches pi_i * pi_j * w.
    NetworkConfig cfg = spiking_config();
    Model model(cfg);
    model.traces.marginal_pre = {0.5, 0.5};
    model.traces.marginal_post = {0.5, 0.5};
    model.traces.ff_joint = {std::exp(0.8) * 0.25, 0.25, 0.25, 0.25};
    const WeightView w = model.weights();

    SpikingRun run(cfg, 13);
    const std::vector<double> in_rates{0.6, 0.4};
    const std::vector<double> hid_rates{0.8, 0.2};
    const int steps = 400000;
    for (int s = 0; s < steps; ++s) run.step(in_rates, hid_rates);

    const double avg_product = run.zhat_product_integral()[0] / steps;
    CHECK(avg_product == doctest::Approx(0.6 * 0.8).epsilon(0.05));
    CHECK(avg_product * w.ff[0] == doctest::Approx(0.6 * 0.8 * 0.8).epsilon(0.05));
}
