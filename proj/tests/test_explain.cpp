#include <cmath>
#include <limits>

#include "bcpnn/errors.hpp"
#include "bcpnn/explain.hpp"
#include "bcpnn/oracle.hpp"
#include "bcpnn/stats.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bcpnn;

TEST_CASE("attribution: untrained model explains everything by the prior") {
    Model model(NetworkConfig::make({3, 3}, {4}));
    const WeightView w = model.weights();
    ActivationState st = forward(Input::uniform(model.in_layout), model, w);
    const AttributionVector av = attribute(model, w, st, HidIndex{0, 1});
    for (double p : av.phi) CHECK(p == 0.0);
    CHECK(av.support == av.bias);
    for (double e : av.evidence) CHECK(e == 0.0);
}

TEST_CASE("attribution reproduces the demo bar values") {
    Model model = testing::bar_demo_model();
    const WeightView w = model.weights();
    ActivationState st = forward(testing::bar_demo_query(model), model, w);
    const AttributionVector av = attribute(model, w, st, HidIndex{0, 0});
    CHECK(av.bias == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(av.phi[0] == doctest::Approx(1.8).epsilon(1e-9));
    CHECK(av.phi[1] == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(av.phi[2] == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(av.support == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("attribution completeness over random models") {
    CounterRng rng(61);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Model model = testing::random_model(rng);
        const WeightView w = model.weights();
        ActivationState st = forward(testing::random_query(rng, model.in_layout), model, w);
        for (int j = 0; j < model.hid_layout.hypercolumns(); ++j) {
            for (int k = 0; k < model.hid_layout.sizes[static_cast<size_t>(j)]; ++k) {
                const AttributionVector av = attribute(model, w, st, HidIndex{j, k});
                double sum = av.bias;
                for (double p : av.phi) sum += p;
                worst = std::max(worst, std::abs(sum - av.support));
            }
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("posterior summary entropy") {
    Model model(NetworkConfig::make({2}, {4}));
    ActivationState st;
    SUBCASE("one-hot posterior has zero entropy") {
        st.posterior = {1.0, 0.0, 0.0, 0.0};
        const PosteriorSummary ps = posterior_summary(model, st);
        CHECK(ps.entropy[0] == 0.0);
    }
    SUBCASE("uniform posterior has maximum entropy ln 4") {
        st.posterior = {0.25, 0.25, 0.25, 0.25};
        const PosteriorSummary ps = posterior_summary(model, st);
        CHECK(ps.entropy[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }
}

TEST_CASE("posterior calibration on the synthetic task") {
    Model model(testing::fruit_config());
    oracle::SyntheticGenerator train(oracle::GenerativeSpec::fruit(0.25), 101);
    testing::train_from_generator(model, train, 20000);

    const WeightView w = model.weights();
    oracle::SyntheticGenerator test(oracle::GenerativeSpec::fruit(0.25), 102);
    const int n = 4000, bins = 10;
    std::vector<double> conf_sum(bins, 0.0), acc_sum(bins, 0.0);
    std::vector<int> count(bins, 0);
    for (int s = 0; s < n; ++s) {
        const oracle::Sample sample = test.next();
        ActivationState st = forward(Input::one_hot(model.in_layout, sample.states), model, w);
        const int pred = winner(st.posterior, model.hid_layout, 0);
        const double conf = st.posterior[static_cast<size_t>(pred)];
        int b = std::min(bins - 1, static_cast<int>(conf * bins));
        conf_sum[static_cast<size_t>(b)] += conf;
        acc_sum[static_cast<size_t>(b)] += pred == sample.label;
        count[static_cast<size_t>(b)] += 1;
    }
    double ece = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[static_cast<size_t>(b)] == 0) continue;
        const double c = conf_sum[static_cast<size_t>(b)] / count[static_cast<size_t>(b)];
        const double a = acc_sum[static_cast<size_t>(b)] / count[static_cast<size_t>(b)];
        ece += (static_cast<double>(count[static_cast<size_t>(b)]) / n) * std::abs(a - c);
    }
    CHECK(ece < 0.1);
}

TEST_CASE("global importance graph") {
    SUBCASE("untrained model: all zero, stable index order") {
        Model model(NetworkConfig::make({2, 2, 2}, {2}));
        const ImportanceGraph g = global_importance(model);
        REQUIRE(g.edges.size() == 3);
        for (size_t e = 0; e < g.edges.size(); ++e) {
            CHECK(g.edges[e].usage == 0.0);
            CHECK(g.edges[e].input_hc == static_cast<int>(e));
        }
    }
    SUBCASE("informative attribute tops the ranking") {
        oracle::GenerativeSpec spec = oracle::GenerativeSpec::graded({0.9, 0.25, 0.25});
        Model model(testing::graded_config(3));
        oracle::SyntheticGenerator gen(spec, 5);
        testing::train_from_generator(model, gen, 20000);
        const ImportanceGraph g = global_importance(model);
        CHECK(g.edges.front().input_hc == 0);
        CHECK(g.edges.front().usage > 10.0 * std::abs(g.edges.back().usage));
    }
}

TEST_CASE("usage ranking agrees with brute-force mutual information") {
    const std::vector<double> fid{0.95, 0.85, 0.7, 0.55, 0.4, 0.25};
    oracle::GenerativeSpec spec = oracle::GenerativeSpec::graded(fid);
    Model model(testing::graded_config(6));
    oracle::SyntheticGenerator gen(spec, 77);
    oracle::CountingEstimator counter({4, 4, 4, 4, 4, 4}, {4});

    TrainerOptions topts;
    Trainer trainer(model, topts);
    for (int s = 0; s < 50000; ++s) {
        const oracle::Sample sample = gen.next();
        trainer.step(Input::one_hot(model.in_layout, sample.states), sample.label);
        const int post[1] = {sample.label};
        counter.observe(sample.states, post);
    }

    std::vector<double> usage(6), mi(6);
    for (int i = 0; i < 6; ++i) {
        usage[static_cast<size_t>(i)] = usage_score(model.traces, model.in_layout, model.hid_layout, i, 0);
        mi[static_cast<size_t>(i)] = counter.mutual_information(i, 0);
    }
    CHECK(spearman(usage, mi) >= 0.9);
    // And both track the closed-form declared ordering.
    std::vector<double> truth(6);
    for (int i = 0; i < 6; ++i) truth[static_cast<size_t>(i)] = spec.attribute_mi(i);
    CHECK(spearman(usage, truth) >= 0.9);
}

TEST_CASE("receptive fields") {
    SUBCASE("zero weights give a zero field") {
        Model model(NetworkConfig::make({3}, {2}));
        const WeightView w = model.weights();
        ActivationState st = forward(Input::uniform(model.in_layout), model, w);
        const ReceptiveField rf = receptive_field(model, w, st, HidIndex{0, 0});
        for (double v : rf.values) CHECK(v == 0.0);
    }
    SUBCASE("hand case: one-hot activation times weight") {
        Model model(NetworkConfig::make({2}, {2}));
        TraceState& t = model.traces;
        t.marginal_pre = {0.5, 0.5};
        t.marginal_post = {0.5, 0.5};
        t.ff_joint = {std::exp(0.7) * 0.25, 0.25, 0.25, 0.25};
        const WeightView w = model.weights();
        const int states[1] = {0};
        ActivationState st = forward(Input::one_hot(model.in_layout, states), model, w);
        const ReceptiveField rf = receptive_field(model, w, st, HidIndex{0, 0});
        CHECK(rf.values[0] == doctest::Approx(0.7).epsilon(1e-9));
        CHECK(rf.values[1] == 0.0);
    }
    SUBCASE("prototypes peak on their own class") {
        Model model(testing::fruit_config());
        oracle::SyntheticGenerator gen(oracle::GenerativeSpec::fruit(0.1), 7);
        testing::train_from_generator(model, gen, 8000);
        const WeightView w = model.weights();

        oracle::SyntheticGenerator ref_gen(oracle::GenerativeSpec::fruit(0.1), 8);
        std::vector<Input> reference;
        std::vector<int> ref_labels;
        for (int s = 0; s < 400; ++s) {
            const oracle::Sample sample = ref_gen.next();
            reference.push_back(Input::one_hot(model.in_layout, sample.states));
            ref_labels.push_back(sample.label);
        }
        const ReceptiveField rf = receptive_field(model, w, reference, HidIndex{0, 0});
        CHECK(rf.reference_mean);
        // Tuning: apple's minicolumn responds to red more than to green.
        CHECK(rf.tuning[0] > rf.tuning[2]);
        // Mean field peaks on the apple-typical colour state.
        CHECK(rf.values[0] > rf.values[1]);
        CHECK(rf.values[0] > rf.values[2]);
    }
}

TEST_CASE("attractor diagnostics hand cases") {
    Layout hid({3});
    SUBCASE("constant trajectory") {
        AttractorRun run;
        run.trajectory = {{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}};
        const AttractorDiagnostics d = attractor_diagnostics(run, hid, 1e-4);
        CHECK(d.settling_step == 0);
        CHECK(d.converged);
        CHECK(d.trajectory_length == 0.0);
    }
    SUBCASE("basin width inverts the runner-up activation") {
        AttractorRun run;
        const double second = std::exp(-3.0);
        run.trajectory = {{1.0 - second - 1e-12, second, 1e-12}};
        const AttractorDiagnostics d = attractor_diagnostics(run, hid, 1e-4);
        CHECK(d.basin_width == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("surprise score") {
    Layout hid({4, 4, 4});
    SUBCASE("confident winners mean zero surprise") {
        std::vector<double> post(12, 0.0);
        post[0] = post[4] = post[8] = 1.0;
        const SurpriseScore s = surprise(post, hid);
        CHECK(s.total == 0.0);
    }
    SUBCASE("uniform posteriors: H * ln M") {
        std::vector<double> post(12, 0.25);
        const SurpriseScore s = surprise(post, hid);
        CHECK(s.total == doctest::Approx(3.0 * std::log(4.0)).epsilon(1e-12));
        for (double term : s.per_hypercolumn) {
            CHECK(term >= 0.0);
            CHECK(term == doctest::Approx(std::log(4.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("surprise separates in-distribution from uniform noise") {
    Model model(testing::fruit_config());
    oracle::SyntheticGenerator gen(oracle::GenerativeSpec::fruit(0.1), 13);
    testing::train_from_generator(model, gen, 10000);
    const WeightView w = model.weights();

    oracle::SyntheticGenerator id_gen(oracle::GenerativeSpec::fruit(0.1), 14);
    CounterRng rng(15);
    std::vector<double> s_ood, s_id;
    for (int t = 0; t < 300; ++t) {
        const oracle::Sample sample = id_gen.next();
        ActivationState st = forward(Input::one_hot(model.in_layout, sample.states), model, w);
        s_id.push_back(surprise(st.posterior, model.hid_layout).total);

        const Input noise = testing::random_query(rng, model.in_layout);
        ActivationState st2 = forward(noise, model, w);
        s_ood.push_back(surprise(st2.posterior, model.hid_layout).total);
    }
    CHECK(auroc(s_ood, s_id) >= 0.9);
}

TEST_CASE("drift monitor") {
    SUBCASE("baseline-identical samples keep statistics at zero") {
        DriftMonitor mon({0.3}, {0.01}, {0.1});
        for (int t = 0; t < 10000; ++t) {
            const double sample[1] = {0.3};
            CHECK(mon.step(sample).empty());
        }
        CHECK(mon.cusum_pos()[0] == 0.0);
        CHECK(mon.cusum_neg()[0] == 0.0);
    }
    SUBCASE("a 2k mean shift is caught within ceil(h/k) steps") {
        DriftMonitor mon({0.3}, {0.01}, {0.095});
        const int budget = static_cast<int>(std::ceil(0.095 / 0.01));
        int detected = -1;
        for (int t = 0; t < 100 && detected < 0; ++t) {
            const double sample[1] = {0.32};  // shift of exactly 2k
            if (!mon.step(sample).empty()) detected = t + 1;
        }
        REQUIRE(detected > 0);
        CHECK(detected <= budget);
    }
    SUBCASE("downward shifts fire the negative side") {
        DriftMonitor mon({0.3}, {0.01}, {0.05});
        std::vector<DriftMonitor::Alarm> alarms;
        for (int t = 0; t < 100 && alarms.empty(); ++t) {
            const double sample[1] = {0.25};
            alarms = mon.step(sample);
        }
        REQUIRE_FALSE(alarms.empty());
        CHECK(alarms[0].direction == -1);
    }
    SUBCASE("h = 0 alarms on the first deviating sample") {
        DriftMonitor mon({0.3}, {0.0}, {0.0});
        const double same[1] = {0.3};
        CHECK(mon.step(same).empty());
        const double off[1] = {0.31};
        CHECK_FALSE(mon.step(off).empty());
    }
    SUBCASE("smoothed live traces stay quiet under baseline replay") {
        // Raw activations are Bernoulli; the tracker smooths them before the
        // CUSUM sees anything.
        CounterRng rng(17);
        const double p_base = 0.25;
        std::vector<std::vector<double>> baseline;
        for (int t = 0; t < 5000; ++t)
            baseline.push_back({rng.next_bernoulli(p_base) ? 1.0 : 0.0});
        DriftMonitor mon = DriftMonitor::from_baseline(baseline);
        LiveTraceTracker tracker({p_base}, 20.0);
        int alarms = 0;
        for (int t = 0; t < 100000; ++t) {
            const double raw[1] = {rng.next_bernoulli(p_base) ? 1.0 : 0.0};
            alarms += static_cast<int>(mon.step(tracker.update(raw)).size());
        }
        CHECK(alarms <= 1);
    }
}

TEST_CASE("certified radius") {
    SUBCASE("zero-weight model is infinitely robust") {
        Model model(NetworkConfig::make({3, 3}, {4}));
        const WeightView w = model.weights();
        const RobustnessCertificate cert =
            certified_radius(model, w, Input::uniform(model.in_layout), 0);
        CHECK(std::isinf(cert.radius));
        CHECK(cert.challenger == -1);
    }
    SUBCASE("hand linear case: radius = gap / rate") {
        Model model(NetworkConfig::make({2}, {2}));
        TraceState& t = model.traces;
        t.marginal_pre = {0.5, 0.5};
        t.marginal_post = {0.5, 0.5};
        // Weights: w(0,0)=1, w(1,0)=0, w(0,1)=0, w(1,1)=0.5.
        t.ff_joint = {std::exp(1.0) * 0.25, 0.25, 0.25, std::exp(0.5) * 0.25};
        const WeightView w = model.weights();
        Input q;
        q.activity = {0.7, 0.3};
        const RobustnessCertificate cert = certified_radius(model, w, q, 0);
        // gap = 0.55, rate = (0.5 - 0) - (0 - 1) = 1.5.
        CHECK(cert.radius == doctest::Approx(0.55 / 1.5).epsilon(1e-9));
        CHECK(cert.winner == 0);
        CHECK(cert.challenger == 1);
    }
    SUBCASE("sampled soundness and constructed tightness") {
        CounterRng rng(19);
        int tested = 0;
        for (int trial = 0; trial < 40 && tested < 25; ++trial) {
            Model model = testing::random_model(rng, 2, 4);
            const WeightView w = model.weights();
            const Input q = testing::random_query(rng, model.in_layout);
            const RobustnessCertificate cert = certified_radius(model, w, q, 0);
            if (std::isinf(cert.radius) || cert.radius <= 1e-9) continue;
            ++tested;

            CounterRng sampler(1000 + trial);
            const oracle::FlipCheck below =
                oracle::sampled_flip_check(model, q, 0, cert.radius * 0.999, 400, sampler);
            CHECK(below.flips == 0);

            const Input at = perturb_along(cert, q, model.in_layout, cert.radius + 1e-6);
            ActivationState st = forward(at, model, w);
            const double sw =
                st.support[static_cast<size_t>(model.hid_layout.unit(0, cert.winner))];
            const double sc =
                st.support[static_cast<size_t>(model.hid_layout.unit(0, cert.challenger))];
            CHECK(sc >= sw);
        }
        CHECK(tested >= 25);
    }
}

TEST_CASE("winner margin") {
    Layout hid({3});
    SUBCASE("hand case") {
        const std::vector<double> post{0.7, 0.2, 0.1};
        CHECK(winner_margin(post, hid, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("uniform ties give zero margin") {
        const std::vector<double> post{1.0 / 3, 1.0 / 3, 1.0 / 3};
        CHECK(winner_margin(post, hid, 0) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("bounds over random posteriors") {
        CounterRng rng(23);
        for (int t = 0; t < 500; ++t) {
            const std::vector<double> post = testing::random_simplex(rng, 3);
            const double m = winner_margin(post, hid, 0);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
        }
    }
}

TEST_CASE("margin trend while a corrupted input settles is measured, not asserted") {
    // Measured and reported rather than asserted as a hard invariant.
    NetworkConfig cfg = NetworkConfig::make({2}, {4, 4, 4, 4});
    cfg.recurrence = true;
    cfg.tau_p = 1e9;
    Model model(cfg);
    const Input dummy = Input::uniform(model.in_layout);
    std::vector<double> hidden(static_cast<size_t>(model.hid_layout.total), 0.0);
    CounterRng rng(29);
    std::vector<std::vector<int>> pats;
    for (int p = 0; p < 3; ++p) {
        std::vector<int> pat(4);
        for (int j = 0; j < 4; ++j) pat[static_cast<size_t>(j)] = static_cast<int>(rng.next_below(4));
        pats.push_back(pat);
    }
    for (int r = 0; r < 40; ++r) {
        for (const auto& pat : pats) {
            std::fill(hidden.begin(), hidden.end(), 0.0);
            for (int j = 0; j < 4; ++j)
                hidden[static_cast<size_t>(model.hid_layout.unit(j, pat[static_cast<size_t>(j)]))] = 1.0;
            update_traces(model.traces, model.in_layout, model.hid_layout, dummy.activity,
                          hidden, cfg.tau_p, cfg.anneal);
        }
    }
    const WeightView w = model.weights();
    std::vector<double> start(static_cast<size_t>(model.hid_layout.total), 0.0);
    for (int j = 0; j < 4; ++j) {
        // Mildly corrupted copy of pattern 0.
        const int s = j == 1 ? (pats[0][static_cast<size_t>(j)] + 1) % 4 : pats[0][static_cast<size_t>(j)];
        start[static_cast<size_t>(model.hid_layout.unit(j, s))] = 1.0;
    }
    AttractorRun run = settle(model, w, dummy, start, 50, 1e-4);
    bool monotone = true;
    for (size_t t = 1; t + 1 < run.trajectory.size(); ++t) {
        if (winner_margin(run.trajectory[t + 1], model.hid_layout, 0) + 1e-9 <
            winner_margin(run.trajectory[t], model.hid_layout, 0))
            monotone = false;
    }
    // Margins stay bounded either way; monotonicity itself is only observed.
    for (const auto& state : run.trajectory) {
        const double m = winner_margin(state, model.hid_layout, 0);
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
    }
    MESSAGE("margin monotone along settling: ", monotone);
}

TEST_CASE("cross-layer attribution") {
    SUBCASE("single layer degenerates to the flat attribution") {
        CounterRng rng(31);
        Model model = testing::random_model(rng, 2, 4);
        const Input q = testing::random_query(rng, model.in_layout);
        DeepModel deep;
        deep.layers = {&model};
        const AttributionTree tree = cross_layer_attribution(deep, q);

        const WeightView w = model.weights();
        ActivationState st = forward(q, model, w);
        const HidIndex target{model.config.label_hypercolumn,
                              winner(st.posterior, model.hid_layout, model.config.label_hypercolumn)};
        const AttributionVector av = attribute(model, w, st, target);
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].support == av.support);
        CHECK(tree.nodes[0].bias == av.bias);
        for (size_t i = 0; i < av.phi.size(); ++i) CHECK(tree.nodes[0].phi[i] == av.phi[i]);
    }
    SUBCASE("two-layer additive identity and leaf totals vs enumeration") {
        CounterRng rng(37);
        for (int trial = 0; trial < 20; ++trial) {
            // Layer 0: 3 input hcs -> hidden {3, 2}; layer 1: {3, 2} -> {4}.
            NetworkConfig c0 = NetworkConfig::make({2, 3, 2}, {3, 2});
            NetworkConfig c1 = NetworkConfig::make({3, 2}, {4});
            Model l0(c0), l1(c1);
            for (double& v : l0.traces.ff_joint) v = 0.02 + 0.9 * rng.next_double();
            for (double& v : l1.traces.ff_joint) v = 0.02 + 0.9 * rng.next_double();

            const Input q = testing::random_query(rng, l0.in_layout);
            DeepModel deep;
            deep.layers = {&l0, &l1};
            const AttributionTree tree = cross_layer_attribution(deep, q);

            for (const auto& node : tree.nodes) {
                double sum = node.bias;
                for (double p : node.phi) sum += p;
                CHECK(std::abs(sum - node.support) < 1e-12);
            }

            // Independent path enumeration over the two levels.
            const auto& root = tree.nodes[0];
            double norm1 = 0.0;
            for (double p : root.phi) norm1 += std::abs(p);
            std::vector<double> expect_signed(3, 0.0), expect_abs(3, 0.0);
            for (size_t j = 0; j < root.phi.size(); ++j) {
                const auto& child = tree.nodes[static_cast<size_t>(root.child_node[j])];
                double norm0 = 0.0;
                for (double p : child.phi) norm0 += std::abs(p);
                for (size_t i = 0; i < child.phi.size(); ++i) {
                    if (norm1 > 0.0 && norm0 > 0.0) {
                        expect_signed[i] += (root.phi[j] / norm1) * (child.phi[i] / norm0);
                        expect_abs[i] += (std::abs(root.phi[j]) / norm1) * (std::abs(child.phi[i]) / norm0);
                    }
                }
            }
            for (int i = 0; i < 3; ++i) {
                CHECK(tree.leaf_totals_signed[static_cast<size_t>(i)] ==
                      doctest::Approx(expect_signed[static_cast<size_t>(i)]).epsilon(1e-9));
                CHECK(tree.leaf_totals_abs[static_cast<size_t>(i)] ==
                      doctest::Approx(expect_abs[static_cast<size_t>(i)]).epsilon(1e-9));
            }
        }
    }
    SUBCASE("layout mismatch is rejected") {
        Model a(NetworkConfig::make({2}, {3})), b(NetworkConfig::make({4}, {2}));
        DeepModel deep;
        deep.layers = {&a, &b};
        const Input q = Input::uniform(a.in_layout);
        CHECK_THROWS_AS(cross_layer_attribution(deep, q), ConfigError);
    }
}

TEST_CASE("counterfactual difference maps") {
    Model model(testing::fruit_config(true));
    oracle::SyntheticGenerator gen(oracle::GenerativeSpec::fruit(0.0), 41);
    testing::train_from_generator(model, gen, 4000);
    const WeightView w = model.weights();

    // An apple query: (red, round, small).
    const int states[3] = {0, 0, 0};
    const Input x = Input::one_hot(model.in_layout, states);
    ActivationState st = forward(x, model, w);
    const int pred = winner(st.posterior, model.hid_layout, 0);
    REQUIRE(pred == 0);

    SUBCASE("clamping to the prediction changes nothing vs the free reconstruction") {
        const Counterfactual cf = counterfactual(model, w, x, Clamp{0, pred});
        for (uint8_t d : cf.differs_from_free) CHECK(d == 0);
    }
    SUBCASE("clamping to watermelon flips exactly colour and size") {
        const Counterfactual cf = counterfactual(model, w, x, Clamp{0, 3});
        CHECK(cf.differs_from_input[0] == 1);  // red -> green
        CHECK(cf.differs_from_input[1] == 0);  // round stays
        CHECK(cf.differs_from_input[2] == 1);  // small -> large
        CHECK(cf.clamped_winner[0] == 2);
        CHECK(cf.clamped_winner[2] == 2);
    }
}
