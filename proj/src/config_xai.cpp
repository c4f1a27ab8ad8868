#include "bcpnn/config_xai.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "bcpnn/digest.hpp"
#include "bcpnn/errors.hpp"
#include "bcpnn/learning.hpp"
#include "bcpnn/rng.hpp"
#include "bcpnn/stats.hpp"

namespace bcpnn {

namespace {

std::string num6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v + 0.0);  // normalize -0
    if (std::string(buf) == "-0.000000") return "0.000000";
    return buf;
}

}  // namespace

OntologyDocument emit_ontology(const NetworkConfig& cfg) {
    cfg.validate();
    std::ostringstream out;
    out << "bcpnn-ontology v1\n";
    out << "purpose: " << (cfg.purpose.empty() ? "unspecified" : cfg.purpose) << '\n';
    out << "declared: " << (cfg.declared_at.empty() ? "unspecified" : cfg.declared_at) << '\n';

    out << "input-hypercolumns: " << cfg.input.size() << '\n';
    for (size_t i = 0; i < cfg.input.size(); ++i) {
        out << "  attribute " << i << ": " << cfg.input[i].name << " states="
            << cfg.input[i].states.size() << " [";
        for (size_t s = 0; s < cfg.input[i].states.size(); ++s) {
            if (s) out << ", ";
            out << cfg.input[i].states[s];
        }
        out << "]\n";
    }
    out << "hidden-hypercolumns: " << cfg.hidden.size() << '\n';
    for (size_t j = 0; j < cfg.hidden.size(); ++j) {
        out << "  attribute " << j << ": " << cfg.hidden[j].name << " states="
            << cfg.hidden[j].states.size() << " [";
        for (size_t s = 0; s < cfg.hidden[j].states.size(); ++s) {
            if (s) out << ", ";
            out << cfg.hidden[j].states[s];
        }
        out << "]\n";
    }

    out << "connectivity-prior:\n";
    for (size_t i = 0; i < cfg.input.size(); ++i) {
        out << "  " << cfg.input[i].name << " ->";
        for (size_t j = 0; j < cfg.hidden.size(); ++j)
            out << ' ' << static_cast<int>(cfg.prior(static_cast<int>(i), static_cast<int>(j)));
        out << '\n';
    }

    out << "plasticity-threshold rho: " << num6(cfg.rho) << '\n';
    out << "trace-time-constant tau_p: " << num6(cfg.tau_p) << " steps\n";
    out << "recurrence: "
        << (cfg.recurrence
                ? "enabled (max-steps=" + std::to_string(cfg.max_settle_steps) +
                      " tolerance=" + num6(cfg.settle_tolerance) + ")"
                : "disabled")
        << '\n';
    if (cfg.spiking) {
        out << "temporal-scope tau_z: pre=" << num6(cfg.tau_zi_ms) << " ms post="
            << num6(cfg.tau_zj_ms) << " ms\n";
        const double window = std::max(cfg.tau_zi_ms, cfg.tau_zj_ms);
        out << "temporal-scope statement: decisions integrate evidence over approximately the last "
            << num6(window) << " ms of input\n";
    }

    OntologyDocument doc;
    doc.text = out.str();
    doc.digest = fnv1a64(doc.text);
    doc.text += "digest: " + digest_hex(doc.digest) + '\n';
    return doc;
}

OntologyDocument emit_ontology(NetworkConfig cfg,
                               const std::vector<std::vector<std::string>>& input_state_labels,
                               const std::string& purpose) {
    if (input_state_labels.size() != cfg.input.size())
        throw ConfigError("ontology: need one label list per input attribute");
    for (size_t i = 0; i < cfg.input.size(); ++i) {
        if (input_state_labels[i].size() != cfg.input[i].states.size())
            throw ConfigError("ontology: attribute '" + cfg.input[i].name + "' declares " +
                              std::to_string(cfg.input[i].states.size()) + " states but " +
                              std::to_string(input_state_labels[i].size()) + " labels were given");
        cfg.input[i].states = input_state_labels[i];
    }
    if (!purpose.empty()) cfg.purpose = purpose;
    return emit_ontology(cfg);
}

EfficiencyScore efficiency(const Model& model, double flag_ratio) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    const WeightView w = model.weights();

    EfficiencyScore score;
    score.flag_ratio = flag_ratio;
    score.diff.resize(static_cast<size_t>(hid.hypercolumns()), 0.0);

    for (int j = 0; j < hid.hypercolumns(); ++j) {
        const int mj = hid.sizes[static_cast<size_t>(j)];
        // Incoming weight vector per minicolumn over active connections only.
        std::vector<std::vector<double>> vecs(static_cast<size_t>(mj));
        for (int i = 0; i < in.hypercolumns(); ++i) {
            if (!model.traces.connected(i, j)) continue;
            const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
            for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m)
                for (int k = 0; k < mj; ++k)
                    vecs[static_cast<size_t>(k)].push_back(
                        w.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + k]);
        }
        double sum = 0.0;
        for (int k = 0; k < mj; ++k) {
            for (int k2 = 0; k2 < mj; ++k2) {
                if (k == k2) continue;
                double l1 = 0.0;
                for (size_t t = 0; t < vecs[static_cast<size_t>(k)].size(); ++t)
                    l1 += std::abs(vecs[static_cast<size_t>(k)][t] - vecs[static_cast<size_t>(k2)][t]);
                sum += l1;
            }
        }
        score.diff[static_cast<size_t>(j)] = sum / (static_cast<double>(mj) * (mj - 1));
    }

    score.mean_diff = mean(score.diff);

    std::vector<double> sorted = score.diff;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    const double median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (int j = 0; j < hid.hypercolumns(); ++j)
        if (score.diff[static_cast<size_t>(j)] < flag_ratio * median)
            score.flagged.push_back(j);
    return score;
}

FidelityScore fidelity(const Model& model, const std::vector<std::string>& expert_ranking) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    const size_t n = model.config.input.size();
    if (expert_ranking.size() != n)
        throw DataError("fidelity: expert ranking must order all " + std::to_string(n) +
                        " input attributes");

    std::vector<double> expert_rank(n, 0.0);
    std::vector<bool> seen(n, false);
    for (size_t pos = 0; pos < expert_ranking.size(); ++pos) {
        int idx = -1;
        for (size_t i = 0; i < n; ++i)
            if (model.config.input[i].name == expert_ranking[pos]) idx = static_cast<int>(i);
        if (idx < 0)
            throw DataError("fidelity: expert ranking names unknown attribute '" +
                            expert_ranking[pos] + "'");
        if (seen[static_cast<size_t>(idx)])
            throw DataError("fidelity: attribute '" + expert_ranking[pos] + "' listed twice");
        seen[static_cast<size_t>(idx)] = true;
        expert_rank[static_cast<size_t>(idx)] = static_cast<double>(pos + 1);
    }

    std::vector<double> aggregate(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (int j = 0; j < hid.hypercolumns(); ++j)
            aggregate[i] += usage_score(model.traces, in, hid, static_cast<int>(i), j);

    // Rank 1 = most used; ties share average ranks.
    std::vector<double> neg(n);
    for (size_t i = 0; i < n; ++i) neg[i] = -aggregate[i];
    std::vector<double> usage_rank = average_ranks(neg);

    FidelityScore fs;
    fs.cf = spearman(expert_rank, usage_rank);
    fs.expert_order = expert_ranking;

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return aggregate[a] > aggregate[b]; });
    for (size_t i : order) fs.usage_order.push_back(model.config.input[i].name);
    return fs;
}

namespace {

ParetoPoint run_sweep_cell(const NetworkConfig& base, const LabeledDataset& data, double rho,
                           uint64_t seed, int epochs, double train_fraction) {
    NetworkConfig cfg = base;
    cfg.rho = rho;
    Model model(cfg);

    const size_t n = data.size();
    const size_t n_train = std::max<size_t>(1, static_cast<size_t>(train_fraction * static_cast<double>(n)));
    std::vector<size_t> order(n);
    for (size_t r = 0; r < n; ++r) order[r] = r;
    CounterRng rng(seed, 0x5eed);
    for (size_t r = n; r > 1; --r) std::swap(order[r - 1], order[rng.next_below(r)]);

    Trainer trainer(model);
    for (int e = 0; e < epochs; ++e) {
        for (size_t r = 0; r < n_train; ++r) {
            const auto& row = data.rows[order[r]];
            trainer.step(Input::one_hot(model.in_layout, row), data.labels[order[r]]);
        }
    }

    const WeightView w = model.weights();
    int correct = 0, total = 0;
    for (size_t r = n_train; r < n; ++r) {
        ActivationState st = forward(Input::one_hot(model.in_layout, data.rows[order[r]]), model, w);
        const int pred = winner(st.posterior, model.hid_layout, model.config.label_hypercolumn);
        correct += pred == data.labels[order[r]];
        ++total;
    }

    ParetoPoint p;
    p.rho = rho;
    p.seed = seed;
    p.accuracy = total > 0 ? static_cast<double>(correct) / total : 0.0;
    p.active_connections = 0;
    for (int i = 0; i < model.in_layout.hypercolumns(); ++i)
        p.active_connections += model.traces.active_out_degree(i);
    p.mean_graph_size = static_cast<double>(p.active_connections) / model.hid_layout.hypercolumns();
    return p;
}

}  // namespace

ParetoCurve rho_sweep(const NetworkConfig& base, const LabeledDataset& data,
                      const SweepOptions& opts) {
    if (opts.rho_grid.empty()) throw ArgumentError("rho_sweep: empty rho grid");
    if (opts.seeds.empty()) throw ArgumentError("rho_sweep: empty seed list");
    if (!data.has_labels()) throw DataError("rho_sweep: dataset has no label column");

    struct Cell {
        double rho;
        uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double rho : opts.rho_grid)
        for (uint64_t seed : opts.seeds) cells.push_back({rho, seed});

    ParetoCurve curve;
    curve.epochs = opts.epochs;
    curve.points.resize(cells.size());

    const int jobs = std::max(1, opts.jobs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t c = next.fetch_add(1);
            if (c >= cells.size()) break;
            curve.points[c] = run_sweep_cell(base, data, cells[c].rho, cells[c].seed,
                                             opts.epochs, opts.train_fraction);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return curve;
}

std::string pareto_table(const ParetoCurve& curve) {
    std::ostringstream out;
    out << "rho\tseed\taccuracy\tactive_connections\tmean_graph_size\n";
    for (const auto& p : curve.points) {
        out << num6(p.rho) << '\t' << p.seed << '\t' << num6(p.accuracy) << '\t'
            << p.active_connections << '\t' << num6(p.mean_graph_size) << '\n';
    }
    return out.str();
}

}  // namespace bcpnn
