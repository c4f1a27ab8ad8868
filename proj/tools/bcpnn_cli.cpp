// Command-line surface: train / explain / audit / sweep / monitor.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 invariant violation (engine bug), 4 non-convergence warnings present.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bcpnn/config_xai.hpp"
#include "bcpnn/dataset.hpp"
#include "bcpnn/digest.hpp"
#include "bcpnn/errors.hpp"
#include "bcpnn/explain.hpp"
#include "bcpnn/learning.hpp"
#include "bcpnn/recurrent.hpp"
#include "bcpnn/report.hpp"
#include "bcpnn/rng.hpp"
#include "bcpnn/snapshot.hpp"
#include "bcpnn/spiking.hpp"

namespace {

using namespace bcpnn;

struct NonConvergenceFlag {
    bool raised = false;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(text);
    while (std::getline(is, field, sep)) out.push_back(field);
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& tok : split(text, ',')) {
        if (tok == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
        } else {
            out.push_back(std::stod(tok));
        }
    }
    return out;
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> out;
    for (const std::string& tok : split(text, ',')) out.push_back(std::stoull(tok));
    return out;
}

int state_index(const AttributeSpec& attr, const std::string& value) {
    for (size_t s = 0; s < attr.states.size(); ++s)
        if (attr.states[s] == value) return static_cast<int>(s);
    try {
        size_t pos = 0;
        const int idx = std::stoi(value, &pos);
        if (pos == value.size() && idx >= 0 && idx < static_cast<int>(attr.states.size()))
            return idx;
    } catch (...) {
    }
    throw DataError("query: unknown state '" + value + "' for attribute '" + attr.name + "'");
}

/// Query syntax: either positional "red,round,small" or named
/// "Shape=round,Colour=red,Size=small".
Input parse_query(const std::string& text, const Model& model) {
    const std::vector<std::string> parts = split(text, ',');
    const size_t n = model.config.input.size();
    if (parts.size() != n)
        throw DataError("query: expected " + std::to_string(n) + " attribute values, got " +
                        std::to_string(parts.size()));
    std::vector<int> states(n, -1);
    const bool named = parts[0].find('=') != std::string::npos;
    for (size_t p = 0; p < parts.size(); ++p) {
        if (named) {
            const size_t eq = parts[p].find('=');
            if (eq == std::string::npos) throw DataError("query: mixed named and positional values");
            const std::string name = parts[p].substr(0, eq);
            const std::string value = parts[p].substr(eq + 1);
            int idx = -1;
            for (size_t i = 0; i < n; ++i)
                if (model.config.input[i].name == name) idx = static_cast<int>(i);
            if (idx < 0) throw DataError("query: unknown attribute '" + name + "'");
            states[static_cast<size_t>(idx)] =
                state_index(model.config.input[static_cast<size_t>(idx)], value);
        } else {
            states[p] = state_index(model.config.input[p], parts[p]);
        }
    }
    for (int s : states)
        if (s < 0) throw DataError("query: an attribute is missing a value");
    return Input::one_hot(model.in_layout, states);
}

std::string hidden_state_name(const NetworkConfig& cfg, int j, int k) {
    return cfg.hidden[static_cast<size_t>(j)].name + "=" +
           cfg.hidden[static_cast<size_t>(j)].states[static_cast<size_t>(k)];
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string config_path, dataset_path, snapshot_path;
    std::string mode = "supervised";
    std::string log_path, ontology_path;
    int epochs = 5;
    uint64_t seed = 0;
};

int cmd_train(const TrainArgs& args) {
    NetworkConfig cfg = NetworkConfig::from_json_file(args.config_path);

    // Config-P1 precedes training: the scope document is written before a
    // single data point is absorbed.
    const OntologyDocument ontology = emit_ontology(cfg);
    const std::string ontology_path =
        args.ontology_path.empty() ? args.snapshot_path + ".ontology" : args.ontology_path;
    write_file(ontology_path, ontology.text);

    const LabeledDataset data = load_dataset(args.dataset_path, cfg);
    if (data.rows.empty()) throw DataError("train: dataset has no rows");
    const bool supervised = args.mode == "supervised";
    if (supervised && !data.has_labels())
        throw DataError("train: supervised mode requires a label column");

    Model model(cfg);
    std::ofstream log_stream;
    TrainerOptions topts;
    topts.mode = supervised ? TrainMode::supervised : TrainMode::unsupervised;
    if (!args.log_path.empty()) {
        log_stream.open(args.log_path, std::ios::trunc);
        if (!log_stream) throw DataError("train: cannot write log '" + args.log_path + "'");
        topts.log = &log_stream;
    }
    Trainer trainer(model, topts);

    std::vector<size_t> order(data.rows.size());
    for (size_t r = 0; r < order.size(); ++r) order[r] = r;
    for (int e = 0; e < args.epochs; ++e) {
        CounterRng rng(args.seed, static_cast<uint64_t>(e) + 1);
        for (size_t r = order.size(); r > 1; --r) std::swap(order[r - 1], order[rng.next_below(r)]);
        for (size_t r : order) {
            trainer.step(Input::one_hot(model.in_layout, data.rows[r]),
                         supervised ? std::optional<int>(data.labels[r]) : std::nullopt);
        }
    }

    save_snapshot(model, args.snapshot_path);

    if (supervised) {
        const WeightView w = model.weights();
        int correct = 0;
        for (size_t r = 0; r < data.rows.size(); ++r) {
            ActivationState st = forward(Input::one_hot(model.in_layout, data.rows[r]), model, w);
            correct +=
                winner(st.posterior, model.hid_layout, cfg.label_hypercolumn) == data.labels[r];
        }
        std::cout << "train: " << data.rows.size() << " rows x " << args.epochs
                  << " epochs, accuracy "
                  << format_value(static_cast<double>(correct) / static_cast<double>(data.rows.size()))
                  << "\n";
    } else {
        std::cout << "train: " << data.rows.size() << " rows x " << args.epochs
                  << " epochs (unsupervised)\n";
    }
    std::cout << "snapshot: " << args.snapshot_path << "\n";
    std::cout << "ontology: " << ontology_path << " digest " << digest_hex(ontology.digest) << "\n";
    if (!trainer.events().empty())
        std::cout << "structural swaps: " << trainer.events().size() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// explain

struct ExplainArgs {
    std::string snapshot_path, query, primitives = "p11";
    std::string out_path, trajectory_path, raster_path, reference_path;
    int target = -1;
    int counterfactual_target = -1;
    uint64_t seed = 0;
    int spike_steps = 1000;
    int saliency_window = 50;
    double tau_z_override = 0.0;
    bool settled_surprise = false;
};

bool selected(const std::vector<std::string>& prims, const std::string& id) {
    for (const auto& p : prims)
        if (p == id || p == "all") return true;
    return false;
}

int cmd_explain(const ExplainArgs& args, NonConvergenceFlag& warn) {
    Model model = load_snapshot(args.snapshot_path);
    const NetworkConfig& cfg = model.config;
    const WeightView weights = model.weights();
    const Input query = parse_query(args.query, model);

    std::vector<std::string> prims = split(args.primitives, ',');
    const std::vector<std::string> known = {"p1", "p2",  "p3",  "p4",  "p5",  "p6",  "p7",  "p8",
                                            "p9", "p10", "p11", "p12", "p13", "p14", "p15", "p16"};
    for (const auto& p : prims) {
        if (p == "all") continue;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == p;
        if (!ok) throw DataError("explain: unknown primitive '" + p + "'");
    }

    ActivationState state = forward(query, model, weights);
    const int label_hc = cfg.label_hypercolumn;
    const int pred = winner(state.posterior, model.hid_layout, label_hc);
    const HidIndex target{label_hc, args.target >= 0 ? args.target : pred};
    if (target.minicolumn >= model.hid_layout.sizes[static_cast<size_t>(label_hc)])
        throw DataError("explain: target minicolumn out of range");

    ReportWriter report("explanation");
    report.kv("snapshot", args.snapshot_path);
    report.kv("snapshot_digest", digest_hex(snapshot_file_digest(args.snapshot_path)));
    report.kv("query", args.query);
    report.kv("query_digest", digest_hex(args.query));
    report.kv("seed", args.seed);
    report.kv("prediction", hidden_state_name(cfg, label_hc, pred));
    report.kv("tie_breaking", "lowest index wins on exact ties");
    report.kv("usage_denominator", "active outgoing connections of the input hypercolumn");
    report.kv("z_trace_indexing", "per-minicolumn traces, normalized to rate scale");

    const AttributionVector attribution = attribute(model, weights, state, target);

    if (selected(prims, "p1")) {
        report.section("p1");
        report.kv("target", hidden_state_name(cfg, target.hypercolumn, target.minicolumn));
        for (int i = 0; i < model.in_layout.hypercolumns(); ++i)
            for (int m = 0; m < model.in_layout.sizes[static_cast<size_t>(i)]; ++m)
                report.kv("evidence[" + cfg.input[static_cast<size_t>(i)].name + "=" +
                              cfg.input[static_cast<size_t>(i)].states[static_cast<size_t>(m)] + "]",
                          attribution.evidence[static_cast<size_t>(model.in_layout.unit(i, m))]);
    }
    if (selected(prims, "p2")) {
        report.section("p2");
        for (int k = 0; k < model.hid_layout.sizes[static_cast<size_t>(label_hc)]; ++k)
            report.kv("bias[" + hidden_state_name(cfg, label_hc, k) + "]",
                      weights.bias[static_cast<size_t>(model.hid_layout.unit(label_hc, k))]);
    }
    if (selected(prims, "p3")) {
        const PosteriorSummary ps = posterior_summary(model, state);
        report.section("p3");
        for (int j = 0; j < model.hid_layout.hypercolumns(); ++j) {
            for (int k = 0; k < model.hid_layout.sizes[static_cast<size_t>(j)]; ++k)
                report.kv("posterior[" + hidden_state_name(cfg, j, k) + "]",
                          ps.posterior[static_cast<size_t>(model.hid_layout.unit(j, k))]);
            report.kv("entropy[" + cfg.hidden[static_cast<size_t>(j)].name + "]",
                      ps.entropy[static_cast<size_t>(j)]);
        }
    }
    if (selected(prims, "p4") || selected(prims, "p5")) {
        const ImportanceGraph graph = global_importance(model);
        report.section("p4p5");
        for (const auto& e : graph.edges) {
            report.kv("edge[" + cfg.input[static_cast<size_t>(e.input_hc)].name + "->" +
                          cfg.hidden[static_cast<size_t>(e.hidden_hc)].name + "]",
                      std::string(e.active ? "active" : "silent") + " usage " +
                          format_value(e.usage));
        }
    }
    if (selected(prims, "p6") || selected(prims, "p7")) {
        report.section("p6p7");
        report.kv("target", hidden_state_name(cfg, target.hypercolumn, target.minicolumn));
        if (!args.reference_path.empty()) {
            const LabeledDataset ref = load_dataset(args.reference_path, cfg);
            std::vector<Input> queries;
            queries.reserve(ref.rows.size());
            for (const auto& row : ref.rows) queries.push_back(Input::one_hot(model.in_layout, row));
            const ReceptiveField rf = receptive_field(model, weights, queries, target);
            report.kv("mode", "reference-mean over " + std::to_string(queries.size()) + " queries");
            for (int i = 0; i < model.in_layout.hypercolumns(); ++i)
                for (int m = 0; m < model.in_layout.sizes[static_cast<size_t>(i)]; ++m) {
                    const int u = model.in_layout.unit(i, m);
                    const std::string cell = cfg.input[static_cast<size_t>(i)].name + "=" +
                                             cfg.input[static_cast<size_t>(i)].states[static_cast<size_t>(m)];
                    report.kv("field[" + cell + "]", rf.values[static_cast<size_t>(u)]);
                    report.kv("tuning[" + cell + "]", rf.tuning[static_cast<size_t>(u)]);
                }
        } else {
            const ReceptiveField rf = receptive_field(model, weights, state, target);
            report.kv("mode", "single-query");
            for (int i = 0; i < model.in_layout.hypercolumns(); ++i)
                for (int m = 0; m < model.in_layout.sizes[static_cast<size_t>(i)]; ++m)
                    report.kv("field[" + cfg.input[static_cast<size_t>(i)].name + "=" +
                                  cfg.input[static_cast<size_t>(i)].states[static_cast<size_t>(m)] + "]",
                              rf.values[static_cast<size_t>(model.in_layout.unit(i, m))]);
        }
    }

    std::optional<AttractorRun> settled_run;
    if (cfg.recurrence) settled_run = settle_from_input(model, weights, query);

    if (selected(prims, "p8")) {
        report.section("p8");
        if (!cfg.recurrence) {
            report.kv("unavailable", "recurrence disabled");
        } else {
            const AttractorDiagnostics d =
                attractor_diagnostics(*settled_run, model.hid_layout, cfg.settle_tolerance);
            report.kv("settling_steps", d.settling_step);
            report.kv("converged", d.converged ? "true" : "false");
            report.kv("basin_width", d.basin_width);
            report.kv("trajectory_length", d.trajectory_length);
            if (!d.converged) warn.raised = true;
            if (!args.trajectory_path.empty()) {
                std::ostringstream dump;
                for (size_t t = 0; t < settled_run->trajectory.size(); ++t) {
                    for (int j = 0; j < model.hid_layout.hypercolumns(); ++j) {
                        dump << "t=" << t << " hc=" << j << " pi=";
                        for (int k = 0; k < model.hid_layout.sizes[static_cast<size_t>(j)]; ++k) {
                            if (k) dump << ',';
                            dump << format_value(
                                settled_run->trajectory[t][static_cast<size_t>(model.hid_layout.unit(j, k))]);
                        }
                        dump << '\n';
                    }
                }
                write_file(args.trajectory_path, dump.str());
                report.kv("trajectory_dump", args.trajectory_path);
            }
        }
    }
    if (selected(prims, "p9")) {
        report.section("p9");
        if (!cfg.recurrence) {
            report.kv("unavailable", "recurrence disabled");
        } else {
            const int cf_target =
                args.counterfactual_target >= 0
                    ? args.counterfactual_target
                    : (pred + 1) % model.hid_layout.sizes[static_cast<size_t>(label_hc)];
            const Counterfactual cf =
                counterfactual(model, weights, query, Clamp{label_hc, cf_target});
            report.kv("target", hidden_state_name(cfg, label_hc, cf_target));
            for (int i = 0; i < model.in_layout.hypercolumns(); ++i) {
                const auto& attr = cfg.input[static_cast<size_t>(i)];
                report.kv("reconstruction[" + attr.name + "]",
                          attr.states[static_cast<size_t>(cf.clamped_winner[static_cast<size_t>(i)])] +
                              (cf.differs_from_input[static_cast<size_t>(i)] ? " (changed)" : " (kept)"));
            }
        }
    }
    if (selected(prims, "p10")) {
        report.section("p10");
        if (!cfg.spiking) {
            report.kv("unavailable", "spiking substrate not declared");
        } else {
            NetworkConfig spike_cfg = cfg;
            if (args.tau_z_override > 0.0) {
                spike_cfg.tau_zi_ms = args.tau_z_override;
                spike_cfg.tau_zj_ms = args.tau_z_override;
            }
            Model spike_model = model;
            spike_model.config = spike_cfg;
            SpikingRun run(spike_cfg, args.seed);
            run.record_history(true);
            run.record_raster(!args.raster_path.empty());
            for (int t = 0; t < args.spike_steps; ++t) run.step(query.activity, state.posterior);
            const TemporalSaliency sal =
                temporal_saliency(run.history(), spike_model, weights, target, args.saliency_window);
            report.kv("steps", args.spike_steps);
            report.kv("window_ms", format_value(args.saliency_window * spike_cfg.dt_ms));
            report.kv("peak_window", sal.peak_window);
            for (size_t w = 0; w < sal.window_totals.size(); ++w)
                report.kv("window[" + std::to_string(w) + "]", sal.window_totals[w]);
            if (!args.raster_path.empty()) {
                std::ostringstream raster;
                write_raster(raster, run.raster());
                write_file(args.raster_path, raster.str());
                report.kv("raster", args.raster_path);
            }
        }
    }
    if (selected(prims, "p11")) {
        report.section("p11");
        report.kv("target", hidden_state_name(cfg, target.hypercolumn, target.minicolumn));
        report.kv("prior", attribution.bias);
        for (int i = 0; i < model.in_layout.hypercolumns(); ++i)
            report.kv("phi[" + cfg.input[static_cast<size_t>(i)].name + "]",
                      attribution.phi[static_cast<size_t>(i)]);
        report.kv("total", attribution.support);
    }
    if (selected(prims, "p12")) {
        report.section("p12");
        const bool use_settled = args.settled_surprise && settled_run.has_value();
        const SurpriseScore s = surprise(
            use_settled ? settled_run->trajectory.back() : state.posterior, model.hid_layout);
        report.kv("posterior", use_settled ? "settled" : "feedforward");
        report.kv("surprise", s.total);
        for (int j = 0; j < model.hid_layout.hypercolumns(); ++j)
            report.kv("surprisal[" + cfg.hidden[static_cast<size_t>(j)].name + "]",
                      s.per_hypercolumn[static_cast<size_t>(j)]);
    }
    if (selected(prims, "p13")) {
        report.section("p13");
        report.kv("note", "stateful drift monitor; run the monitor command on a live stream");
    }
    if (selected(prims, "p14")) {
        report.section("p14");
        report.kv("metric", "total-variation");
        for (int j = 0; j < model.hid_layout.hypercolumns(); ++j) {
            const RobustnessCertificate cert = certified_radius(model, weights, query, j);
            report.kv("radius[" + cfg.hidden[static_cast<size_t>(j)].name + "]", cert.radius);
            report.kv("winner[" + cfg.hidden[static_cast<size_t>(j)].name + "]",
                      hidden_state_name(cfg, j, cert.winner));
        }
    }
    if (selected(prims, "p15")) {
        report.section("p15");
        for (int j = 0; j < model.hid_layout.hypercolumns(); ++j)
            report.kv("margin[" + cfg.hidden[static_cast<size_t>(j)].name + "]",
                      winner_margin(state.posterior, model.hid_layout, j));
    }
    if (selected(prims, "p16")) {
        report.section("p16");
        DeepModel deep;
        deep.layers = {&model};
        const AttributionTree tree = cross_layer_attribution(deep, query, target);
        report.kv("layers", 1);
        report.kv("note", "single layer: identical to the flat attribution");
        for (size_t i = 0; i < tree.leaf_totals_signed.size(); ++i) {
            report.kv("leaf_signed[" + cfg.input[i].name + "]", tree.leaf_totals_signed[i]);
            report.kv("leaf_abs[" + cfg.input[i].name + "]", tree.leaf_totals_abs[i]);
        }
    }

    const std::string text = report.finish();
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        write_file(args.out_path, text);
    }
    return warn.raised ? 4 : 0;
}

// ---------------------------------------------------------------------------
// audit

struct AuditArgs {
    std::string snapshot_path, expert_ranking_path, out_path;
    double flag_ratio = 0.05;
};

int cmd_audit(const AuditArgs& args) {
    Model model = load_snapshot(args.snapshot_path);
    const NetworkConfig& cfg = model.config;

    ReportWriter report("audit");
    report.kv("snapshot", args.snapshot_path);
    report.kv("snapshot_digest", digest_hex(snapshot_file_digest(args.snapshot_path)));
    report.kv("ontology_digest", digest_hex(emit_ontology(cfg).digest));
    report.kv("seed", "none (audit is seedless and deterministic)");

    const EfficiencyScore eff = efficiency(model, args.flag_ratio);
    report.section("config-p2");
    for (int j = 0; j < model.hid_layout.hypercolumns(); ++j)
        report.kv("diff[" + cfg.hidden[static_cast<size_t>(j)].name + "]",
                  eff.diff[static_cast<size_t>(j)]);
    report.kv("mean_diff", eff.mean_diff);
    if (eff.flagged.empty()) {
        report.kv("flagged", "none");
    } else {
        for (int j : eff.flagged)
            report.kv("flagged",
                      cfg.hidden[static_cast<size_t>(j)].name + " (undifferentiated minicolumns)");
    }

    if (args.expert_ranking_path.empty()) {
        report.section("config-p4");
        report.kv("omitted", "no expert ranking supplied");
    } else {
        std::ifstream in(args.expert_ranking_path);
        if (!in) throw DataError("audit: cannot open '" + args.expert_ranking_path + "'");
        std::vector<std::string> ranking;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty()) ranking.push_back(line);
        }
        const FidelityScore fs = fidelity(model, ranking);
        report.section("config-p4");
        report.kv("cf", fs.cf);
        for (size_t i = 0; i < fs.expert_order.size(); ++i)
            report.kv("expert[" + std::to_string(i) + "]", fs.expert_order[i]);
        for (size_t i = 0; i < fs.usage_order.size(); ++i)
            report.kv("usage[" + std::to_string(i) + "]", fs.usage_order[i]);
        report.kv("ties", fs.tie_note);
    }

    const std::string text = report.finish();
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        write_file(args.out_path, text);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string config_path, dataset_path, out_path;
    std::string rho_grid = "1.1,2,10";
    std::string seeds = "1";
    int epochs = 5;
    int jobs = 1;
};

int cmd_sweep(const SweepArgs& args) {
    const NetworkConfig cfg = NetworkConfig::from_json_file(args.config_path);
    const LabeledDataset data = load_dataset(args.dataset_path, cfg);

    SweepOptions opts;
    opts.rho_grid = parse_double_list(args.rho_grid);
    opts.seeds = parse_seed_list(args.seeds);
    opts.epochs = args.epochs;
    opts.jobs = args.jobs;
    const ParetoCurve curve = rho_sweep(cfg, data, opts);

    // Post-run invariant: per seed, active connections never increase along
    // the rho grid (swaps preserve per-hypercolumn in-degree).
    for (size_t s = 0; s < opts.seeds.size(); ++s) {
        int prev = -1;
        for (size_t g = 0; g < opts.rho_grid.size(); ++g) {
            const int count = curve.points[g * opts.seeds.size() + s].active_connections;
            if (prev >= 0 && count > prev)
                throw InvariantError("sweep: active connection count increased along the rho grid");
            prev = count;
        }
    }

    const std::string table = pareto_table(curve);
    if (args.out_path.empty()) {
        std::cout << table;
    } else {
        write_file(args.out_path, table);
        std::cout << "sweep: " << curve.points.size() << " cells -> " << args.out_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// monitor

struct MonitorArgs {
    std::string snapshot_path, dataset_path, out_path;
    int baseline = 1000;
    double cusum_k = 0.5;
    double cusum_h = 5.0;
    double tau_live = 20.0;
};

int cmd_monitor(const MonitorArgs& args) {
    Model model = load_snapshot(args.snapshot_path);
    const NetworkConfig& cfg = model.config;
    const WeightView weights = model.weights();
    const LabeledDataset data = load_dataset(args.dataset_path, cfg);
    if (static_cast<int>(data.rows.size()) <= args.baseline)
        throw DataError("monitor: stream shorter than the baseline window");

    const Layout& hid = model.hid_layout;
    std::vector<std::vector<double>> baseline;
    baseline.reserve(static_cast<size_t>(args.baseline));
    for (int r = 0; r < args.baseline; ++r) {
        ActivationState st = forward(
            Input::one_hot(model.in_layout, data.rows[static_cast<size_t>(r)]), model, weights);
        baseline.push_back(st.posterior);
    }
    DriftMonitor monitor = DriftMonitor::from_baseline(baseline, args.cusum_k, args.cusum_h);
    LiveTraceTracker tracker(monitor.baseline(), args.tau_live);

    std::ostringstream events;
    uint64_t n_alarms = 0;
    for (size_t r = static_cast<size_t>(args.baseline); r < data.rows.size(); ++r) {
        ActivationState st = forward(Input::one_hot(model.in_layout, data.rows[r]), model, weights);
        const std::vector<DriftMonitor::Alarm> alarms = monitor.step(tracker.update(st.posterior));
        for (const auto& a : alarms) {
            ++n_alarms;
            int j = 0, k = a.trace;
            while (k >= hid.sizes[static_cast<size_t>(j)]) k -= hid.sizes[static_cast<size_t>(j++)];
            events << "alarm step=" << a.step << " trace=" << hidden_state_name(cfg, j, k)
                   << " direction=" << (a.direction > 0 ? "+1" : "-1")
                   << " statistic=" << format_value(a.statistic) << "\n";
        }
    }
    events << "monitor: " << (data.rows.size() - static_cast<size_t>(args.baseline))
           << " live steps, " << n_alarms << " alarms\n";

    if (args.out_path.empty()) {
        std::cout << events.str();
    } else {
        write_file(args.out_path, events.str());
        std::cout << "monitor: " << n_alarms << " alarms -> " << args.out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian confidence propagation network engine with native explanations"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a model and write a snapshot");
    train->add_option("--config", train_args.config_path, "Network configuration (JSON)")->required();
    train->add_option("--dataset", train_args.dataset_path, "Training data (delimited text)")->required();
    train->add_option("--snapshot", train_args.snapshot_path, "Output snapshot path")->required();
    train->add_option("--mode", train_args.mode, "supervised|unsupervised")
        ->check(CLI::IsMember({"supervised", "unsupervised"}));
    train->add_option("--epochs", train_args.epochs, "Training epochs");
    train->add_option("--seed", train_args.seed, "Shuffle seed");
    train->add_option("--log", train_args.log_path, "Training log path");
    train->add_option("--ontology", train_args.ontology_path, "Ontology document path");

    ExplainArgs explain_args;
    CLI::App* explain = app.add_subcommand("explain", "Emit an explanation report for one query");
    explain->add_option("--snapshot", explain_args.snapshot_path, "Model snapshot")->required();
    explain->add_option("--query", explain_args.query,
                        "Query (values or name=value, comma separated)")->required();
    explain->add_option("--primitives", explain_args.primitives, "Comma list of p1..p16, or 'all'");
    explain->add_option("--out", explain_args.out_path, "Report path (stdout when omitted)");
    explain->add_option("--target", explain_args.target, "Target minicolumn (default: winner)");
    explain->add_option("--counterfactual-target", explain_args.counterfactual_target,
                        "Clamp target for p9 (default: runner-up class)");
    explain->add_option("--seed", explain_args.seed, "Seed for spiking replays");
    explain->add_option("--spike-steps", explain_args.spike_steps, "Spiking replay length (p10)");
    explain->add_option("--saliency-window", explain_args.saliency_window,
                        "Saliency window in steps (p10)");
    explain->add_option("--tau-z", explain_args.tau_z_override, "Override tau_z in ms (p10)");
    explain->add_option("--dump-trajectory", explain_args.trajectory_path,
                        "Write the settling trajectory (p8)");
    explain->add_option("--raster", explain_args.raster_path, "Write the spike raster (p10)");
    explain->add_option("--reference", explain_args.reference_path,
                        "Reference dataset for p6/p7 aggregation");
    explain->add_flag("--settled", explain_args.settled_surprise,
                      "Use the settled posterior for p12");

    AuditArgs audit_args;
    CLI::App* audit = app.add_subcommand("audit", "Configuration audit (Config-P2/P4)");
    audit->add_option("--snapshot", audit_args.snapshot_path, "Model snapshot")->required();
    audit->add_option("--expert-ranking", audit_args.expert_ranking_path,
                      "Expert importance ranking, one attribute label per line");
    audit->add_option("--out", audit_args.out_path, "Report path (stdout when omitted)");
    audit->add_option("--flag-ratio", audit_args.flag_ratio, "Low-differentiation flag ratio");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "rho sweep (Config-P3 Pareto table)");
    sweep->add_option("--config", sweep_args.config_path, "Network configuration (JSON)")->required();
    sweep->add_option("--dataset", sweep_args.dataset_path, "Labeled dataset")->required();
    sweep->add_option("--rho-grid", sweep_args.rho_grid, "Comma list of rho values ('inf' allowed)");
    sweep->add_option("--seeds", sweep_args.seeds, "Comma list of seeds");
    sweep->add_option("--epochs", sweep_args.epochs, "Epochs per cell");
    sweep->add_option("--jobs", sweep_args.jobs, "Parallel cells");
    sweep->add_option("--out", sweep_args.out_path, "Table path (stdout when omitted)");

    MonitorArgs monitor_args;
    CLI::App* monitor = app.add_subcommand("monitor", "CUSUM drift monitoring over a live stream");
    monitor->add_option("--snapshot", monitor_args.snapshot_path, "Model snapshot")->required();
    monitor->add_option("--dataset", monitor_args.dataset_path, "Live stream (delimited text)")
        ->required();
    monitor->add_option("--baseline", monitor_args.baseline, "Baseline window rows");
    monitor->add_option("--cusum-k", monitor_args.cusum_k, "Slack, in baseline sigmas");
    monitor->add_option("--cusum-h", monitor_args.cusum_h, "Threshold, in baseline sigmas");
    monitor->add_option("--tau-live", monitor_args.tau_live, "Live trace time constant (steps)");
    monitor->add_option("--out", monitor_args.out_path, "Event stream path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*train) return cmd_train(train_args);
        if (*explain) {
            NonConvergenceFlag warn;
            return cmd_explain(explain_args, warn);
        }
        if (*audit) return cmd_audit(audit_args);
        if (*sweep) return cmd_sweep(sweep_args);
        if (*monitor) return cmd_monitor(monitor_args);
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const UndefinedUsageError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
