#include "bcpnn/explain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bcpnn/errors.hpp"
#include "bcpnn/learning.hpp"
#include "bcpnn/stats.hpp"

namespace bcpnn {

namespace {

void check_target(const Layout& hid, HidIndex t, const char* what) {
    if (t.hypercolumn < 0 || t.hypercolumn >= hid.hypercolumns())
        throw ArgumentError(std::string(what) + ": hypercolumn out of range");
    if (t.minicolumn < 0 || t.minicolumn >= hid.sizes[static_cast<size_t>(t.hypercolumn)])
        throw ArgumentError(std::string(what) + ": minicolumn out of range");
}

}  // namespace

AttributionVector attribute(const Model& model, const WeightView& weights,
                            const ActivationState& state, HidIndex target) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    check_target(hid, target, "attribute");

    const int unit = hid.unit(target.hypercolumn, target.minicolumn);
    AttributionVector av;
    av.target = target;
    av.bias = weights.bias[static_cast<size_t>(unit)];
    av.support = state.support[static_cast<size_t>(unit)];
    av.phi.resize(static_cast<size_t>(in.hypercolumns()));
    for (int i = 0; i < in.hypercolumns(); ++i)
        av.phi[static_cast<size_t>(i)] = state.phi_at(i, unit, hid.total);

    av.evidence.assign(static_cast<size_t>(in.total), 0.0);
    const int j = target.hypercolumn;
    const int mj = hid.sizes[static_cast<size_t>(j)];
    for (int i = 0; i < in.hypercolumns(); ++i) {
        if (!model.traces.connected(i, j)) continue;
        const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
        for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
            av.evidence[static_cast<size_t>(in.unit(i, m))] =
                state.input_activity[static_cast<size_t>(in.unit(i, m))] *
                weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + target.minicolumn];
        }
    }
    return av;
}

PosteriorSummary posterior_summary(const Model& model, const ActivationState& state) {
    const Layout& hid = model.hid_layout;
    PosteriorSummary ps;
    ps.posterior = state.posterior;
    ps.entropy.resize(static_cast<size_t>(hid.hypercolumns()));
    for (int j = 0; j < hid.hypercolumns(); ++j) {
        double hsum = 0.0;
        for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
            const double p = state.posterior[static_cast<size_t>(hid.unit(j, k))];
            if (p > 0.0) hsum -= p * std::log(p);
        }
        ps.entropy[static_cast<size_t>(j)] = hsum;
    }
    return ps;
}

ImportanceGraph global_importance(const Model& model) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    ImportanceGraph g;
    g.edges.reserve(static_cast<size_t>(in.hypercolumns()) * hid.hypercolumns());
    for (int i = 0; i < in.hypercolumns(); ++i) {
        for (int j = 0; j < hid.hypercolumns(); ++j) {
            ImportanceEdge e;
            e.input_hc = i;
            e.hidden_hc = j;
            e.active = model.traces.connected(i, j) != 0;
            e.usage = usage_score(model.traces, in, hid, i, j);
            g.edges.push_back(e);
        }
    }
    std::stable_sort(g.edges.begin(), g.edges.end(),
                     [](const ImportanceEdge& a, const ImportanceEdge& b) { return a.usage > b.usage; });
    return g;
}

ReceptiveField receptive_field(const Model& model, const WeightView& weights,
                               const ActivationState& state, HidIndex target) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    check_target(hid, target, "receptive_field");

    ReceptiveField rf;
    rf.target = target;
    rf.values.assign(static_cast<size_t>(in.total), 0.0);
    const int j = target.hypercolumn;
    const int mj = hid.sizes[static_cast<size_t>(j)];
    for (int i = 0; i < in.hypercolumns(); ++i) {
        if (!model.traces.connected(i, j)) continue;
        const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
        for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
            rf.values[static_cast<size_t>(in.unit(i, m))] =
                state.input_activity[static_cast<size_t>(in.unit(i, m))] *
                weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + target.minicolumn];
        }
    }
    return rf;
}

ReceptiveField receptive_field(const Model& model, const WeightView& weights,
                               std::span<const Input> reference, HidIndex target) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    check_target(hid, target, "receptive_field");
    if (reference.empty()) throw ArgumentError("receptive_field: empty reference set");

    ReceptiveField rf;
    rf.target = target;
    rf.reference_mean = true;
    rf.values.assign(static_cast<size_t>(in.total), 0.0);
    rf.tuning.assign(static_cast<size_t>(in.total), 0.0);
    rf.tuning_counts.assign(static_cast<size_t>(in.total), 0);

    const int unit = hid.unit(target.hypercolumn, target.minicolumn);
    for (const Input& q : reference) {
        ActivationState st = forward(q, model, weights);
        ReceptiveField one = receptive_field(model, weights, st, target);
        for (size_t u = 0; u < rf.values.size(); ++u) rf.values[u] += one.values[u];
        const double pi = st.posterior[static_cast<size_t>(unit)];
        for (int i = 0; i < in.hypercolumns(); ++i) {
            const int win = winner(q.activity, in, i);
            rf.tuning[static_cast<size_t>(in.unit(i, win))] += pi;
            rf.tuning_counts[static_cast<size_t>(in.unit(i, win))] += 1;
        }
    }
    const double n = static_cast<double>(reference.size());
    for (size_t u = 0; u < rf.values.size(); ++u) rf.values[u] /= n;
    for (size_t u = 0; u < rf.tuning.size(); ++u)
        if (rf.tuning_counts[u] > 0) rf.tuning[u] /= static_cast<double>(rf.tuning_counts[u]);
    return rf;
}

AttractorDiagnostics attractor_diagnostics(const AttractorRun& run, const Layout& hid,
                                           double eps) {
    if (run.trajectory.empty()) throw ArgumentError("attractor_diagnostics: empty trajectory");

    // Recompute everything from the trajectory itself so the diagnostics are
    // a pure function of it.
    AttractorDiagnostics d;
    d.settling_step = static_cast<int>(run.trajectory.size()) - 1;
    for (size_t t = 0; t + 1 < run.trajectory.size(); ++t) {
        double inf_norm = 0.0, l2 = 0.0;
        for (size_t u = 0; u < run.trajectory[t].size(); ++u) {
            const double diff = run.trajectory[t + 1][u] - run.trajectory[t][u];
            inf_norm = std::max(inf_norm, std::abs(diff));
            l2 += diff * diff;
        }
        d.trajectory_length += std::sqrt(l2);
        if (!d.converged && inf_norm < eps) {
            d.settling_step = static_cast<int>(t);
            d.converged = true;
        }
    }

    // Basin width: runner-up activation in the dominant hypercolumn of the
    // final state. Dominant = hypercolumn whose winner has the highest
    // activation (lowest index on ties).
    const std::vector<double>& fin = run.trajectory.back();
    int dom = 0;
    double best = -1.0;
    for (int j = 0; j < hid.hypercolumns(); ++j) {
        const double w = fin[static_cast<size_t>(hid.unit(j, winner(fin, hid, j)))];
        if (w > best) {
            best = w;
            dom = j;
        }
    }
    double top = -1.0, second = -1.0;
    for (int k = 0; k < hid.sizes[static_cast<size_t>(dom)]; ++k) {
        const double v = fin[static_cast<size_t>(hid.unit(dom, k))];
        if (v > top) {
            second = top;
            top = v;
        } else if (v > second) {
            second = v;
        }
    }
    d.basin_width = second > 0.0 ? -std::log(second) : std::numeric_limits<double>::infinity();
    return d;
}

Counterfactual counterfactual(const Model& model, const WeightView& weights,
                              const Input& input, Clamp target, bool resettle) {
    const Layout& in = model.in_layout;
    AttractorRun free_run = settle_from_input(model, weights, input);
    Reconstruction free_rc = reconstruct(model, weights, free_run.trajectory.back());
    Reconstruction clamped_rc = reconstruct_clamped(model, weights, input,
                                                    free_run.trajectory.back(), target, resettle);

    Counterfactual cf;
    cf.target = target;
    cf.free_activity = free_rc.activity;
    cf.clamped_activity = clamped_rc.activity;
    cf.input_winner.resize(static_cast<size_t>(in.hypercolumns()));
    cf.free_winner.resize(static_cast<size_t>(in.hypercolumns()));
    cf.clamped_winner.resize(static_cast<size_t>(in.hypercolumns()));
    cf.differs_from_input.resize(static_cast<size_t>(in.hypercolumns()));
    cf.differs_from_free.resize(static_cast<size_t>(in.hypercolumns()));
    for (int i = 0; i < in.hypercolumns(); ++i) {
        cf.input_winner[static_cast<size_t>(i)] = winner(input.activity, in, i);
        cf.free_winner[static_cast<size_t>(i)] = winner(free_rc.activity, in, i);
        cf.clamped_winner[static_cast<size_t>(i)] = winner(clamped_rc.activity, in, i);
        cf.differs_from_input[static_cast<size_t>(i)] =
            cf.clamped_winner[static_cast<size_t>(i)] != cf.input_winner[static_cast<size_t>(i)];
        cf.differs_from_free[static_cast<size_t>(i)] =
            cf.clamped_winner[static_cast<size_t>(i)] != cf.free_winner[static_cast<size_t>(i)];
    }
    return cf;
}

SurpriseScore surprise(std::span<const double> posterior, const Layout& hid) {
    SurpriseScore s;
    s.per_hypercolumn.resize(static_cast<size_t>(hid.hypercolumns()));
    for (int j = 0; j < hid.hypercolumns(); ++j) {
        const int k = winner(posterior, hid, j);
        const double p = posterior[static_cast<size_t>(hid.unit(j, k))];
        const double term = p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
        s.per_hypercolumn[static_cast<size_t>(j)] = term;
        s.total += term;
    }
    return s;
}

DriftMonitor::DriftMonitor(std::vector<double> baseline_mean, std::vector<double> k,
                           std::vector<double> h)
    : baseline_(std::move(baseline_mean)), k_(std::move(k)), h_(std::move(h)) {
    if (baseline_.size() != k_.size() || baseline_.size() != h_.size())
        throw ArgumentError("drift monitor: baseline/k/h size mismatch");
    c_pos_.assign(baseline_.size(), 0.0);
    c_neg_.assign(baseline_.size(), 0.0);
}

DriftMonitor DriftMonitor::from_baseline(const std::vector<std::vector<double>>& baseline,
                                         double k_mult, double h_mult) {
    if (baseline.empty()) throw ArgumentError("drift monitor: empty baseline window");
    const size_t n_traces = baseline.front().size();
    std::vector<double> mean_v(n_traces, 0.0), k(n_traces, 0.0), h(n_traces, 0.0);
    std::vector<double> column(baseline.size());
    for (size_t t = 0; t < n_traces; ++t) {
        for (size_t s = 0; s < baseline.size(); ++s) column[s] = baseline[s][t];
        mean_v[t] = mean(column);
        const double sigma = sample_stddev(column);
        k[t] = k_mult * sigma;
        h[t] = h_mult * sigma;
    }
    return DriftMonitor(std::move(mean_v), std::move(k), std::move(h));
}

std::vector<DriftMonitor::Alarm> DriftMonitor::step(std::span<const double> live_traces) {
    if (live_traces.size() != baseline_.size())
        throw ArgumentError("drift monitor: live sample size mismatch");
    ++steps_;
    std::vector<Alarm> fired;
    for (size_t t = 0; t < baseline_.size(); ++t) {
        const double p = live_traces[t];
        c_pos_[t] = std::max(0.0, c_pos_[t] + (p - baseline_[t] - k_[t]));
        c_neg_[t] = std::max(0.0, c_neg_[t] + (baseline_[t] - p - k_[t]));
        if (c_pos_[t] > h_[t]) {
            fired.push_back({steps_, static_cast<int>(t), +1, c_pos_[t]});
            c_pos_[t] = 0.0;  // restart after an alarm
        }
        if (c_neg_[t] > h_[t]) {
            fired.push_back({steps_, static_cast<int>(t), -1, c_neg_[t]});
            c_neg_[t] = 0.0;
        }
    }
    for (const Alarm& a : fired) alarm_log_.push_back(a);
    return fired;
}

LiveTraceTracker::LiveTraceTracker(std::vector<double> initial, double tau_live)
    : trace_(std::move(initial)), tau_live_(tau_live) {
    if (!(tau_live_ >= 1.0)) throw ArgumentError("live trace tracker: tau must be >= 1");
}

const std::vector<double>& LiveTraceTracker::update(std::span<const double> activations) {
    if (activations.size() != trace_.size())
        throw ArgumentError("live trace tracker: sample size mismatch");
    const double rate = 1.0 / tau_live_;
    for (size_t u = 0; u < trace_.size(); ++u)
        trace_[u] += rate * (activations[u] - trace_[u]);
    return trace_;
}

RobustnessCertificate certified_radius(const Model& model, const WeightView& weights,
                                       const Input& input, int hidden_hc) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    if (hidden_hc < 0 || hidden_hc >= hid.hypercolumns())
        throw ArgumentError("certified_radius: hypercolumn out of range");

    ActivationState state = forward(input, model, weights);
    const int j = hidden_hc;
    const int mj = hid.sizes[static_cast<size_t>(j)];
    const int kstar = winner(state.posterior, hid, j);

    RobustnessCertificate cert;
    cert.hypercolumn = j;
    cert.winner = kstar;
    cert.radius = std::numeric_limits<double>::infinity();

    const double s_win = state.support[static_cast<size_t>(hid.unit(j, kstar))];

    for (int kc = 0; kc < mj; ++kc) {
        if (kc == kstar) continue;
        const double gap = s_win - state.support[static_cast<size_t>(hid.unit(j, kc))];

        // Gather candidate moves: within each connected input hypercolumn,
        // moving mass q from donor m to recipient m' changes the
        // challenger-winner gap at rate
        //   (w[m',kc]-w[m',k*]) - (w[m,kc]-w[m,k*]).
        // The best recipient is independent of the donor, so each donor pairs
        // with the (per-hypercolumn) top advantage state.
        std::vector<CertificateMove> moves;
        for (int i = 0; i < in.hypercolumns(); ++i) {
            if (!model.traces.connected(i, j)) continue;  // masked: no effect on this hc
            const int mi = in.sizes[static_cast<size_t>(i)];
            const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
            std::vector<double> adv(static_cast<size_t>(mi));
            for (int m = 0; m < mi; ++m) {
                adv[static_cast<size_t>(m)] =
                    weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + kc] -
                    weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + kstar];
            }
            int best = 0, second = -1;
            for (int m = 1; m < mi; ++m) {
                if (adv[static_cast<size_t>(m)] > adv[static_cast<size_t>(best)]) {
                    second = best;
                    best = m;
                } else if (second < 0 || adv[static_cast<size_t>(m)] > adv[static_cast<size_t>(second)]) {
                    second = m;
                }
            }
            for (int m = 0; m < mi; ++m) {
                const double cap = input.activity[static_cast<size_t>(in.unit(i, m))];
                if (cap <= 0.0) continue;
                const int recipient = (m == best) ? second : best;
                if (recipient < 0) continue;
                const double rate = adv[static_cast<size_t>(recipient)] - adv[static_cast<size_t>(m)];
                if (rate <= 0.0) continue;
                moves.push_back({i, m, recipient, cap, rate});
            }
        }
        std::stable_sort(moves.begin(), moves.end(),
                         [](const CertificateMove& a, const CertificateMove& b) {
                             return a.rate > b.rate;
                         });

        // A tied challenger (possible only at a higher index, else it would
        // already be the winner) flips only by going strictly above, which
        // needs at least one positive-rate move; an infinitesimal mass then
        // suffices.
        if (gap <= 0.0) {
            if (!moves.empty() && 0.0 < cert.radius) {
                cert.radius = 0.0;
                cert.challenger = kc;
                cert.direction = std::move(moves);
            }
            continue;
        }

        double remaining = gap, mass = 0.0;
        for (const CertificateMove& mv : moves) {
            if (remaining <= 0.0) break;
            const double closable = mv.capacity * mv.rate;
            if (closable >= remaining) {
                mass += remaining / mv.rate;
                remaining = 0.0;
            } else {
                mass += mv.capacity;
                remaining -= closable;
            }
        }
        if (remaining <= 0.0 && mass < cert.radius) {
            cert.radius = mass;
            cert.challenger = kc;
            cert.direction = std::move(moves);
        }
    }
    return cert;
}

Input perturb_along(const RobustnessCertificate& cert, const Input& input, const Layout& in,
                    double mass) {
    Input out = input;
    double budget = mass;
    for (const CertificateMove& mv : cert.direction) {
        if (budget <= 0.0) break;
        const double q = std::min(budget, mv.capacity);
        out.activity[static_cast<size_t>(in.unit(mv.input_hc, mv.donor))] -= q;
        out.activity[static_cast<size_t>(in.unit(mv.input_hc, mv.recipient))] += q;
        budget -= q;
    }
    // Clip tiny negative dust from floating-point subtraction.
    for (double& v : out.activity)
        if (v < 0.0 && v > -1e-15) v = 0.0;
    return out;
}

double winner_margin(std::span<const double> posterior, const Layout& hid, int j) {
    if (j < 0 || j >= hid.hypercolumns())
        throw ArgumentError("winner_margin: hypercolumn out of range");
    double top = -1.0, second = -1.0;
    for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
        const double v = posterior[static_cast<size_t>(hid.unit(j, k))];
        if (v > top) {
            second = top;
            top = v;
        } else if (v > second) {
            second = v;
        }
    }
    return top - second;
}

void DeepModel::validate() const {
    if (layers.empty()) throw ConfigError("deep model: no layers");
    for (size_t l = 0; l + 1 < layers.size(); ++l) {
        const Layout hidden = layers[l]->hid_layout;
        const Layout next_in = layers[l + 1]->in_layout;
        if (hidden.sizes != next_in.sizes)
            throw ConfigError("deep model: layer " + std::to_string(l) +
                              " hidden layout does not match layer " + std::to_string(l + 1) +
                              " input layout");
    }
}

AttributionTree cross_layer_attribution(const DeepModel& deep, const Input& input,
                                        std::optional<HidIndex> top_target) {
    deep.validate();
    const size_t n_layers = deep.layers.size();

    // Forward chain: layer l consumes layer l-1's posterior.
    std::vector<ActivationState> acts(n_layers);
    std::vector<WeightView> weights(n_layers);
    Input current = input;
    for (size_t l = 0; l < n_layers; ++l) {
        weights[l] = deep.layers[l]->weights();
        acts[l] = forward(current, *deep.layers[l], weights[l]);
        current.activity = acts[l].posterior;
    }

    const Model& top = *deep.layers[n_layers - 1];
    HidIndex root = top_target.value_or(HidIndex{
        top.config.label_hypercolumn,
        winner(acts[n_layers - 1].posterior, top.hid_layout, top.config.label_hypercolumn)});

    AttributionTree tree;

    // Expand breadth-first from the root; each node's children are the chosen
    // winner minicolumns of the layer below.
    struct Pending {
        int node;
        int layer;
    };
    std::vector<Pending> queue;

    auto make_node = [&](int layer, HidIndex unit) {
        const Model& m = *deep.layers[static_cast<size_t>(layer)];
        AttributionVector av = attribute(m, weights[static_cast<size_t>(layer)],
                                         acts[static_cast<size_t>(layer)], unit);
        AttributionTreeNode node;
        node.layer = layer;
        node.unit = unit;
        node.support = av.support;
        node.bias = av.bias;
        node.phi = av.phi;
        const int lower_hcs = m.in_layout.hypercolumns();
        node.child_node.assign(static_cast<size_t>(lower_hcs), -1);
        node.child_state.assign(static_cast<size_t>(lower_hcs), -1);
        if (layer > 0) {
            const Model& below = *deep.layers[static_cast<size_t>(layer - 1)];
            for (int i = 0; i < lower_hcs; ++i)
                node.child_state[static_cast<size_t>(i)] =
                    winner(acts[static_cast<size_t>(layer - 1)].posterior, below.hid_layout, i);
        } else {
            for (int i = 0; i < lower_hcs; ++i)
                node.child_state[static_cast<size_t>(i)] = winner(input.activity, m.in_layout, i);
        }
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size()) - 1;
    };

    const int root_idx = make_node(static_cast<int>(n_layers) - 1, root);
    queue.push_back({root_idx, static_cast<int>(n_layers) - 1});
    size_t qi = 0;
    while (qi < queue.size()) {
        const Pending p = queue[qi++];
        if (p.layer == 0) continue;
        const int lower_hcs = deep.layers[static_cast<size_t>(p.layer)]->in_layout.hypercolumns();
        for (int i = 0; i < lower_hcs; ++i) {
            const int state = tree.nodes[static_cast<size_t>(p.node)].child_state[static_cast<size_t>(i)];
            const int child = make_node(p.layer - 1, HidIndex{i, state});
            tree.nodes[static_cast<size_t>(p.node)].child_node[static_cast<size_t>(i)] = child;
            queue.push_back({child, p.layer - 1});
        }
    }

    // Leaf aggregation by chained normalized shares; when a level has zero
    // total absolute contribution its shares are all zero.
    const int raw_inputs = deep.layers[0]->in_layout.hypercolumns();
    tree.leaf_totals_signed.assign(static_cast<size_t>(raw_inputs), 0.0);
    tree.leaf_totals_abs.assign(static_cast<size_t>(raw_inputs), 0.0);

    struct Walk {
        int node;
        double signed_share;
        double abs_share;
    };
    std::vector<Walk> stack{{root_idx, 1.0, 1.0}};
    while (!stack.empty()) {
        const Walk w = stack.back();
        stack.pop_back();
        const AttributionTreeNode& node = tree.nodes[static_cast<size_t>(w.node)];
        double norm = 0.0;
        for (double p : node.phi) norm += std::abs(p);
        for (size_t i = 0; i < node.phi.size(); ++i) {
            const double s_signed = norm > 0.0 ? node.phi[i] / norm : 0.0;
            const double s_abs = norm > 0.0 ? std::abs(node.phi[i]) / norm : 0.0;
            if (node.layer == 0) {
                tree.leaf_totals_signed[i] += w.signed_share * s_signed;
                tree.leaf_totals_abs[i] += w.abs_share * s_abs;
            } else {
                stack.push_back({node.child_node[i], w.signed_share * s_signed,
                                 w.abs_share * s_abs});
            }
        }
    }
    return tree;
}

}  // namespace bcpnn
