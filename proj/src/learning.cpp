#include "bcpnn/learning.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "bcpnn/errors.hpp"

namespace bcpnn {

namespace {

inline void ema(double& p, double target, double rate, double& abs_change, int64_t& n) {
    const double next = p + rate * (target - p);
    abs_change += std::abs(next - p);
    ++n;
    p = next;
}

}  // namespace

double update_traces(TraceState& traces, const Layout& in, const Layout& hid,
                     std::span<const double> input_activity,
                     std::span<const double> hidden_activity, double tau_p, bool anneal) {
    if (!(tau_p > 0.0)) throw ConfigError("update_traces: tau_p must be > 0");
    validate_activity(input_activity, in, "update_traces(input)");
    validate_activity(hidden_activity, hid, "update_traces(hidden)");

    // The initial uniform traces count as one pseudo-observation, so the
    // annealed rate at update n is 1/(n+1); capped below by 1/tau_p.
    const double n_next = static_cast<double>(traces.update_count + 1);
    const double rate = anneal ? std::max(1.0 / (n_next + 1.0), 1.0 / tau_p) : 1.0 / tau_p;

    double abs_change = 0.0;
    int64_t n = 0;

    for (size_t u = 0; u < traces.marginal_pre.size(); ++u)
        ema(traces.marginal_pre[u], input_activity[u], rate, abs_change, n);
    for (size_t u = 0; u < traces.marginal_post.size(); ++u)
        ema(traces.marginal_post[u], hidden_activity[u], rate, abs_change, n);

    const int hi = in.hypercolumns(), hh = hid.hypercolumns();
    for (int i = 0; i < hi; ++i) {
        for (int j = 0; j < hh; ++j) {
            const int64_t base = traces.ff_offset[static_cast<size_t>(i) * hh + j];
            const int mj = hid.sizes[static_cast<size_t>(j)];
            for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
                const double a = input_activity[static_cast<size_t>(in.unit(i, m))];
                for (int k = 0; k < mj; ++k) {
                    ema(traces.ff_joint[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + k],
                        a * hidden_activity[static_cast<size_t>(hid.unit(j, k))], rate, abs_change, n);
                }
            }
        }
    }

    if (traces.has_recurrent()) {
        for (int ja = 0; ja < hh; ++ja) {
            for (int jb = 0; jb < hh; ++jb) {
                if (ja == jb) continue;
                const int64_t base = traces.rec_offset[static_cast<size_t>(ja) * hh + jb];
                const int mb = hid.sizes[static_cast<size_t>(jb)];
                for (int ka = 0; ka < hid.sizes[static_cast<size_t>(ja)]; ++ka) {
                    const double a = hidden_activity[static_cast<size_t>(hid.unit(ja, ka))];
                    for (int kb = 0; kb < mb; ++kb) {
                        ema(traces.rec_joint[static_cast<size_t>(base) + static_cast<size_t>(ka) * mb + kb],
                            a * hidden_activity[static_cast<size_t>(hid.unit(jb, kb))], rate, abs_change, n);
                    }
                }
            }
        }
    }
    if (traces.has_inprc()) {
        for (int j = 0; j < hh; ++j) {
            for (int i = 0; i < hi; ++i) {
                const int64_t base = traces.inprc_offset[static_cast<size_t>(j) * hi + i];
                const int mi = in.sizes[static_cast<size_t>(i)];
                for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
                    const double a = hidden_activity[static_cast<size_t>(hid.unit(j, k))];
                    for (int m = 0; m < mi; ++m) {
                        ema(traces.inprc_joint[static_cast<size_t>(base) + static_cast<size_t>(k) * mi + m],
                            a * input_activity[static_cast<size_t>(in.unit(i, m))], rate, abs_change, n);
                    }
                }
            }
        }
    }

    ++traces.update_count;
    return n > 0 ? abs_change / static_cast<double>(n) : 0.0;
}

namespace {

double usage_numerator(const TraceState& traces, const Layout& in, const Layout& hid,
                       int i, int j) {
    double num = 0.0;
    for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
        const double pim = traces.pre(in.unit(i, m));
        for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
            const double pjk = traces.post(hid.unit(j, k));
            const double pj = traces.ff(i, j, m, k);
            num += pj * std::log(pj / (pim * pjk));
        }
    }
    return num;
}

}  // namespace

double usage_score(const TraceState& traces, const Layout& in, const Layout& hid, int i, int j) {
    const int degree = traces.active_out_degree(i);
    const int denom = traces.connected(i, j) ? degree : degree + 1;
    if (denom == 0)
        throw UndefinedUsageError("usage_score: input hypercolumn " + std::to_string(i) +
                                  " has no active connections");
    return usage_numerator(traces, in, hid, i, j) / static_cast<double>(denom);
}

std::vector<PlasticityEvent> structural_step(TraceState& traces, const Layout& in,
                                             const Layout& hid, double rho, uint64_t step) {
    std::vector<PlasticityEvent> events;
    if (std::isinf(rho)) return events;

    const int hi = in.hypercolumns(), hh = hid.hypercolumns();
    for (int j = 0; j < hh; ++j) {
        int best_silent = -1, worst_active = -1;
        double best_silent_u = 0.0, worst_active_u = 0.0;
        for (int i = 0; i < hi; ++i) {
            // Usage estimates can dip below zero on trace noise; the swap rule
            // compares them as non-negative MI summaries.
            const double u = std::max(0.0, usage_score(traces, in, hid, i, j));
            if (traces.connected(i, j)) {
                if (worst_active < 0 || u < worst_active_u) {
                    worst_active = i;
                    worst_active_u = u;
                }
            } else {
                if (best_silent < 0 || u > best_silent_u) {
                    best_silent = i;
                    best_silent_u = u;
                }
            }
        }
        if (best_silent < 0 || worst_active < 0) continue;
        if (best_silent_u > 0.0 && best_silent_u > rho * worst_active_u) {
            traces.set_connected(best_silent, j, 1);
            traces.set_connected(worst_active, j, 0);
            PlasticityEvent ev;
            ev.step = step;
            ev.hidden_hc = j;
            ev.deactivated = worst_active;
            ev.activated = best_silent;
            ev.usage_ratio = worst_active_u > 0.0
                                 ? best_silent_u / worst_active_u
                                 : std::numeric_limits<double>::infinity();
            events.push_back(ev);
        }
    }
    return events;
}

Trainer::Trainer(Model& model, TrainerOptions opts) : model_(model), opts_(opts) {
    model_.config.validate();
    // Forward passes are only needed when some hidden hypercolumn follows the
    // model's own output during training.
    needs_forward_ = opts_.mode == TrainMode::unsupervised || model_.config.hidden.size() > 1;
}

StepRecord Trainer::step(const Input& input, std::optional<int> label) {
    const Layout& hid = model_.hid_layout;
    std::vector<double> hidden(static_cast<size_t>(hid.total), 0.0);

    if (needs_forward_) {
        ActivationState act = forward(input, model_);
        hidden = act.posterior;
    } else {
        validate_activity(input.activity, model_.in_layout, "train");
    }

    if (opts_.mode == TrainMode::supervised) {
        if (!label.has_value())
            throw DataError("train: supervised mode requires a label for every sample");
        const int j = model_.config.label_hypercolumn;
        if (*label < 0 || *label >= hid.sizes[static_cast<size_t>(j)])
            throw DataError("train: label " + std::to_string(*label) + " out of range");
        for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k)
            hidden[static_cast<size_t>(hid.unit(j, k))] = 0.0;
        hidden[static_cast<size_t>(hid.unit(j, *label))] = 1.0;
    }

    StepRecord rec;
    rec.mean_abs_dp = update_traces(model_.traces, model_.in_layout, hid, input.activity,
                                    hidden, model_.config.tau_p, model_.config.anneal);
    rec.step = model_.traces.update_count;

    if (!std::isinf(model_.config.rho) &&
        rec.step % static_cast<uint64_t>(model_.config.structural_period) == 0) {
        rec.swaps = structural_step(model_.traces, model_.in_layout, hid, model_.config.rho,
                                    rec.step);
        for (const auto& ev : rec.swaps) events_.push_back(ev);
    }

    if (opts_.log && (rec.step % static_cast<uint64_t>(opts_.log_every) == 0 || !rec.swaps.empty())) {
        char line[128];
        std::snprintf(line, sizeof(line), "step=%llu mean_abs_dp=%.9f swaps=%zu",
                      static_cast<unsigned long long>(rec.step), rec.mean_abs_dp,
                      rec.swaps.size());
        (*opts_.log) << line << '\n';
        for (const auto& ev : rec.swaps) {
            std::snprintf(line, sizeof(line), "swap step=%llu hidden=%d off=%d on=%d ratio=%.6f",
                          static_cast<unsigned long long>(ev.step), ev.hidden_hc,
                          ev.deactivated, ev.activated, ev.usage_ratio);
            (*opts_.log) << line << '\n';
        }
    }
    return rec;
}

}  // namespace bcpnn
