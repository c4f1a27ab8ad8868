#include "bcpnn/spiking.hpp"

#include <cmath>
#include <ostream>

#include "bcpnn/errors.hpp"
#include "bcpnn/learning.hpp"

namespace bcpnn {

SpikingRun::SpikingRun(const NetworkConfig& cfg, uint64_t seed, uint64_t stream)
    : cfg_(cfg), in_(cfg.input_layout()), hid_(cfg.hidden_layout()),
      rng_(seed, stream), seed_(seed) {
    if (!(cfg.dt_ms > 0.0)) throw ConfigError("spiking: dt_ms must be > 0");
    cfg_.validate();

    state_.p = TraceState(cfg_, in_, hid_);
    state_.z_in.assign(static_cast<size_t>(in_.total), 0.0);
    state_.z_hid.assign(static_cast<size_t>(hid_.total), 0.0);
    state_.zhat_in.assign(static_cast<size_t>(in_.total), 0.0);
    state_.zhat_hid.assign(static_cast<size_t>(hid_.total), 0.0);

    decay_in_ = std::exp(-cfg.dt_ms / cfg.tau_zi_ms);
    decay_hid_ = std::exp(-cfg.dt_ms / cfg.tau_zj_ms);
    spike_scale_ = cfg.f_max_hz * cfg.dt_ms / 1000.0;
    norm_in_ = (1.0 - decay_in_) / spike_scale_;
    norm_hid_ = (1.0 - decay_hid_) / spike_scale_;

    spikes_in_.assign(static_cast<size_t>(in_.total), 0);
    spikes_hid_.assign(static_cast<size_t>(hid_.total), 0);
    history_.dt_ms = cfg.dt_ms;
    product_integral_.assign(state_.p.ff_joint.size(), 0.0);
}

namespace {

// Rates are per-unit values in [0, 1] (scaled internally by f_max * dt); a
// silenced population is legal, so no simplex constraint here.
void validate_rates(std::span<const double> rates, const Layout& layout, const char* what) {
    if (static_cast<int>(rates.size()) != layout.total)
        throw ConfigError(std::string(what) + ": rate vector does not match layout");
    for (double r : rates)
        if (!(r >= 0.0) || !(r <= 1.0))
            throw ArgumentError(std::string(what) + ": rates must lie in [0, 1]");
}

}  // namespace

void SpikingRun::step(std::span<const double> input_rates, std::span<const double> hidden_rates) {
    validate_rates(input_rates, in_, "spike_step(input)");
    validate_rates(hidden_rates, hid_, "spike_step(hidden)");

    for (int u = 0; u < in_.total; ++u) {
        const double p_spike = std::min(1.0, input_rates[static_cast<size_t>(u)] * spike_scale_);
        spikes_in_[static_cast<size_t>(u)] = rng_.next_bernoulli(p_spike) ? 1 : 0;
        state_.z_in[static_cast<size_t>(u)] =
            state_.z_in[static_cast<size_t>(u)] * decay_in_ + spikes_in_[static_cast<size_t>(u)];
        state_.zhat_in[static_cast<size_t>(u)] = state_.z_in[static_cast<size_t>(u)] * norm_in_;
    }
    for (int u = 0; u < hid_.total; ++u) {
        const double p_spike = std::min(1.0, hidden_rates[static_cast<size_t>(u)] * spike_scale_);
        spikes_hid_[static_cast<size_t>(u)] = rng_.next_bernoulli(p_spike) ? 1 : 0;
        state_.z_hid[static_cast<size_t>(u)] =
            state_.z_hid[static_cast<size_t>(u)] * decay_hid_ + spikes_hid_[static_cast<size_t>(u)];
        state_.zhat_hid[static_cast<size_t>(u)] = state_.z_hid[static_cast<size_t>(u)] * norm_hid_;
    }

    // Long-term p-traces track the normalized traces with rate 1/tau_p
    // (annealed through burn-in exactly like the rate-based rule).
    const double n_next = static_cast<double>(state_.p.update_count + 1);
    const double rate = cfg_.anneal ? std::max(1.0 / (n_next + 1.0), 1.0 / cfg_.spike_tau_p)
                                    : 1.0 / cfg_.spike_tau_p;

    for (size_t u = 0; u < state_.p.marginal_pre.size(); ++u) {
        double& p = state_.p.marginal_pre[u];
        p += rate * (state_.zhat_in[u] - p);
    }
    for (size_t u = 0; u < state_.p.marginal_post.size(); ++u) {
        double& p = state_.p.marginal_post[u];
        p += rate * (state_.zhat_hid[u] - p);
    }
    const int hh = hid_.hypercolumns();
    for (int i = 0; i < in_.hypercolumns(); ++i) {
        for (int j = 0; j < hh; ++j) {
            const int64_t base = state_.p.ff_offset[static_cast<size_t>(i) * hh + j];
            const int mj = hid_.sizes[static_cast<size_t>(j)];
            for (int m = 0; m < in_.sizes[static_cast<size_t>(i)]; ++m) {
                const double zi = state_.zhat_in[static_cast<size_t>(in_.unit(i, m))];
                for (int k = 0; k < mj; ++k) {
                    const double prod = zi * state_.zhat_hid[static_cast<size_t>(hid_.unit(j, k))];
                    const size_t idx = static_cast<size_t>(base) + static_cast<size_t>(m) * mj + k;
                    state_.p.ff_joint[idx] += rate * (prod - state_.p.ff_joint[idx]);
                    product_integral_[idx] += prod;
                }
            }
        }
    }
    ++state_.p.update_count;
    ++state_.step_count;

    if (record_history_) {
        history_.zhat_in.push_back(state_.zhat_in);
        history_.zhat_hid.push_back(state_.zhat_hid);
    }
    if (record_raster_) {
        for (int i = 0; i < in_.hypercolumns(); ++i)
            for (int m = 0; m < in_.sizes[static_cast<size_t>(i)]; ++m)
                if (spikes_in_[static_cast<size_t>(in_.unit(i, m))])
                    raster_.push_back({state_.step_count - 1, 0, i, m});
        for (int j = 0; j < hid_.hypercolumns(); ++j)
            for (int k = 0; k < hid_.sizes[static_cast<size_t>(j)]; ++k)
                if (spikes_hid_[static_cast<size_t>(hid_.unit(j, k))])
                    raster_.push_back({state_.step_count - 1, 1, j, k});
    }
}

TemporalSaliency temporal_saliency(const SpikeHistory& history, const Model& model,
                                   const WeightView& weights, HidIndex target,
                                   int window_steps) {
    const int steps = static_cast<int>(history.zhat_in.size());
    if (steps == 0) throw ArgumentError("temporal_saliency: empty spike history");
    if (window_steps < 1 || window_steps > steps)
        throw ArgumentError("temporal_saliency: window does not fit the recorded run");
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    if (target.hypercolumn < 0 || target.hypercolumn >= hid.hypercolumns() ||
        target.minicolumn < 0 || target.minicolumn >= hid.sizes[static_cast<size_t>(target.hypercolumn)])
        throw ArgumentError("temporal_saliency: target out of range");

    TemporalSaliency out;
    out.target = target;
    out.steps = steps;
    out.input_units = in.total;
    out.window_steps = window_steps;
    out.map.assign(static_cast<size_t>(steps) * in.total, 0.0);

    const int j = target.hypercolumn;
    const int k = target.minicolumn;
    const int hid_unit = hid.unit(j, k);
    const int mj = hid.sizes[static_cast<size_t>(j)];
    for (int t = 0; t < steps; ++t) {
        const double zj = history.zhat_hid[static_cast<size_t>(t)][static_cast<size_t>(hid_unit)];
        for (int i = 0; i < in.hypercolumns(); ++i) {
            if (!model.traces.connected(i, j)) continue;  // masked: stays exactly zero
            const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
            for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
                const double zi = history.zhat_in[static_cast<size_t>(t)][static_cast<size_t>(in.unit(i, m))];
                const double w = weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + k];
                out.map[static_cast<size_t>(t) * in.total + in.unit(i, m)] = zi * zj * w;
            }
        }
    }

    const int n_windows = steps / window_steps;
    out.window_totals.assign(static_cast<size_t>(n_windows), 0.0);
    for (int w = 0; w < n_windows; ++w) {
        double total = 0.0;
        for (int t = w * window_steps; t < (w + 1) * window_steps; ++t)
            for (int u = 0; u < in.total; ++u)
                total += out.map[static_cast<size_t>(t) * in.total + u];
        out.window_totals[static_cast<size_t>(w)] = total;
    }
    out.peak_window = 0;
    for (int w = 1; w < n_windows; ++w)
        if (out.window_totals[static_cast<size_t>(w)] > out.window_totals[static_cast<size_t>(out.peak_window)])
            out.peak_window = w;
    return out;
}

void write_raster(std::ostream& out, const std::vector<SpikeEvent>& raster) {
    for (const auto& ev : raster) {
        out << ev.t << ' ' << (ev.population == 0 ? "input" : "hidden") << ' ' << ev.hypercolumn
            << ' ' << ev.minicolumn << '\n';
    }
}

}  // namespace bcpnn
