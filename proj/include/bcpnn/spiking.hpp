#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bcpnn/model.hpp"
#include "bcpnn/rng.hpp"

namespace bcpnn {

/// Short-term spike traces plus the long-term p-traces of the spiking
/// variant. z-traces are leaky-integrated spike counts per minicolumn; the
/// normalized form zhat rescales them to the rate scale (stationary mean of
/// zhat equals the driving rate simplex value), which is what the p-traces
/// and saliency maps consume.
struct SpikeTraceState {
    std::vector<double> z_in;
    std::vector<double> z_hid;
    std::vector<double> zhat_in;
    std::vector<double> zhat_hid;
    TraceState p;
    uint64_t step_count = 0;
};

struct SpikeEvent {
    uint64_t t = 0;
    int population = 0;  // 0 = input, 1 = hidden
    int hypercolumn = 0;
    int minicolumn = 0;
};

/// Normalized z-trace history of a recorded run, the input to temporal
/// saliency.
struct SpikeHistory {
    std::vector<std::vector<double>> zhat_in;   // [t][input unit]
    std::vector<std::vector<double>> zhat_hid;  // [t][hidden unit]
    double dt_ms = 1.0;
};

/// Poisson (Bernoulli-per-step) spiking simulation of one model-shaped pair
/// of populations. Each step emits spikes at probability
/// min(1, rate * f_max * dt), decays and increments the z-traces, and updates
/// the p-traces from normalized z products. Deterministic given the seed.
class SpikingRun {
public:
    SpikingRun(const NetworkConfig& cfg, uint64_t seed, uint64_t stream = 0);

    /// Advance one step under the given instantaneous rates (valid simplices
    /// per hypercolumn, scaled internally by f_max * dt).
    void step(std::span<const double> input_rates, std::span<const double> hidden_rates);

    const SpikeTraceState& state() const { return state_; }
    const std::vector<uint8_t>& last_spikes_in() const { return spikes_in_; }
    const std::vector<uint8_t>& last_spikes_hid() const { return spikes_hid_; }

    void record_history(bool on) { record_history_ = on; }
    void record_raster(bool on) { record_raster_ = on; }
    const SpikeHistory& history() const { return history_; }
    const std::vector<SpikeEvent>& raster() const { return raster_; }

    /// Running sums of zhat_in[im] * zhat_hid[jk] per feedforward pair cell,
    /// in the ff_joint block layout; divided by the step count these are the
    /// time-averaged saliency factors.
    const std::vector<double>& zhat_product_integral() const { return product_integral_; }

    const Layout& input_layout() const { return in_; }
    const Layout& hidden_layout() const { return hid_; }
    uint64_t seed() const { return seed_; }

private:
    NetworkConfig cfg_;
    Layout in_;
    Layout hid_;
    SpikeTraceState state_;
    CounterRng rng_;
    uint64_t seed_;
    double decay_in_, decay_hid_;
    double norm_in_, norm_hid_;   // zhat = z * norm
    double spike_scale_;          // rate -> per-step spike probability
    std::vector<uint8_t> spikes_in_, spikes_hid_;
    bool record_history_ = false;
    bool record_raster_ = false;
    SpikeHistory history_;
    std::vector<SpikeEvent> raster_;
    std::vector<double> product_integral_;
};

/// Per-time-step evidence map for one target hidden minicolumn: at every
/// recorded step and every connected input minicolumn, the instantaneous
/// contribution zhat_im(t) * zhat_jk(t) * w_imjk. Masked connections are
/// exactly zero. Window aggregates locate the peak-evidence window.
struct TemporalSaliency {
    HidIndex target;
    int steps = 0;
    int input_units = 0;
    std::vector<double> map;            // [t][input unit]
    int window_steps = 0;
    std::vector<double> window_totals;  // summed contribution per window
    int peak_window = 0;
};

TemporalSaliency temporal_saliency(const SpikeHistory& history, const Model& model,
                                   const WeightView& weights, HidIndex target,
                                   int window_steps);

/// Writes a line-delimited raster: t population hypercolumn minicolumn.
void write_raster(std::ostream& out, const std::vector<SpikeEvent>& raster);

}  // namespace bcpnn
