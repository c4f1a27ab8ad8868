#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bcpnn/model.hpp"

namespace bcpnn {

/// One structural-plasticity swap: for hidden hypercolumn `hidden_hc`, the
/// connection from `deactivated` went silent and the one from `activated`
/// became active. Per-hypercolumn in-degree is preserved.
struct PlasticityEvent {
    uint64_t step = 0;
    int hidden_hc = 0;
    int deactivated = 0;
    int activated = 0;
    double usage_ratio = 0.0;  // silent usage / active usage at swap time
};

enum class TrainMode { supervised, unsupervised };

struct StepRecord {
    uint64_t step = 0;
    double mean_abs_dp = 0.0;
    std::vector<PlasticityEvent> swaps;
};

/// First-order trace update toward the given pre/post activities with rate
/// 1/tau_p (optionally annealed as 1/t during burn-in, which makes the traces
/// exact running means until t reaches tau_p). Updates marginal, feedforward
/// joint (active and shadow) and, when present, recurrent and reconstruction
/// joints. Returns the mean absolute trace change.
double update_traces(TraceState& traces, const Layout& in, const Layout& hid,
                     std::span<const double> input_activity,
                     std::span<const double> hidden_activity, double tau_p, bool anneal);

/// Usage score of connection (input hc i, hidden hc j): joint-weighted sum of
/// weights over the pair's minicolumns, normalized by the number of active
/// outgoing connections of i (for a silent pair, by the out-degree it would
/// have after a swap). Throws UndefinedUsageError when the denominator is
/// empty.
double usage_score(const TraceState& traces, const Layout& in, const Layout& hid, int i, int j);

/// One structural-plasticity pass: per hidden hypercolumn, swap the
/// best-scoring silent connection in (and the worst active one out) when the
/// silent usage strictly exceeds rho times the active usage. At most one swap
/// per hypercolumn per call; exact ties keep the incumbent.
std::vector<PlasticityEvent> structural_step(TraceState& traces, const Layout& in,
                                             const Layout& hid, double rho, uint64_t step);

struct TrainerOptions {
    TrainMode mode = TrainMode::supervised;
    std::ostream* log = nullptr;  // optional line-delimited training log
    int log_every = 100;
};

/// Owns the model exclusively while learning; inference snapshots are taken
/// between epochs.
class Trainer {
public:
    Trainer(Model& model, TrainerOptions opts = {});

    /// One learning step. In supervised mode `label` clamps the configured
    /// label hypercolumn to a one-hot teacher signal; remaining hidden
    /// hypercolumns (and all of them in unsupervised mode) follow the model's
    /// own soft-WTA output.
    StepRecord step(const Input& input, std::optional<int> label);

    const std::vector<PlasticityEvent>& events() const { return events_; }

private:
    Model& model_;
    TrainerOptions opts_;
    std::vector<PlasticityEvent> events_;
    bool needs_forward_ = false;
};

}  // namespace bcpnn
