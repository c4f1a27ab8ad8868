#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcpnn/model.hpp"
#include "bcpnn/recurrent.hpp"

namespace bcpnn {

/// P1/P2/P11 — exact additive attribution for one hidden minicolumn: the
/// bias baseline plus one contribution per input hypercolumn, summing to the
/// support exactly. `evidence` carries the raw per-weight terms
/// activity * weight for every input minicolumn (zero on masked pairs).
struct AttributionVector {
    HidIndex target;
    double bias = 0.0;
    std::vector<double> phi;       // per input hypercolumn, nats
    double support = 0.0;
    std::vector<double> evidence;  // per input minicolumn, nats
};

AttributionVector attribute(const Model& model, const WeightView& weights,
                            const ActivationState& state, HidIndex target);

/// P3 — per-hypercolumn posterior with entropy (nats).
struct PosteriorSummary {
    std::vector<double> posterior;
    std::vector<double> entropy;  // per hidden hypercolumn
};

PosteriorSummary posterior_summary(const Model& model, const ActivationState& state);

/// P4/P5 — the connectivity mask and usage scores as a ranked bipartite
/// importance graph (usage descending; ties keep index order).
struct ImportanceEdge {
    int input_hc = 0;
    int hidden_hc = 0;
    bool active = false;
    double usage = 0.0;
};

struct ImportanceGraph {
    std::vector<ImportanceEdge> edges;
};

ImportanceGraph global_importance(const Model& model);

/// P6/P7 — receptive field of a hidden minicolumn: per-input-minicolumn
/// weighted activation, for a single query or averaged over a reference set.
/// In reference mode the tuning curve is also filled: mean posterior of the
/// target per distinct input state (indexed like the input units).
struct ReceptiveField {
    HidIndex target;
    bool reference_mean = false;
    std::vector<double> values;      // per input unit, zero on masked pairs
    std::vector<double> tuning;      // per input unit; reference mode only
    std::vector<int> tuning_counts;  // reference samples per input state
};

ReceptiveField receptive_field(const Model& model, const WeightView& weights,
                               const ActivationState& state, HidIndex target);
ReceptiveField receptive_field(const Model& model, const WeightView& weights,
                               std::span<const Input> reference, HidIndex target);

/// P8 — scalar diagnostics of an attractor run: settling time, basin width
/// (negative log of the runner-up activation in the dominant hypercolumn at
/// convergence) and trajectory length. Pure functions of the trajectory.
struct AttractorDiagnostics {
    int settling_step = 0;
    bool converged = false;
    double basin_width = 0.0;
    double trajectory_length = 0.0;
};

AttractorDiagnostics attractor_diagnostics(const AttractorRun& run, const Layout& hid,
                                           double eps);

/// P9 — INPRC counterfactual: free reconstruction, clamped reconstruction
/// toward the target class, and per-input-hypercolumn difference maps (which
/// attribute winners changed relative to the query and to the free
/// reconstruction).
struct Counterfactual {
    std::vector<double> free_activity;
    std::vector<double> clamped_activity;
    std::vector<int> input_winner;
    std::vector<int> free_winner;
    std::vector<int> clamped_winner;
    std::vector<uint8_t> differs_from_input;
    std::vector<uint8_t> differs_from_free;
    Clamp target;
};

Counterfactual counterfactual(const Model& model, const WeightView& weights,
                              const Input& input, Clamp target, bool resettle = true);

/// P12 — surprise score: negative summed log winner activation across hidden
/// hypercolumns; decomposes into one non-negative surprisal per hypercolumn.
struct SurpriseScore {
    double total = 0.0;
    std::vector<double> per_hypercolumn;
};

SurpriseScore surprise(std::span<const double> posterior, const Layout& hid);

/// P13 — two-sided CUSUM drift monitor over p-trace values. Baselines are
/// captured at deployment; slack k and threshold h default to 0.5 and 5
/// baseline standard deviations per monitored trace. Statistics reset after
/// an alarm. The monitor is a stateful accumulator and needs exclusive
/// update access.
class DriftMonitor {
public:
    struct Alarm {
        uint64_t step = 0;
        int trace = 0;
        int direction = 0;  // +1 upward shift, -1 downward
        double statistic = 0.0;
    };

    DriftMonitor() = default;
    DriftMonitor(std::vector<double> baseline_mean, std::vector<double> k, std::vector<double> h);

    /// Estimates per-trace mean and stddev from raw baseline samples
    /// [sample][trace] and derives k = k_mult * sigma, h = h_mult * sigma.
    static DriftMonitor from_baseline(const std::vector<std::vector<double>>& baseline,
                                      double k_mult = 0.5, double h_mult = 5.0);

    /// One CUSUM update per trace on the given live p-trace values.
    std::vector<Alarm> step(std::span<const double> live_traces);

    const std::vector<double>& baseline() const { return baseline_; }
    const std::vector<double>& slack() const { return k_; }
    const std::vector<double>& threshold() const { return h_; }
    const std::vector<double>& cusum_pos() const { return c_pos_; }
    const std::vector<double>& cusum_neg() const { return c_neg_; }
    const std::vector<Alarm>& alarms() const { return alarm_log_; }
    uint64_t steps() const { return steps_; }

private:
    std::vector<double> baseline_, k_, h_, c_pos_, c_neg_;
    std::vector<Alarm> alarm_log_;
    uint64_t steps_ = 0;
};

/// Maintains live p-traces from a stream of activation samples with a short
/// time constant, feeding the drift monitor.
class LiveTraceTracker {
public:
    LiveTraceTracker(std::vector<double> initial, double tau_live);
    const std::vector<double>& update(std::span<const double> activations);
    const std::vector<double>& values() const { return trace_; }

private:
    std::vector<double> trace_;
    double tau_live_;
};

/// P14 — certified soft-WTA radius under total-variation reallocation within
/// the input simplices. `direction` lists the gap-closing moves in optimal
/// order (with capacities), so perturbations of any chosen mass along the
/// optimal direction can be reconstructed exactly.
struct CertificateMove {
    int input_hc = 0;
    int donor = 0;
    int recipient = 0;
    double capacity = 0.0;  // donor mass available to this move
    double rate = 0.0;      // gap closed per unit mass moved
};

struct RobustnessCertificate {
    int hypercolumn = 0;
    int winner = 0;
    int challenger = -1;               // reached first at the radius; -1 if none
    double radius = 0.0;               // +inf when no reallocation can flip
    std::vector<CertificateMove> direction;  // optimal moves for the binding challenger
    std::string metric = "total-variation";
};

RobustnessCertificate certified_radius(const Model& model, const WeightView& weights,
                                       const Input& input, int hidden_hc);

/// Applies `mass` of total-variation perturbation along the certificate's
/// optimal direction and returns the perturbed input.
Input perturb_along(const RobustnessCertificate& cert, const Input& input,
                    const Layout& in, double mass);

/// P15 — winner margin: gap between the top two activations of hypercolumn j.
double winner_margin(std::span<const double> posterior, const Layout& hid, int j);

/// P16 — cross-layer attribution for stacked models (layer l's hidden
/// population is layer l+1's input population).
struct DeepModel {
    std::vector<const Model*> layers;
    void validate() const;
};

struct AttributionTreeNode {
    int layer = 0;  // model index; 0 receives the raw input
    HidIndex unit;
    double support = 0.0;
    double bias = 0.0;
    std::vector<double> phi;          // per lower hypercolumn
    std::vector<int> child_node;      // node index per lower hc; -1 at layer 0
    std::vector<int> child_state;     // chosen minicolumn per lower hc
};

struct AttributionTree {
    std::vector<AttributionTreeNode> nodes;  // node 0 = root
    std::vector<double> leaf_totals_signed;  // per raw-input hypercolumn
    std::vector<double> leaf_totals_abs;
};

AttributionTree cross_layer_attribution(const DeepModel& deep, const Input& input,
                                        std::optional<HidIndex> top_target = std::nullopt);

}  // namespace bcpnn
