#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bcpnn/config.hpp"
#include "bcpnn/traces.hpp"

namespace bcpnn {

/// One query: concatenated per-input-hypercolumn probability simplices.
/// Categorical features are one-hot; soft inputs are accepted as-is.
struct Input {
    std::vector<double> activity;

    static Input one_hot(const Layout& in, std::span<const int> states);
    static Input uniform(const Layout& in);
};

/// Per-query activation: supports in nats, per-input-hypercolumn contribution
/// terms, and the soft-WTA posterior. Recurrent runs additionally retain the
/// posterior trajectory.
struct ActivationState {
    std::vector<double> input_activity;  // flat over input minicolumns
    std::vector<double> support;         // flat over hidden minicolumns, nats
    std::vector<double> phi;             // [input hc][hidden unit], row-major
    std::vector<double> posterior;       // flat over hidden minicolumns
    std::vector<std::vector<double>> trajectory;  // recurrent runs only

    double phi_at(int i, int hidden_unit, int hidden_total) const {
        return phi[static_cast<size_t>(i) * hidden_total + hidden_unit];
    }
};

/// A trained model: declared configuration plus learned traces. Snapshots are
/// immutable from the reader's point of view; any number of forward/explain
/// calls may share one concurrently. Mutation goes through the learning
/// module, which requires exclusive access.
struct Model {
    NetworkConfig config;
    Layout in_layout;
    Layout hid_layout;
    TraceState traces;

    explicit Model(NetworkConfig cfg);
    Model() = default;

    WeightView weights() const { return weights_from_traces(traces, in_layout, hid_layout); }

    int input_units() const { return in_layout.total; }
    int hidden_units() const { return hid_layout.total; }
};

struct SupportResult {
    std::vector<double> support;  // b_jk + sum_i phi_{i->jk}
    std::vector<double> phi;      // [input hc][hidden unit]
};

/// Evaluates the additive support decomposition: for every hidden minicolumn,
/// bias plus one contribution term per input hypercolumn (masked pairs
/// contribute nothing). The phi terms are returned so attribution is a free
/// by-product of inference.
SupportResult compute_support(std::span<const double> input_activity, const Model& model,
                              const WeightView& weights);

/// Per-hypercolumn softmax, stabilized by subtracting the per-hypercolumn max.
std::vector<double> soft_wta(std::span<const double> support, const Layout& layout);

/// Single deterministic feedforward pass.
ActivationState forward(const Input& input, const Model& model);
ActivationState forward(const Input& input, const Model& model, const WeightView& weights);

/// Validates that activity holds one simplex per hypercolumn (entries >= 0,
/// sums within 1e-6 of 1). Throws ConfigError on dimension mismatch,
/// ArgumentError on invalid simplices.
void validate_activity(std::span<const double> activity, const Layout& layout,
                       const char* what);

/// Winner (argmax, lowest index on exact ties) of hypercolumn hc.
int winner(std::span<const double> activity, const Layout& layout, int hc);

}  // namespace bcpnn
