#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bcpnn {

/// Variable-width hypercolumn layout: per-hypercolumn minicolumn counts plus
/// flat offsets into the concatenated unit vector.
struct Layout {
    std::vector<int> sizes;    // minicolumns per hypercolumn, each >= 2
    std::vector<int> offsets;  // prefix sums into the flat unit vector
    int total = 0;

    Layout() = default;
    explicit Layout(std::vector<int> hc_sizes);

    int hypercolumns() const { return static_cast<int>(sizes.size()); }
    int unit(int hc, int m) const { return offsets[static_cast<size_t>(hc)] + m; }
};

/// One declared attribute: a name plus labels for each discrete state.
struct AttributeSpec {
    std::string name;
    std::vector<std::string> states;
};

/// The declared ontology and all hyperparameters of a network: hypercolumn
/// counts, minicolumn counts, connectivity prior, plasticity threshold and
/// time constants. This is the design-time artifact everything else audits
/// against.
struct NetworkConfig {
    std::vector<AttributeSpec> input;
    std::vector<AttributeSpec> hidden;

    /// Binary connectivity prior over (input hc, hidden hc), row-major
    /// input-major. Initial value of the structural mask.
    std::vector<uint8_t> connectivity;

    double rho = 2.0;           // structural plasticity threshold, > 1 (may be +inf)
    double tau_p = 1000.0;      // p-trace time constant, in update steps
    bool anneal = true;         // 1/t burn-in before the asymptotic 1/tau_p rate
    double epsilon_floor = 1e-8;
    int structural_period = 100;

    bool recurrence = false;    // HID<->HID and HID->INPRC populations
    int max_settle_steps = 50;
    double settle_tolerance = 1e-4;

    // Spiking variant.
    bool spiking = false;       // declares the spiking substrate (Config-P5 scope)
    double dt_ms = 1.0;
    double f_max_hz = 100.0;
    double tau_zi_ms = 50.0;
    double tau_zj_ms = 50.0;
    double spike_tau_p = 10000.0;  // in simulation steps

    int label_hypercolumn = 0;  // hidden hc clamped by the teacher in supervised mode

    std::string purpose;
    std::string declared_at;    // optional declaration date carried into documents

    Layout input_layout() const;
    Layout hidden_layout() const;

    uint8_t prior(int i, int j) const {
        return connectivity[static_cast<size_t>(i) * hidden.size() + static_cast<size_t>(j)];
    }

    /// Throws ConfigError on any violated invariant (counts, mask coverage,
    /// rho/tau ranges, label arity).
    void validate() const;

    static NetworkConfig from_json_text(const std::string& text);
    static NetworkConfig from_json_file(const std::string& path);

    /// Convenience constructor for unlabeled synthetic networks: state labels
    /// are generated as s0..s{M-1} and connectivity defaults to all-ones.
    static NetworkConfig make(const std::vector<int>& input_sizes,
                              const std::vector<int>& hidden_sizes);
};

/// Index of a hidden minicolumn.
struct HidIndex {
    int hypercolumn = 0;
    int minicolumn = 0;
};

}  // namespace bcpnn
