#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcpnn/dataset.hpp"
#include "bcpnn/model.hpp"

namespace bcpnn {

/// Config-P1 — the declared ontology as an immutable, digest-stamped
/// document. Emission is a pure function of the configuration: re-emitting
/// from the same config is byte-identical.
struct OntologyDocument {
    std::string text;
    uint64_t digest = 0;
};

OntologyDocument emit_ontology(const NetworkConfig& cfg);

/// Variant with explicit state-label overrides; throws ConfigError when a
/// label list does not match the declared minicolumn count.
OntologyDocument emit_ontology(NetworkConfig cfg,
                               const std::vector<std::vector<std::string>>& input_state_labels,
                               const std::string& purpose);

/// Config-P2 — minicolumn differentiation per hidden hypercolumn: mean L1
/// distance between minicolumn weight vectors over the hypercolumn's active
/// incoming weights. Near-zero scores mean the data did not support the
/// declared number of states.
struct EfficiencyScore {
    std::vector<double> diff;      // per hidden hypercolumn, nats per weight
    double mean_diff = 0.0;
    std::vector<int> flagged;      // hypercolumns below the warning threshold
    double flag_ratio = 0.05;      // flag when diff < flag_ratio * median
};

EfficiencyScore efficiency(const Model& model, double flag_ratio = 0.05);

/// Config-P4 — Spearman rank agreement between an expert importance ordering
/// and the post-training usage ordering (aggregated over hidden
/// hypercolumns; average-rank ties).
struct FidelityScore {
    double cf = 0.0;
    std::vector<std::string> expert_order;  // most important first
    std::vector<std::string> usage_order;
    std::string tie_note = "average-rank ties; usage aggregated over hidden hypercolumns";
};

FidelityScore fidelity(const Model& model, const std::vector<std::string>& expert_ranking);

/// Config-P3 — one point per (rho, seed) training cell.
struct ParetoPoint {
    double rho = 0.0;
    uint64_t seed = 0;
    double accuracy = 0.0;
    int active_connections = 0;
    double mean_graph_size = 0.0;  // active incoming connections per hidden hc
};

struct ParetoCurve {
    std::vector<ParetoPoint> points;
    int epochs = 0;
};

struct SweepOptions {
    std::vector<double> rho_grid;
    std::vector<uint64_t> seeds;
    int epochs = 5;
    int jobs = 1;
    double train_fraction = 0.8;
};

/// Trains one model per (rho, seed) cell on a shuffled copy of the dataset
/// and records held-out accuracy plus connection sparsity. Cells are
/// independent and may run in parallel; results are ordered by (rho, seed)
/// regardless of scheduling.
ParetoCurve rho_sweep(const NetworkConfig& base, const LabeledDataset& data,
                      const SweepOptions& opts);

std::string pareto_table(const ParetoCurve& curve);

}  // namespace bcpnn
