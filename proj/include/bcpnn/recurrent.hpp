#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bcpnn/model.hpp"

namespace bcpnn {

/// Attractor settling record: the full posterior trajectory plus per-step
/// update norms. `settled_step` is the first t whose update falls below the
/// tolerance (the settling time); non-convergence within the step budget is
/// reported, not thrown, since a long trajectory is itself diagnostic.
struct AttractorRun {
    std::vector<std::vector<double>> trajectory;  // posterior at t = 0..T_end
    std::vector<double> step_inf_norm;            // ||pi(t+1)-pi(t)||_inf per step
    std::vector<double> step_l2_norm;             // ||pi(t+1)-pi(t)||_2 per step
    int settled_step = -1;
    bool converged = false;
};

/// A hypercolumn held fixed to a one-hot state during settling.
struct Clamp {
    int hypercolumn = 0;
    int minicolumn = 0;
};

/// Iterates support = bias + feedforward phi + recurrent phi followed by
/// soft-WTA, synchronously over all hidden hypercolumns, until the update
/// inf-norm drops below eps or max_steps is reached. The feedforward drive is
/// computed once from the query. A clamped hypercolumn is overwritten with
/// its one-hot target at every step (including t = 0).
AttractorRun settle(const Model& model, const WeightView& weights, const Input& input,
                    std::span<const double> initial_hidden, int max_steps, double eps,
                    std::optional<Clamp> clamp = std::nullopt);

/// Convenience: start from the feedforward posterior of the query.
AttractorRun settle_from_input(const Model& model, const WeightView& weights,
                               const Input& input, std::optional<Clamp> clamp = std::nullopt);

/// INPRC output: one reconstructed simplex per input hypercolumn.
struct Reconstruction {
    std::vector<double> activity;
    std::optional<Clamp> clamped;  // set in clamped mode
};

/// Free-mode reconstruction from the given hidden state.
Reconstruction reconstruct(const Model& model, const WeightView& weights,
                           std::span<const double> hidden);

/// Clamped (directed counterfactual) mode: overwrite the designated
/// hypercolumn with a one-hot on the target minicolumn, re-settle with that
/// hypercolumn held fixed, then read the reconstruction. `resettle = false`
/// selects the single-pass variant (no recurrent re-settling).
Reconstruction reconstruct_clamped(const Model& model, const WeightView& weights,
                                   const Input& input, std::span<const double> hidden,
                                   Clamp clamp, bool resettle = true);

}  // namespace bcpnn
