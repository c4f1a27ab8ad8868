#pragma once

#include <cstdint>
#include <vector>

#include "bcpnn/config.hpp"

namespace bcpnn {

/// Running probability estimates: marginal traces per minicolumn and joint
/// traces per connected minicolumn pair. Joint traces are kept for every
/// (input hc, hidden hc) pair; entries on masked pairs are the shadow traces
/// that score silent connections for structural plasticity. When recurrence
/// is enabled the state also carries hidden<->hidden and hidden->input
/// (reconstruction) joints trained by the same rule.
class TraceState {
public:
    TraceState() = default;
    TraceState(const NetworkConfig& cfg, const Layout& in, const Layout& hid);

    // Raw storage; see the floored accessors below for read paths.
    std::vector<double> marginal_pre;   // per input minicolumn
    std::vector<double> marginal_post;  // per hidden minicolumn
    std::vector<double> ff_joint;       // blocks per (input hc, hidden hc) pair
    std::vector<double> rec_joint;      // blocks per ordered (hid, hid) pair, diag absent
    std::vector<double> inprc_joint;    // blocks per (hidden hc, input hc) pair

    std::vector<uint8_t> mask;          // current structural mask, mutable copy of the prior
    uint64_t update_count = 0;
    double epsilon_floor = 1e-8;

    // Block offsets into the joint arrays (-1 where a block does not exist).
    std::vector<int64_t> ff_offset;     // index: i * H_hid + j, block M_i x M_j
    std::vector<int64_t> rec_offset;    // index: pre_j * H_hid + post_j
    std::vector<int64_t> inprc_offset;  // index: j * H_inp + i, block M_j x M_i

    bool has_recurrent() const { return !rec_offset.empty(); }
    bool has_inprc() const { return !inprc_offset.empty(); }

    uint8_t connected(int i, int j) const {
        return mask[static_cast<size_t>(i) * hidden_hc_ + static_cast<size_t>(j)];
    }
    void set_connected(int i, int j, uint8_t v) {
        mask[static_cast<size_t>(i) * hidden_hc_ + static_cast<size_t>(j)] = v;
    }
    int active_out_degree(int i) const {
        int d = 0;
        for (int j = 0; j < hidden_hc_; ++j) d += connected(i, j);
        return d;
    }
    int active_in_degree(int j) const {
        int d = 0;
        for (int i = 0; i < input_hc_; ++i) d += connected(i, j);
        return d;
    }

    // Floored reads: probabilities are clamped to [epsilon_floor, +) at read
    // time so downstream logarithms stay finite.
    double pre(int unit) const { return floor_read(marginal_pre[static_cast<size_t>(unit)]); }
    double post(int unit) const { return floor_read(marginal_post[static_cast<size_t>(unit)]); }
    double ff(int i, int j, int m, int k) const {
        const int64_t off = ff_offset[static_cast<size_t>(i) * hidden_hc_ + j];
        return floor_read(ff_joint[static_cast<size_t>(off) + static_cast<size_t>(m) * hid_size_[static_cast<size_t>(j)] + k]);
    }
    double rec(int ja, int jb, int ka, int kb) const {
        const int64_t off = rec_offset[static_cast<size_t>(ja) * hidden_hc_ + jb];
        return floor_read(rec_joint[static_cast<size_t>(off) + static_cast<size_t>(ka) * hid_size_[static_cast<size_t>(jb)] + kb]);
    }
    double inprc(int j, int i, int k, int m) const {
        const int64_t off = inprc_offset[static_cast<size_t>(j) * input_hc_ + i];
        return floor_read(inprc_joint[static_cast<size_t>(off) + static_cast<size_t>(k) * in_size_[static_cast<size_t>(i)] + m]);
    }

    int input_hypercolumns() const { return input_hc_; }
    int hidden_hypercolumns() const { return hidden_hc_; }

private:
    double floor_read(double v) const { return v > epsilon_floor ? v : epsilon_floor; }

    int input_hc_ = 0;
    int hidden_hc_ = 0;
    std::vector<int> in_size_;
    std::vector<int> hid_size_;
};

/// Closed-form weights and biases recomputed from a TraceState: the bias is
/// the log prior of the post-synaptic minicolumn and every weight is the log
/// of the joint-to-product ratio of its traces. Recomputation from the same
/// traces is bit-identical.
struct WeightView {
    std::vector<double> bias;         // per hidden minicolumn, log p_jk
    std::vector<double> ff;           // same block layout as TraceState::ff_joint
    std::vector<double> rec;          // same layout as rec_joint
    std::vector<double> inprc;        // same layout as inprc_joint
    std::vector<double> inprc_bias;   // per input minicolumn, log p_im
};

WeightView weights_from_traces(const TraceState& traces, const Layout& in, const Layout& hid);

}  // namespace bcpnn
