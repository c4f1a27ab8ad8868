#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bcpnn/model.hpp"
#include "bcpnn/rng.hpp"

namespace bcpnn::oracle {

/// Engine value paired with its independently computed reference.
struct OracleResult {
    double engine = 0.0;
    double reference = 0.0;
    double abs_error() const;
    double rel_error() const;
};

/// Exact Shapley values over input hypercolumns for the additive coalition
/// game v(S) = support contribution of the hypercolumns in S (absent
/// hypercolumn = its term removed). Enumerates all 2^H coalitions with its
/// own trace arithmetic; H is capped at 12. For an additive game the result
/// equals the per-hypercolumn contributions identically, which is exactly
/// what this oracle is used to verify.
std::vector<double> exact_shapley(const Model& model, const Input& query, HidIndex target);

/// Plain frequency counts with Laplace smoothing over paired categorical
/// streams; converts to weights via the log joint-over-product form and to
/// plug-in mutual information. Independent of the engine's trace path.
class CountingEstimator {
public:
    CountingEstimator(std::vector<int> pre_sizes, std::vector<int> post_sizes,
                      double alpha = 1.0);

    void observe(std::span<const int> pre_states, std::span<const int> post_states);

    double p_pre(int i, int m) const;
    double p_post(int j, int k) const;
    double p_joint(int i, int j, int m, int k) const;

    /// log( p(m,k) / (p(m) p(k)) ) from the smoothed counts.
    double weight(int i, int j, int m, int k) const;

    /// Plug-in mutual information between attribute i and post attribute j,
    /// in nats.
    double mutual_information(int i, int j) const;

    uint64_t samples() const { return n_; }

private:
    std::vector<int> pre_sizes_, post_sizes_;
    std::vector<std::vector<uint64_t>> pre_counts_, post_counts_;
    std::vector<std::vector<uint64_t>> joint_counts_;  // [i * n_post + j][m * Mj + k]
    double alpha_;
    uint64_t n_ = 0;
};

/// Fraction of winner flips among n random total-variation-bounded
/// perturbations of the query (flip = any challenger support reaching the
/// winner's support in hypercolumn j).
struct FlipCheck {
    int flips = 0;
    int samples = 0;
};

FlipCheck sampled_flip_check(const Model& model, const Input& query, int hidden_hc,
                             double delta, int n, CounterRng& rng);

/// Declared categorical generative model: class prior plus one
/// attribute-state table per input attribute. All information-theoretic
/// ground truths are available in closed form.
struct GenerativeSpec {
    std::vector<double> class_prob;
    std::vector<std::vector<std::vector<double>>> tables;  // [attr][class][state]

    int classes() const { return static_cast<int>(class_prob.size()); }
    int attributes() const { return static_cast<int>(tables.size()); }
    std::vector<int> attribute_sizes() const;

    double attribute_marginal(int attr, int state) const;
    /// Closed-form I(X_attr; Y) in nats.
    double attribute_mi(int attr) const;

    /// Fruit-style table: Colour/Shape/Size -> {apple, banana, lemon,
    /// watermelon}; `noise` is the probability mass spread off the modal
    /// state of each attribute.
    static GenerativeSpec fruit(double noise);

    /// One attribute per fidelity entry, 4 classes, 4 states each;
    /// P(state == class | class) = fidelity, remainder uniform. Fidelity 0.25
    /// means chance (zero information).
    static GenerativeSpec graded(const std::vector<double>& fidelities);
};

struct Sample {
    std::vector<int> states;
    int label = 0;
};

/// Deterministic sample stream from a declared joint; same seed, same bytes.
class SyntheticGenerator {
public:
    SyntheticGenerator(GenerativeSpec spec, uint64_t seed, uint64_t stream = 0);
    Sample next();
    const GenerativeSpec& spec() const { return spec_; }

private:
    GenerativeSpec spec_;
    CounterRng rng_;
};

}  // namespace bcpnn::oracle
