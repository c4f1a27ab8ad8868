#include "bcpnn/oracle.hpp"

#include <cmath>
#include <numeric>

#include "bcpnn/errors.hpp"

namespace bcpnn::oracle {

double OracleResult::abs_error() const { return std::abs(engine - reference); }

double OracleResult::rel_error() const {
    const double denom = std::max(std::abs(reference), 1e-300);
    return abs_error() / denom;
}

namespace {

// The oracle's own contribution evaluation: raw trace reads, floored, with
// its own log arithmetic. Shares nothing with compute_support beyond
// primitive operations.
std::vector<double> per_hypercolumn_contributions(const Model& model, const Input& query,
                                                  HidIndex target) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    const int j = target.hypercolumn;
    const int k = target.minicolumn;
    const double floor = model.traces.epsilon_floor;
    const double pjk = std::max(model.traces.marginal_post[static_cast<size_t>(hid.unit(j, k))], floor);

    std::vector<double> contrib(static_cast<size_t>(in.hypercolumns()), 0.0);
    for (int i = 0; i < in.hypercolumns(); ++i) {
        if (!model.traces.connected(i, j)) continue;
        const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
        const int mj = hid.sizes[static_cast<size_t>(j)];
        double acc = 0.0;
        for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
            const double act = query.activity[static_cast<size_t>(in.unit(i, m))];
            if (act == 0.0) continue;
            const double pim = std::max(model.traces.marginal_pre[static_cast<size_t>(in.unit(i, m))], floor);
            const double pj = std::max(model.traces.ff_joint[static_cast<size_t>(base) + static_cast<size_t>(m) * mj + k], floor);
            acc += act * std::log(pj / (pim * pjk));
        }
        contrib[static_cast<size_t>(i)] = acc;
    }
    return contrib;
}

}  // namespace

std::vector<double> exact_shapley(const Model& model, const Input& query, HidIndex target) {
    const int h = model.in_layout.hypercolumns();
    if (h > 12) throw ArgumentError("exact_shapley: coalition enumeration capped at 12 hypercolumns");

    const std::vector<double> contrib = per_hypercolumn_contributions(model, query, target);

    // v(S) for every coalition mask.
    const uint32_t n_masks = 1u << h;
    std::vector<double> v(n_masks, 0.0);
    for (uint32_t mask = 0; mask < n_masks; ++mask) {
        double s = 0.0;
        for (int i = 0; i < h; ++i)
            if (mask & (1u << i)) s += contrib[static_cast<size_t>(i)];
        v[mask] = s;
    }

    std::vector<double> factorial(static_cast<size_t>(h) + 1, 1.0);
    for (int i = 1; i <= h; ++i) factorial[static_cast<size_t>(i)] = factorial[static_cast<size_t>(i - 1)] * i;

    std::vector<double> shapley(static_cast<size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
        double acc = 0.0;
        for (uint32_t mask = 0; mask < n_masks; ++mask) {
            if (mask & (1u << i)) continue;
            const int s = __builtin_popcount(mask);
            const double w = factorial[static_cast<size_t>(s)] *
                             factorial[static_cast<size_t>(h - s - 1)] / factorial[static_cast<size_t>(h)];
            acc += w * (v[mask | (1u << i)] - v[mask]);
        }
        shapley[static_cast<size_t>(i)] = acc;
    }
    return shapley;
}

CountingEstimator::CountingEstimator(std::vector<int> pre_sizes, std::vector<int> post_sizes,
                                     double alpha)
    : pre_sizes_(std::move(pre_sizes)), post_sizes_(std::move(post_sizes)), alpha_(alpha) {
    pre_counts_.resize(pre_sizes_.size());
    for (size_t i = 0; i < pre_sizes_.size(); ++i)
        pre_counts_[i].assign(static_cast<size_t>(pre_sizes_[i]), 0);
    post_counts_.resize(post_sizes_.size());
    for (size_t j = 0; j < post_sizes_.size(); ++j)
        post_counts_[j].assign(static_cast<size_t>(post_sizes_[j]), 0);
    joint_counts_.resize(pre_sizes_.size() * post_sizes_.size());
    for (size_t i = 0; i < pre_sizes_.size(); ++i)
        for (size_t j = 0; j < post_sizes_.size(); ++j)
            joint_counts_[i * post_sizes_.size() + j].assign(
                static_cast<size_t>(pre_sizes_[i]) * static_cast<size_t>(post_sizes_[j]), 0);
}

void CountingEstimator::observe(std::span<const int> pre_states, std::span<const int> post_states) {
    if (pre_states.size() != pre_sizes_.size() || post_states.size() != post_sizes_.size())
        throw ArgumentError("counting estimator: sample arity mismatch");
    for (size_t i = 0; i < pre_sizes_.size(); ++i)
        ++pre_counts_[i][static_cast<size_t>(pre_states[i])];
    for (size_t j = 0; j < post_sizes_.size(); ++j)
        ++post_counts_[j][static_cast<size_t>(post_states[j])];
    for (size_t i = 0; i < pre_sizes_.size(); ++i)
        for (size_t j = 0; j < post_sizes_.size(); ++j)
            ++joint_counts_[i * post_sizes_.size() + j]
                           [static_cast<size_t>(pre_states[i]) * post_sizes_[j] +
                            static_cast<size_t>(post_states[j])];
    ++n_;
}

double CountingEstimator::p_pre(int i, int m) const {
    const double levels = static_cast<double>(pre_sizes_[static_cast<size_t>(i)]);
    return (static_cast<double>(pre_counts_[static_cast<size_t>(i)][static_cast<size_t>(m)]) + alpha_) /
           (static_cast<double>(n_) + alpha_ * levels);
}

double CountingEstimator::p_post(int j, int k) const {
    const double levels = static_cast<double>(post_sizes_[static_cast<size_t>(j)]);
    return (static_cast<double>(post_counts_[static_cast<size_t>(j)][static_cast<size_t>(k)]) + alpha_) /
           (static_cast<double>(n_) + alpha_ * levels);
}

double CountingEstimator::p_joint(int i, int j, int m, int k) const {
    const double levels = static_cast<double>(pre_sizes_[static_cast<size_t>(i)]) *
                          static_cast<double>(post_sizes_[static_cast<size_t>(j)]);
    const uint64_t c = joint_counts_[static_cast<size_t>(i) * post_sizes_.size() + static_cast<size_t>(j)]
                                    [static_cast<size_t>(m) * post_sizes_[static_cast<size_t>(j)] +
                                     static_cast<size_t>(k)];
    return (static_cast<double>(c) + alpha_) / (static_cast<double>(n_) + alpha_ * levels);
}

double CountingEstimator::weight(int i, int j, int m, int k) const {
    return std::log(p_joint(i, j, m, k) / (p_pre(i, m) * p_post(j, k)));
}

double CountingEstimator::mutual_information(int i, int j) const {
    double mi = 0.0;
    for (int m = 0; m < pre_sizes_[static_cast<size_t>(i)]; ++m)
        for (int k = 0; k < post_sizes_[static_cast<size_t>(j)]; ++k)
            mi += p_joint(i, j, m, k) * weight(i, j, m, k);
    return mi;
}

FlipCheck sampled_flip_check(const Model& model, const Input& query, int hidden_hc,
                             double delta, int n, CounterRng& rng) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    const WeightView w = model.weights();

    ActivationState base = forward(query, model, w);
    const int kstar = winner(base.posterior, hid, hidden_hc);
    const double s_win = base.support[static_cast<size_t>(hid.unit(hidden_hc, kstar))];
    (void)s_win;

    FlipCheck fc;
    fc.samples = n;
    for (int t = 0; t < n; ++t) {
        // Random direction: per hypercolumn, a move toward a random simplex;
        // scaled so total TV stays below the budget.
        Input perturbed = query;
        std::vector<double> targets(static_cast<size_t>(in.total));
        double tv_full = 0.0;
        for (int i = 0; i < in.hypercolumns(); ++i) {
            double sum = 0.0;
            const int mi = in.sizes[static_cast<size_t>(i)];
            for (int m = 0; m < mi; ++m) {
                const double e = -std::log(1.0 - rng.next_double());
                targets[static_cast<size_t>(in.unit(i, m))] = e;
                sum += e;
            }
            double hc_tv = 0.0;
            for (int m = 0; m < mi; ++m) {
                targets[static_cast<size_t>(in.unit(i, m))] /= sum;
                hc_tv += std::abs(targets[static_cast<size_t>(in.unit(i, m))] -
                                  query.activity[static_cast<size_t>(in.unit(i, m))]);
            }
            tv_full += 0.5 * hc_tv;
        }
        if (tv_full <= 0.0) continue;
        const double budget = delta * rng.next_double();
        const double scale = std::min(1.0, budget / tv_full);
        for (int u = 0; u < in.total; ++u)
            perturbed.activity[static_cast<size_t>(u)] =
                query.activity[static_cast<size_t>(u)] +
                scale * (targets[static_cast<size_t>(u)] - query.activity[static_cast<size_t>(u)]);

        ActivationState st = forward(perturbed, model, w);
        const double sw = st.support[static_cast<size_t>(hid.unit(hidden_hc, kstar))];
        bool flipped = false;
        for (int k = 0; k < hid.sizes[static_cast<size_t>(hidden_hc)]; ++k) {
            if (k == kstar) continue;
            if (st.support[static_cast<size_t>(hid.unit(hidden_hc, k))] >= sw) flipped = true;
        }
        fc.flips += flipped;
    }
    return fc;
}

std::vector<int> GenerativeSpec::attribute_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(tables.size());
    for (const auto& t : tables) sizes.push_back(static_cast<int>(t.front().size()));
    return sizes;
}

double GenerativeSpec::attribute_marginal(int attr, int state) const {
    double p = 0.0;
    for (int y = 0; y < classes(); ++y)
        p += class_prob[static_cast<size_t>(y)] *
             tables[static_cast<size_t>(attr)][static_cast<size_t>(y)][static_cast<size_t>(state)];
    return p;
}

double GenerativeSpec::attribute_mi(int attr) const {
    const int n_states = static_cast<int>(tables[static_cast<size_t>(attr)].front().size());
    double mi = 0.0;
    for (int y = 0; y < classes(); ++y) {
        for (int m = 0; m < n_states; ++m) {
            const double pmy = class_prob[static_cast<size_t>(y)] *
                               tables[static_cast<size_t>(attr)][static_cast<size_t>(y)][static_cast<size_t>(m)];
            if (pmy <= 0.0) continue;
            const double pm = attribute_marginal(attr, m);
            mi += pmy * std::log(pmy / (pm * class_prob[static_cast<size_t>(y)]));
        }
    }
    return mi;
}

GenerativeSpec GenerativeSpec::fruit(double noise) {
    // Modal attribute states per class: apple=(red,round,small),
    // banana=(yellow,long,medium), lemon=(yellow,oval,small),
    // watermelon=(green,round,large).
    const int modal[4][3] = {{0, 0, 0}, {1, 1, 1}, {1, 2, 0}, {2, 0, 2}};
    GenerativeSpec spec;
    spec.class_prob.assign(4, 0.25);
    spec.tables.resize(3);
    for (int a = 0; a < 3; ++a) {
        spec.tables[static_cast<size_t>(a)].resize(4);
        for (int y = 0; y < 4; ++y) {
            auto& row = spec.tables[static_cast<size_t>(a)][static_cast<size_t>(y)];
            row.assign(3, noise / 2.0);
            row[static_cast<size_t>(modal[y][a])] = 1.0 - noise;
        }
    }
    return spec;
}

GenerativeSpec GenerativeSpec::graded(const std::vector<double>& fidelities) {
    GenerativeSpec spec;
    spec.class_prob.assign(4, 0.25);
    spec.tables.resize(fidelities.size());
    for (size_t a = 0; a < fidelities.size(); ++a) {
        const double q = fidelities[a];
        spec.tables[a].resize(4);
        for (int y = 0; y < 4; ++y) {
            auto& row = spec.tables[a][static_cast<size_t>(y)];
            row.assign(4, (1.0 - q) / 3.0);
            row[static_cast<size_t>(y)] = q;
        }
    }
    return spec;
}

SyntheticGenerator::SyntheticGenerator(GenerativeSpec spec, uint64_t seed, uint64_t stream)
    : spec_(std::move(spec)), rng_(seed, stream) {}

Sample SyntheticGenerator::next() {
    Sample s;
    double u = rng_.next_double();
    int y = 0;
    for (; y + 1 < spec_.classes(); ++y) {
        if (u < spec_.class_prob[static_cast<size_t>(y)]) break;
        u -= spec_.class_prob[static_cast<size_t>(y)];
    }
    s.label = y;
    s.states.resize(static_cast<size_t>(spec_.attributes()));
    for (int a = 0; a < spec_.attributes(); ++a) {
        const auto& row = spec_.tables[static_cast<size_t>(a)][static_cast<size_t>(y)];
        double v = rng_.next_double();
        int m = 0;
        for (; m + 1 < static_cast<int>(row.size()); ++m) {
            if (v < row[static_cast<size_t>(m)]) break;
            v -= row[static_cast<size_t>(m)];
        }
        s.states[static_cast<size_t>(a)] = m;
    }
    return s;
}

}  // namespace bcpnn::oracle
