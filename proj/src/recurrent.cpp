#include "bcpnn/recurrent.hpp"

#include <cmath>

#include "bcpnn/errors.hpp"

namespace bcpnn {

namespace {

void apply_clamp(std::vector<double>& hidden, const Layout& hid, const Clamp& c) {
    for (int k = 0; k < hid.sizes[static_cast<size_t>(c.hypercolumn)]; ++k)
        hidden[static_cast<size_t>(hid.unit(c.hypercolumn, k))] = 0.0;
    hidden[static_cast<size_t>(hid.unit(c.hypercolumn, c.minicolumn))] = 1.0;
}

void check_clamp(const Layout& hid, const Clamp& c) {
    if (c.hypercolumn < 0 || c.hypercolumn >= hid.hypercolumns())
        throw ArgumentError("clamp: hypercolumn out of range");
    if (c.minicolumn < 0 || c.minicolumn >= hid.sizes[static_cast<size_t>(c.hypercolumn)])
        throw ArgumentError("clamp: target minicolumn out of range");
}

}  // namespace

AttractorRun settle(const Model& model, const WeightView& weights, const Input& input,
                    std::span<const double> initial_hidden, int max_steps, double eps,
                    std::optional<Clamp> clamp) {
    if (!model.config.recurrence || !model.traces.has_recurrent())
        throw ConfigError("settle: recurrence is disabled in this configuration");
    if (max_steps < 1) throw ConfigError("settle: max_steps must be >= 1");
    if (clamp) check_clamp(model.hid_layout, *clamp);
    validate_activity(initial_hidden, model.hid_layout, "settle(initial)");

    const Layout& hid = model.hid_layout;
    const SupportResult ff = compute_support(input.activity, model, weights);

    AttractorRun run;
    std::vector<double> current(initial_hidden.begin(), initial_hidden.end());
    if (clamp) apply_clamp(current, hid, *clamp);
    run.trajectory.push_back(current);

    const int hh = hid.hypercolumns();
    std::vector<double> support(static_cast<size_t>(hid.total));
    for (int t = 0; t < max_steps; ++t) {
        for (int j = 0; j < hh; ++j) {
            const int mj = hid.sizes[static_cast<size_t>(j)];
            for (int k = 0; k < mj; ++k) {
                double s = ff.support[static_cast<size_t>(hid.unit(j, k))];
                for (int ja = 0; ja < hh; ++ja) {
                    if (ja == j) continue;
                    const int64_t base = model.traces.rec_offset[static_cast<size_t>(ja) * hh + j];
                    double acc = 0.0;
                    for (int ka = 0; ka < hid.sizes[static_cast<size_t>(ja)]; ++ka) {
                        acc += current[static_cast<size_t>(hid.unit(ja, ka))] *
                               weights.rec[static_cast<size_t>(base) + static_cast<size_t>(ka) * mj + k];
                    }
                    s += acc;
                }
                support[static_cast<size_t>(hid.unit(j, k))] = s;
            }
        }
        std::vector<double> next = soft_wta(support, hid);
        if (clamp) apply_clamp(next, hid, *clamp);

        double inf_norm = 0.0, l2 = 0.0;
        for (size_t u = 0; u < next.size(); ++u) {
            const double d = next[u] - current[u];
            inf_norm = std::max(inf_norm, std::abs(d));
            l2 += d * d;
        }
        run.step_inf_norm.push_back(inf_norm);
        run.step_l2_norm.push_back(std::sqrt(l2));
        run.trajectory.push_back(next);
        current = std::move(next);

        if (inf_norm < eps) {
            run.converged = true;
            run.settled_step = t;
            break;
        }
    }
    return run;
}

AttractorRun settle_from_input(const Model& model, const WeightView& weights,
                               const Input& input, std::optional<Clamp> clamp) {
    ActivationState ff = forward(input, model, weights);
    return settle(model, weights, input, ff.posterior, model.config.max_settle_steps,
                  model.config.settle_tolerance, clamp);
}

Reconstruction reconstruct(const Model& model, const WeightView& weights,
                           std::span<const double> hidden) {
    if (!model.traces.has_inprc())
        throw ConfigError("reconstruct: reconstruction pathway is disabled in this configuration");
    validate_activity(hidden, model.hid_layout, "reconstruct(hidden)");

    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;

    // The settled attractor state is read out through its per-hypercolumn
    // winners; this makes reconstructing from a state and from a clamp on
    // that state's winner identical.
    std::vector<int> win(static_cast<size_t>(hid.hypercolumns()));
    for (int j = 0; j < hid.hypercolumns(); ++j) win[static_cast<size_t>(j)] = winner(hidden, hid, j);

    std::vector<double> support(static_cast<size_t>(in.total));
    for (int i = 0; i < in.hypercolumns(); ++i) {
        const int mi = in.sizes[static_cast<size_t>(i)];
        for (int m = 0; m < mi; ++m) {
            double s = weights.inprc_bias[static_cast<size_t>(in.unit(i, m))];
            for (int j = 0; j < hid.hypercolumns(); ++j) {
                const int64_t base = model.traces.inprc_offset[static_cast<size_t>(j) * in.hypercolumns() + i];
                s += weights.inprc[static_cast<size_t>(base) +
                                   static_cast<size_t>(win[static_cast<size_t>(j)]) * mi + m];
            }
            support[static_cast<size_t>(in.unit(i, m))] = s;
        }
    }
    Reconstruction rc;
    rc.activity = soft_wta(support, in);
    return rc;
}

Reconstruction reconstruct_clamped(const Model& model, const WeightView& weights,
                                   const Input& input, std::span<const double> hidden,
                                   Clamp clamp, bool resettle) {
    check_clamp(model.hid_layout, clamp);
    std::vector<double> forced(hidden.begin(), hidden.end());
    apply_clamp(forced, model.hid_layout, clamp);

    Reconstruction rc;
    if (resettle) {
        AttractorRun run = settle(model, weights, input, forced, model.config.max_settle_steps,
                                  model.config.settle_tolerance, clamp);
        rc = reconstruct(model, weights, run.trajectory.back());
    } else {
        rc = reconstruct(model, weights, forced);
    }
    rc.clamped = clamp;
    return rc;
}

}  // namespace bcpnn
