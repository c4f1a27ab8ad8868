#include "bcpnn/model.hpp"

#include <cmath>

#include "bcpnn/errors.hpp"

namespace bcpnn {

Input Input::one_hot(const Layout& in, std::span<const int> states) {
    if (static_cast<int>(states.size()) != in.hypercolumns())
        throw ArgumentError("one_hot: need one state per input hypercolumn");
    Input x;
    x.activity.assign(static_cast<size_t>(in.total), 0.0);
    for (int i = 0; i < in.hypercolumns(); ++i) {
        if (states[static_cast<size_t>(i)] < 0 || states[static_cast<size_t>(i)] >= in.sizes[static_cast<size_t>(i)])
            throw ArgumentError("one_hot: state index out of range");
        x.activity[static_cast<size_t>(in.unit(i, states[static_cast<size_t>(i)]))] = 1.0;
    }
    return x;
}

Input Input::uniform(const Layout& in) {
    Input x;
    x.activity.resize(static_cast<size_t>(in.total));
    for (int i = 0; i < in.hypercolumns(); ++i)
        for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m)
            x.activity[static_cast<size_t>(in.unit(i, m))] = 1.0 / in.sizes[static_cast<size_t>(i)];
    return x;
}

Model::Model(NetworkConfig cfg) : config(std::move(cfg)) {
    config.validate();
    in_layout = config.input_layout();
    hid_layout = config.hidden_layout();
    traces = TraceState(config, in_layout, hid_layout);
}

void validate_activity(std::span<const double> activity, const Layout& layout,
                       const char* what) {
    if (static_cast<int>(activity.size()) != layout.total)
        throw ConfigError(std::string(what) + ": activity length does not match layout");
    for (int hc = 0; hc < layout.hypercolumns(); ++hc) {
        double sum = 0.0;
        for (int m = 0; m < layout.sizes[static_cast<size_t>(hc)]; ++m) {
            const double v = activity[static_cast<size_t>(layout.unit(hc, m))];
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ArgumentError(std::string(what) + ": negative or non-finite activity");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ArgumentError(std::string(what) + ": hypercolumn " + std::to_string(hc) +
                                " activity does not sum to 1");
    }
}

SupportResult compute_support(std::span<const double> input_activity, const Model& model,
                              const WeightView& weights) {
    const Layout& in = model.in_layout;
    const Layout& hid = model.hid_layout;
    if (static_cast<int>(input_activity.size()) != in.total)
        throw ConfigError("compute_support: input activity does not match configuration");

    SupportResult r;
    r.phi.assign(static_cast<size_t>(in.hypercolumns()) * hid.total, 0.0);
    r.support.assign(static_cast<size_t>(hid.total), 0.0);

    for (int i = 0; i < in.hypercolumns(); ++i) {
        for (int j = 0; j < hid.hypercolumns(); ++j) {
            if (!model.traces.connected(i, j)) continue;
            const int64_t base = model.traces.ff_offset[static_cast<size_t>(i) * hid.hypercolumns() + j];
            const int mj = hid.sizes[static_cast<size_t>(j)];
            for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
                const double a = input_activity[static_cast<size_t>(in.unit(i, m))];
                if (a == 0.0) continue;
                const double* wrow = &weights.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * mj];
                double* prow = &r.phi[static_cast<size_t>(i) * hid.total + hid.unit(j, 0)];
                for (int k = 0; k < mj; ++k) prow[k] += a * wrow[k];
            }
        }
    }
    for (int u = 0; u < hid.total; ++u) {
        double s = weights.bias[static_cast<size_t>(u)];
        for (int i = 0; i < in.hypercolumns(); ++i)
            s += r.phi[static_cast<size_t>(i) * hid.total + u];
        r.support[static_cast<size_t>(u)] = s;
    }
    return r;
}

std::vector<double> soft_wta(std::span<const double> support, const Layout& layout) {
    std::vector<double> post(support.size());
    for (int hc = 0; hc < layout.hypercolumns(); ++hc) {
        const int m = layout.sizes[static_cast<size_t>(hc)];
        const int base = layout.unit(hc, 0);
        double mx = support[static_cast<size_t>(base)];
        for (int k = 1; k < m; ++k) mx = std::max(mx, support[static_cast<size_t>(base + k)]);
        double denom = 0.0;
        for (int k = 0; k < m; ++k) {
            const double e = std::exp(support[static_cast<size_t>(base + k)] - mx);
            post[static_cast<size_t>(base + k)] = e;
            denom += e;
        }
        for (int k = 0; k < m; ++k) post[static_cast<size_t>(base + k)] /= denom;
    }
    return post;
}

ActivationState forward(const Input& input, const Model& model) {
    return forward(input, model, model.weights());
}

ActivationState forward(const Input& input, const Model& model, const WeightView& weights) {
    validate_activity(input.activity, model.in_layout, "forward");
    ActivationState state;
    state.input_activity = input.activity;
    SupportResult s = compute_support(input.activity, model, weights);
    state.support = std::move(s.support);
    state.phi = std::move(s.phi);
    state.posterior = soft_wta(state.support, model.hid_layout);
    return state;
}

int winner(std::span<const double> activity, const Layout& layout, int hc) {
    const int base = layout.unit(hc, 0);
    int best = 0;
    for (int k = 1; k < layout.sizes[static_cast<size_t>(hc)]; ++k)
        if (activity[static_cast<size_t>(base + k)] > activity[static_cast<size_t>(base + best)]) best = k;
    return best;
}

}  // namespace bcpnn
