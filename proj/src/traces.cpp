#include "bcpnn/traces.hpp"

#include <cmath>

#include "bcpnn/errors.hpp"

namespace bcpnn {

TraceState::TraceState(const NetworkConfig& cfg, const Layout& in, const Layout& hid) {
    input_hc_ = in.hypercolumns();
    hidden_hc_ = hid.hypercolumns();
    in_size_ = in.sizes;
    hid_size_ = hid.sizes;
    epsilon_floor = cfg.epsilon_floor;
    mask = cfg.connectivity;
    update_count = 0;

    marginal_pre.resize(static_cast<size_t>(in.total));
    for (int i = 0; i < input_hc_; ++i) {
        const double u = 1.0 / in.sizes[static_cast<size_t>(i)];
        for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m)
            marginal_pre[static_cast<size_t>(in.unit(i, m))] = u;
    }
    marginal_post.resize(static_cast<size_t>(hid.total));
    for (int j = 0; j < hidden_hc_; ++j) {
        const double u = 1.0 / hid.sizes[static_cast<size_t>(j)];
        for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k)
            marginal_post[static_cast<size_t>(hid.unit(j, k))] = u;
    }

    // Joint traces are dense over all (input hc, hidden hc) pairs so silent
    // connections carry shadow traces for the swap rule.
    // TODO: cap the shadow pool for large connectivities; dense is fine at
    // desk scale.
    ff_offset.assign(static_cast<size_t>(input_hc_) * hidden_hc_, -1);
    int64_t off = 0;
    for (int i = 0; i < input_hc_; ++i) {
        for (int j = 0; j < hidden_hc_; ++j) {
            ff_offset[static_cast<size_t>(i) * hidden_hc_ + j] = off;
            off += static_cast<int64_t>(in.sizes[static_cast<size_t>(i)]) * hid.sizes[static_cast<size_t>(j)];
        }
    }
    ff_joint.resize(static_cast<size_t>(off));
    for (int i = 0; i < input_hc_; ++i) {
        for (int j = 0; j < hidden_hc_; ++j) {
            const double u = 1.0 / (static_cast<double>(in.sizes[static_cast<size_t>(i)]) * hid.sizes[static_cast<size_t>(j)]);
            const int64_t base = ff_offset[static_cast<size_t>(i) * hidden_hc_ + j];
            const int64_t n = static_cast<int64_t>(in.sizes[static_cast<size_t>(i)]) * hid.sizes[static_cast<size_t>(j)];
            for (int64_t t = 0; t < n; ++t) ff_joint[static_cast<size_t>(base + t)] = u;
        }
    }

    if (cfg.recurrence) {
        rec_offset.assign(static_cast<size_t>(hidden_hc_) * hidden_hc_, -1);
        int64_t roff = 0;
        for (int ja = 0; ja < hidden_hc_; ++ja) {
            for (int jb = 0; jb < hidden_hc_; ++jb) {
                if (ja == jb) continue;  // a hypercolumn does not feed itself
                rec_offset[static_cast<size_t>(ja) * hidden_hc_ + jb] = roff;
                roff += static_cast<int64_t>(hid.sizes[static_cast<size_t>(ja)]) * hid.sizes[static_cast<size_t>(jb)];
            }
        }
        rec_joint.resize(static_cast<size_t>(roff));
        for (int ja = 0; ja < hidden_hc_; ++ja) {
            for (int jb = 0; jb < hidden_hc_; ++jb) {
                if (ja == jb) continue;
                const double u = 1.0 / (static_cast<double>(hid.sizes[static_cast<size_t>(ja)]) * hid.sizes[static_cast<size_t>(jb)]);
                const int64_t base = rec_offset[static_cast<size_t>(ja) * hidden_hc_ + jb];
                const int64_t n = static_cast<int64_t>(hid.sizes[static_cast<size_t>(ja)]) * hid.sizes[static_cast<size_t>(jb)];
                for (int64_t t = 0; t < n; ++t) rec_joint[static_cast<size_t>(base + t)] = u;
            }
        }

        inprc_offset.assign(static_cast<size_t>(hidden_hc_) * input_hc_, -1);
        int64_t poff = 0;
        for (int j = 0; j < hidden_hc_; ++j) {
            for (int i = 0; i < input_hc_; ++i) {
                inprc_offset[static_cast<size_t>(j) * input_hc_ + i] = poff;
                poff += static_cast<int64_t>(hid.sizes[static_cast<size_t>(j)]) * in.sizes[static_cast<size_t>(i)];
            }
        }
        inprc_joint.resize(static_cast<size_t>(poff));
        for (int j = 0; j < hidden_hc_; ++j) {
            for (int i = 0; i < input_hc_; ++i) {
                const double u = 1.0 / (static_cast<double>(hid.sizes[static_cast<size_t>(j)]) * in.sizes[static_cast<size_t>(i)]);
                const int64_t base = inprc_offset[static_cast<size_t>(j) * input_hc_ + i];
                const int64_t n = static_cast<int64_t>(hid.sizes[static_cast<size_t>(j)]) * in.sizes[static_cast<size_t>(i)];
                for (int64_t t = 0; t < n; ++t) inprc_joint[static_cast<size_t>(base + t)] = u;
            }
        }
    }
}

WeightView weights_from_traces(const TraceState& traces, const Layout& in, const Layout& hid) {
    WeightView w;
    const int hi = in.hypercolumns();
    const int hh = hid.hypercolumns();

    w.bias.resize(static_cast<size_t>(hid.total));
    for (int u = 0; u < hid.total; ++u) w.bias[static_cast<size_t>(u)] = std::log(traces.post(u));

    w.ff.resize(traces.ff_joint.size());
    for (int i = 0; i < hi; ++i) {
        for (int j = 0; j < hh; ++j) {
            const int64_t base = traces.ff_offset[static_cast<size_t>(i) * hh + j];
            for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
                const double pim = traces.pre(in.unit(i, m));
                for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
                    const double pjk = traces.post(hid.unit(j, k));
                    const double pj = traces.ff(i, j, m, k);
                    w.ff[static_cast<size_t>(base) + static_cast<size_t>(m) * hid.sizes[static_cast<size_t>(j)] + k] =
                        std::log(pj / (pim * pjk));
                }
            }
        }
    }

    if (traces.has_recurrent()) {
        w.rec.resize(traces.rec_joint.size());
        for (int ja = 0; ja < hh; ++ja) {
            for (int jb = 0; jb < hh; ++jb) {
                if (ja == jb) continue;
                const int64_t base = traces.rec_offset[static_cast<size_t>(ja) * hh + jb];
                for (int ka = 0; ka < hid.sizes[static_cast<size_t>(ja)]; ++ka) {
                    const double pa = traces.post(hid.unit(ja, ka));
                    for (int kb = 0; kb < hid.sizes[static_cast<size_t>(jb)]; ++kb) {
                        const double pb = traces.post(hid.unit(jb, kb));
                        const double pj = traces.rec(ja, jb, ka, kb);
                        w.rec[static_cast<size_t>(base) + static_cast<size_t>(ka) * hid.sizes[static_cast<size_t>(jb)] + kb] =
                            std::log(pj / (pa * pb));
                    }
                }
            }
        }
    }
    if (traces.has_inprc()) {
        w.inprc.resize(traces.inprc_joint.size());
        w.inprc_bias.resize(static_cast<size_t>(in.total));
        for (int u = 0; u < in.total; ++u) w.inprc_bias[static_cast<size_t>(u)] = std::log(traces.pre(u));
        for (int j = 0; j < hh; ++j) {
            for (int i = 0; i < hi; ++i) {
                const int64_t base = traces.inprc_offset[static_cast<size_t>(j) * hi + i];
                for (int k = 0; k < hid.sizes[static_cast<size_t>(j)]; ++k) {
                    const double pjk = traces.post(hid.unit(j, k));
                    for (int m = 0; m < in.sizes[static_cast<size_t>(i)]; ++m) {
                        const double pim = traces.pre(in.unit(i, m));
                        const double pj = traces.inprc(j, i, k, m);
                        w.inprc[static_cast<size_t>(base) + static_cast<size_t>(k) * in.sizes[static_cast<size_t>(i)] + m] =
                            std::log(pj / (pjk * pim));
                    }
                }
            }
        }
    }
    return w;
}

}  // namespace bcpnn
