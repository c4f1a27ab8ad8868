#include "bcpnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bcpnn {

std::vector<double> average_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return values[i] < values[j]; });

    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    const size_t n = a.size();
    if (n != b.size() || n < 2) return 0.0;
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);

    const double ma = mean(ra), mb = mean(rb);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = ra[i] - ma, db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

double auroc(std::span<const double> positives, std::span<const double> negatives) {
    if (positives.empty() || negatives.empty()) return 0.5;
    // Rank the pooled scores; U = sum of positive ranks - n_pos(n_pos+1)/2.
    std::vector<double> pooled;
    pooled.reserve(positives.size() + negatives.size());
    pooled.insert(pooled.end(), positives.begin(), positives.end());
    pooled.insert(pooled.end(), negatives.begin(), negatives.end());
    const std::vector<double> ranks = average_ranks(pooled);

    double rank_sum = 0.0;
    for (size_t i = 0; i < positives.size(); ++i) rank_sum += ranks[i];
    const double np = static_cast<double>(positives.size());
    const double nn = static_cast<double>(negatives.size());
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace bcpnn
