#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bcpnn {

/// Average ranks (1-based); ties share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation with average-rank tie handling. Returns 0 when
/// either input has zero rank variance.
double spearman(std::span<const double> a, std::span<const double> b);

/// AUROC of score separating positives (expected higher) from negatives,
/// computed via the Mann-Whitney U statistic with tie correction.
double auroc(std::span<const double> positives, std::span<const double> negatives);

double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v);

}  // namespace bcpnn
