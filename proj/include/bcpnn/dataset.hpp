#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcpnn/config.hpp"

namespace bcpnn {

/// Categorical dataset aligned to a configuration: one state index per input
/// hypercolumn per row, plus an optional label column for supervised mode.
struct LabeledDataset {
    std::vector<std::vector<int>> rows;  // [row][input hc] state indices
    std::vector<int> labels;             // empty when unlabeled
    bool has_labels() const { return !labels.empty(); }
    size_t size() const { return rows.size(); }
};

/// Loads a header-bearing delimited text file (comma separated). Columns are
/// matched to the configured input attributes by name; an optional column
/// named after the label hypercolumn (or literally "label") supplies labels.
/// Values are state labels or bare state indices. Throws DataError with
/// per-column diagnostics on schema mismatch.
LabeledDataset load_dataset(const std::string& path, const NetworkConfig& cfg);
LabeledDataset parse_dataset(const std::string& text, const NetworkConfig& cfg);

/// Writes a dataset in the same format (attribute columns in declared order,
/// label column last when present).
std::string format_dataset(const LabeledDataset& data, const NetworkConfig& cfg);

}  // namespace bcpnn
