#include "bcpnn/dataset.hpp"

#include <fstream>
#include <sstream>

#include "bcpnn/errors.hpp"

namespace bcpnn {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

int match_state(const std::string& value, const AttributeSpec& attr, size_t row,
                const std::string& column) {
    for (size_t s = 0; s < attr.states.size(); ++s)
        if (attr.states[s] == value) return static_cast<int>(s);
    // Bare indices are accepted for unlabeled synthetic data.
    try {
        size_t pos = 0;
        const int idx = std::stoi(value, &pos);
        if (pos == value.size() && idx >= 0 && idx < static_cast<int>(attr.states.size()))
            return idx;
    } catch (...) {
    }
    throw DataError("dataset: row " + std::to_string(row) + " column '" + column +
                    "': unknown state '" + value + "'");
}

}  // namespace

LabeledDataset parse_dataset(const std::string& text, const NetworkConfig& cfg) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset: empty file");
    const std::vector<std::string> header = split_csv(line);

    const std::string label_name = cfg.hidden[static_cast<size_t>(cfg.label_hypercolumn)].name;
    std::vector<int> attr_col(cfg.input.size(), -1);
    int label_col = -1;
    std::vector<std::string> unknown;
    for (size_t c = 0; c < header.size(); ++c) {
        bool matched = false;
        for (size_t i = 0; i < cfg.input.size(); ++i) {
            if (header[c] == cfg.input[i].name) {
                attr_col[i] = static_cast<int>(c);
                matched = true;
                break;
            }
        }
        if (!matched && (header[c] == label_name || header[c] == "label")) {
            label_col = static_cast<int>(c);
            matched = true;
        }
        if (!matched) unknown.push_back(header[c]);
    }

    std::string problems;
    for (size_t i = 0; i < cfg.input.size(); ++i) {
        if (attr_col[i] < 0)
            problems += " missing attribute column '" + cfg.input[i].name + "';";
    }
    for (const auto& u : unknown) problems += " unknown column '" + u + "';";
    if (!problems.empty()) throw DataError("dataset: schema mismatch:" + problems);

    LabeledDataset data;
    size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size())
            throw DataError("dataset: row " + std::to_string(row_no) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        std::vector<int> states(cfg.input.size());
        for (size_t i = 0; i < cfg.input.size(); ++i)
            states[i] = match_state(fields[static_cast<size_t>(attr_col[i])], cfg.input[i],
                                    row_no, cfg.input[i].name);
        data.rows.push_back(std::move(states));
        if (label_col >= 0) {
            data.labels.push_back(match_state(fields[static_cast<size_t>(label_col)],
                                              cfg.hidden[static_cast<size_t>(cfg.label_hypercolumn)],
                                              row_no, header[static_cast<size_t>(label_col)]));
        }
    }
    return data;
}

LabeledDataset load_dataset(const std::string& path, const NetworkConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("dataset: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), cfg);
}

std::string format_dataset(const LabeledDataset& data, const NetworkConfig& cfg) {
    std::ostringstream out;
    for (size_t i = 0; i < cfg.input.size(); ++i) {
        if (i) out << ',';
        out << cfg.input[i].name;
    }
    if (data.has_labels())
        out << ',' << cfg.hidden[static_cast<size_t>(cfg.label_hypercolumn)].name;
    out << '\n';
    for (size_t r = 0; r < data.rows.size(); ++r) {
        for (size_t i = 0; i < cfg.input.size(); ++i) {
            if (i) out << ',';
            out << cfg.input[i].states[static_cast<size_t>(data.rows[r][i])];
        }
        if (data.has_labels())
            out << ',' << cfg.hidden[static_cast<size_t>(cfg.label_hypercolumn)]
                              .states[static_cast<size_t>(data.labels[r])];
        out << '\n';
    }
    return out.str();
}

}  // namespace bcpnn
