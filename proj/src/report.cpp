#include "bcpnn/report.hpp"

#include <cmath>
#include <cstdio>

#include "bcpnn/digest.hpp"

namespace bcpnn {

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

ReportWriter::ReportWriter(const std::string& kind) {
    body_ = "bcpnn-report v1\nkind: " + kind + "\n";
}

void ReportWriter::section(const std::string& name) {
    body_ += "section: " + name + "\n";
    indent_ = 1;
}

void ReportWriter::kv(const std::string& key, const std::string& value) {
    if (indent_) body_ += "  ";
    body_ += key + ": " + value + "\n";
}

void ReportWriter::kv(const std::string& key, double value) { kv(key, format_value(value)); }

void ReportWriter::kv(const std::string& key, int value) { kv(key, std::to_string(value)); }

void ReportWriter::kv(const std::string& key, uint64_t value) { kv(key, std::to_string(value)); }

void ReportWriter::line(const std::string& text) {
    if (indent_) body_ += "  ";
    body_ += text + "\n";
}

std::string ReportWriter::finish() {
    return body_ + "digest: " + digest_hex(fnv1a64(body_)) + "\n";
}

}  // namespace bcpnn
