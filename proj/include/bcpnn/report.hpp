#pragma once

#include <cstdint>
#include <string>

namespace bcpnn {

/// Formats a double for reports: fixed six decimals, negative zero
/// normalized, infinities spelled out.
std::string format_value(double v);

/// Accumulates a structured-text report with stable field ordering, closed by
/// a digest line over everything above it. Two invocations producing the same
/// content produce the same bytes.
class ReportWriter {
public:
    explicit ReportWriter(const std::string& kind);

    void section(const std::string& name);
    void kv(const std::string& key, const std::string& value);
    void kv(const std::string& key, double value);
    void kv(const std::string& key, int value);
    void kv(const std::string& key, uint64_t value);
    void line(const std::string& text);

    /// Appends the digest line and returns the document.
    std::string finish();

private:
    std::string body_;
    int indent_ = 0;
};

}  // namespace bcpnn
