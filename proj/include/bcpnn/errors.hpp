#pragma once

#include <stdexcept>
#include <string>

namespace bcpnn {

/// Invalid network configuration or a query that does not match it.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dataset/schema problems (bad columns, unknown state labels, malformed rows).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad argument to an operation (out-of-range minicolumn, window longer than run, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Internal invariant violation; indicates an engine bug, not a user error.
class InvariantError : public std::logic_error {
public:
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

/// Usage score requested for a connection whose denominator is empty.
class UndefinedUsageError : public std::runtime_error {
public:
    explicit UndefinedUsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bcpnn
