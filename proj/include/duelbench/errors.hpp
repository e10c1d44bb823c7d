#pragma once

#include <stdexcept>
#include <string>

namespace duelbench {

/// Invalid configuration, hyperparameter assignment, or CLI input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Text that does not conform to the function grammar. Offsets are 1-based bytes.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Training data that cannot support the requested operation (single class,
/// degenerate split, fold smaller than a class).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Metric requested on inputs where it is undefined (e.g. single-class labels).
class UndefinedMetricError : public std::runtime_error {
public:
    explicit UndefinedMetricError(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix/vector dimensions that do not line up.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace duelbench
