#ifndef S2GEN_COMMON_HPP
#define S2GEN_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2gen {

/// Dense row-major matrix of doubles. Rows are channels, columns are time
/// steps throughout this library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    bool empty() const { return data.empty(); }
};

/// Raised when a sampler cannot produce a valid draw within its retry budget.
class SamplingExhaustedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when pair generation rejects every candidate within max_retries.
class GenerationFailureError : public std::runtime_error {
  public:
    GenerationFailureError(const std::string& msg, std::string reason)
        : std::runtime_error(msg), last_reason(std::move(reason)) {}
    std::string last_reason;
};

/// Raised by metrics that require non-constant input.
class DegenerateInputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Expression text syntax error; offset is the byte position in the input.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : std::runtime_error(msg + " at byte " + std::to_string(byte_offset)),
          offset(byte_offset) {}
    std::size_t offset;
};

/// Shard file errors (bad magic, version, truncation).
class ShardFormatError : public std::runtime_error {
  public:
    explicit ShardFormatError(const std::string& msg, std::int64_t record = -1)
        : std::runtime_error(msg), record_index(record) {}
    std::int64_t record_index;
};

/// Config validation failure; `issues` lists every violated constraint.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& msg, std::vector<std::string> problems)
        : std::runtime_error(msg), issues(std::move(problems)) {}
    std::vector<std::string> issues;
};

}  // namespace s2gen

#endif
