#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reprtrace {

// A function argument outside its documented domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Not enough observations to compute the requested statistic.
class InsufficientDataError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A query beyond the defined range (e.g. time past the workload schedule).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A ground-truth request type with no counterpart in the compared sample.
class MissingTypeError : public std::runtime_error {
public:
    explicit MissingTypeError(std::string type_id)
        : std::runtime_error("request type '" + type_id + "' has no sampled executions"),
          type_id_(std::move(type_id)) {}

    const std::string& type_id() const noexcept { return type_id_; }

private:
    std::string type_id_;
};

// Invalid scenario or command-line configuration. `line` is 1-based; 0 when
// the problem is not tied to a line of the source file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, const std::string& message)
        : std::runtime_error(format(source, line, message)),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& message) {
        std::string out = source.empty() ? std::string("<config>") : source;
        if (line > 0) {
            out += ":" + std::to_string(line);
        }
        return out + ": " + message;
    }

    std::string source_;
    std::size_t line_;
};

}  // namespace reprtrace
