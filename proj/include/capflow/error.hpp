#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace capflow {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A non-finite value appeared while evaluating the scheme.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::size_t node)
        : std::runtime_error(what + " (node " + std::to_string(node) + ")"), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// A runtime invariant of the flow was broken.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string invariant, const std::string& detail)
        : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

/// Cap fit without a real solution.
class FitFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& detail, long line = 0)
        : std::runtime_error(format(key, detail, line)), key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    long line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, const std::string& detail, long line) {
        std::string s = "config";
        if (line > 0) s += " line " + std::to_string(line);
        if (!key.empty()) s += " key '" + key + "'";
        return s + ": " + detail;
    }

    std::string key_;
    long line_;
};

} // namespace capflow
