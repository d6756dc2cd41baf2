#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace minkowski {

/// Argument outside the domain of a function (e.g. t outside [-1, 1]).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Degree sum above the configured exact-arithmetic cap.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Enumeration work (path lattice, triple sum) above its budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double size, double budget)
        : std::runtime_error(what + ": size " + std::to_string(size) + " exceeds budget " +
                             std::to_string(budget)),
          size_(size), budget_(budget) {}

    double size() const noexcept { return size_; }
    double budget() const noexcept { return budget_; }

private:
    double size_;
    double budget_;
};

/// 1 + u fails to stay positive, so Sigma(u) is not a normal graph.
class GraphConditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-fatal diagnostics (quadrature budget warnings). Default handler writes
/// to stderr; tests install their own to capture messages.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

} // namespace minkowski
