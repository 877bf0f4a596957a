#pragma once

#include <stdexcept>
#include <string>

namespace cicount {

// Common base so callers (notably the CLI) can map failures to categories
// without a catch cascade. kind() is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Argument outside its documented range (n, k, q bounds and the like).
class RangeError : public Error {
public:
    explicit RangeError(const std::string& msg) : Error("range", msg) {}
};

// Alias: the enumeration module documents this name for the same condition.
using InvalidRange = RangeError;

// Orthogonal-array rows must be distinct.
class DuplicateRow : public Error {
public:
    explicit DuplicateRow(const std::string& msg) : Error("duplicate_row", msg) {}
};

// Malformed container shape: wrong row width, non-square matrix, bad entry.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error("shape", msg) {}
};

// Input admissible in principle but beyond this implementation's hard caps.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& msg) : Error("capacity", msg) {}
};

// Work estimate exceeds the caller-supplied resource budget.
class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& msg) : Error("budget", msg) {}
};

// Formula evaluated at a singular point (e.g. lambda in {0,1}).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

// An internal structural invariant failed; this signals a falsified identity,
// not a bad input, and must never be swallowed.
class StructureError : public Error {
public:
    explicit StructureError(const std::string& msg) : Error("structure", msg) {}
};

} // namespace cicount
