#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tatune {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ErrorKind {
    NoStructuralPath,
    AlreadyReachable,
    Inconclusive,
    LimitExceeded,
    InsufficientInput,
    SufficientInput,
    BudgetExceeded,
    InfeasibleSystem,
    NonMonotoneOracle,
    InvalidParams,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NoStructuralPath: return "NoStructuralPath";
    case ErrorKind::AlreadyReachable: return "AlreadyReachable";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::LimitExceeded: return "LimitExceeded";
    case ErrorKind::InsufficientInput: return "InsufficientInput";
    case ErrorKind::SufficientInput: return "SufficientInput";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InfeasibleSystem: return "InfeasibleSystem";
    case ErrorKind::NonMonotoneOracle: return "NonMonotoneOracle";
    case ErrorKind::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

/// Failure of an analysis step; `kind()` is stable and machine readable.
class AnalysisError : public std::runtime_error {
public:
    AnalysisError(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace tatune
