#pragma once

#include <stdexcept>
#include <string>

namespace ifsdim {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    Singular,
    NoFixedPoint,
    NotSimilarity,
    TooLarge,
    NonPlanar,
    GuardRefusal,
    NoRoot,
    MultipleRoots,
    NotContractive,
    Divergence,
    Degenerate,
    EmptyOverlap,
    HypothesisNotMet,
    Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// certify_osc / classify_topology precondition failures name the clause that failed
class HypothesisError : public Error {
public:
    HypothesisError(std::string clause, const std::string& what)
        : Error(ErrorKind::HypothesisNotMet, what), clause_(std::move(clause)) {}
    const std::string& clause() const noexcept { return clause_; }

private:
    std::string clause_;
};

}  // namespace ifsdim
