#pragma once

#include <stdexcept>
#include <string>

namespace birkhoff {

// Input/definition errors: the CLI maps these to exit code 2.
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures: the CLI maps these to exit code 3.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyAlphabet : InvalidInput {
    EmptyAlphabet() : InvalidInput("alphabet must contain at least one symbol") {}
};

struct NonPrimitive : InvalidInput {
    explicit NonPrimitive(const std::string& what) : InvalidInput(what) {}
};

struct BadBetaExpansion : InvalidInput {
    explicit BadBetaExpansion(const std::string& what) : InvalidInput(what) {}
};

struct WordTooLong : InvalidInput {
    explicit WordTooLong(const std::string& what) : InvalidInput(what) {}
};

struct WordTooShort : InvalidInput {
    explicit WordTooShort(const std::string& what) : InvalidInput(what) {}
};

struct BadCheckpoints : InvalidInput {
    explicit BadCheckpoints(const std::string& what) : InvalidInput(what) {}
};

struct DepthMismatch : InvalidInput {
    explicit DepthMismatch(const std::string& what) : InvalidInput(what) {}
};

struct BadWeights : InvalidInput {
    explicit BadWeights(const std::string& what) : InvalidInput(what) {}
};

struct BadMeasure : InvalidInput {
    explicit BadMeasure(const std::string& what) : InvalidInput(what) {}
};

struct DegenerateWindow : InvalidInput {
    explicit DegenerateWindow(const std::string& what) : InvalidInput(what) {}
};

struct ExhaustiveTooLarge : InvalidInput {
    explicit ExhaustiveTooLarge(const std::string& what) : InvalidInput(what) {}
};

struct HorizonTooShort : InvalidInput {
    explicit HorizonTooShort(const std::string& what) : InvalidInput(what) {}
};

// Constraint target outside (or on the unreachable boundary of) the feasible set.
struct Infeasible : InvalidInput {
    explicit Infeasible(const std::string& what) : InvalidInput(what) {}
};

struct NoConvergence : NumericFailure {
    explicit NoConvergence(const std::string& what) : NumericFailure(what) {}
};

struct BisectionBracketFailure : NumericFailure {
    explicit BisectionBracketFailure(const std::string& what) : NumericFailure(what) {}
};

struct ArithmeticOverflow : NumericFailure {
    explicit ArithmeticOverflow(const std::string& what) : NumericFailure(what) {}
};

}  // namespace birkhoff
