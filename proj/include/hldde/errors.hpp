// Error types shared across the workbench. Parameter misuse and domain
// violations are exceptions; soft accuracy issues travel as flags on results.
#pragma once

#include <stdexcept>
#include <string>

namespace hldde {

// Constructor/argument contract violations (alpha <= 1, empty grid, ...).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the mathematical domain (nonpositive sample where a
// positive coefficient is required, non-finite integrand value, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caller violated a documented precondition that is only checkable at run
// time (grid too short, divergent integrand passed to a tail routine, ...).
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// A numerical decision procedure could not commit to a verdict.
struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A trajectory landed in a different solution class than a hypothesis report
// predicted. Carries both labels so callers can show the disagreement.
struct ClassMismatchError : std::runtime_error {
    std::string predicted;
    std::string observed;
    ClassMismatchError(const std::string& pred, const std::string& obs)
        : std::runtime_error("predicted class " + pred + " but trajectory classified as " + obs),
          predicted(pred), observed(obs) {}
};

} // namespace hldde
