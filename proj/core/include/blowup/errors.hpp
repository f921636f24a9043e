#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid input for an operation: NaN endpoints, division by an interval
// containing zero, evaluation outside the stated domain, shape mismatch.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Dimension / degree mismatch between containers.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// A point that should be strictly inside the unit horizon ball is not.
struct HorizonError : Error {
    explicit HorizonError(const std::string& msg) : Error(msg) {}
};

// Interval Newton / Krawczyk iteration failed to contract.
struct NoContraction : Error {
    explicit NoContraction(const std::string& msg) : Error(msg) {}
};

// A certified eigenvalue enclosure touches zero, or a requested stable
// eigenvalue does not exist.
struct NonHyperbolic : Error {
    explicit NonHyperbolic(const std::string& msg) : Error(msg) {}
};

// Float Newton refinement failed to converge.
struct NewtonDiverged : Error {
    explicit NewtonDiverged(const std::string& msg) : Error(msg) {}
};

// A certification bound came out incompatible (e.g. Z0+Z1 >= 1).
struct VerificationFailed : Error {
    explicit VerificationFailed(const std::string& msg) : Error(msg) {}
};

// An eigenvalue combination alpha.lambda - lambda_j could not be
// bounded away from zero.
struct ResonancePossible : Error {
    explicit ResonancePossible(const std::string& msg) : Error(msg) {}
};

// No a priori enclosure could be validated for an integration step.
struct NoEnclosure : Error {
    explicit NoEnclosure(const std::string& msg) : Error(msg) {}
};

// A rigorous trajectory left the chart domain.
struct DomainExit : Error {
    explicit DomainExit(const std::string& msg) : Error(msg) {}
};

// A closed-form expression was evaluated outside the region where it is
// known to represent the quantity (e.g. the image leaves the horizon
// ball).
struct ValidityError : Error {
    explicit ValidityError(const std::string& msg) : Error(msg) {}
};

} // namespace blowup
