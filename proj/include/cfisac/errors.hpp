#pragma once

#include <stdexcept>
#include <string>

namespace cfisac {

/// Precondition violation on a numeric argument (negative distance, zero
/// wavelength, probability outside [0,1], ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Geometry degenerated to the point where an array derivative is undefined
/// (a target coincides with an antenna element).
class SingularGeometry : public std::runtime_error {
public:
    explicit SingularGeometry(const std::string& what) : std::runtime_error(what) {}
};

/// The Fisher information for a target is singular under the given design;
/// the target is unobservable.
class SingularFim : public std::runtime_error {
public:
    explicit SingularFim(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario generation could not satisfy the visibility invariants within the
/// retry budget.
class ScenarioInfeasible : public std::runtime_error {
public:
    explicit ScenarioInfeasible(const std::string& what) : std::runtime_error(what) {}
};

/// The alternating design loop hit an infeasible subproblem (or a UE with an
/// empty visible set) and could not recover.
class B2sInfeasible : public std::runtime_error {
public:
    explicit B2sInfeasible(const std::string& what) : std::runtime_error(what) {}
};

/// A problem or network was assembled with inconsistent dimensions or an
/// unsupported operation.
class BuildError : public std::logic_error {
public:
    explicit BuildError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cfisac
