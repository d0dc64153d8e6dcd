#pragma once

#include <stdexcept>
#include <string>

namespace crossflow
{
    // Diagonal / self-pair queries on the conflict structure.
    struct IllegalCaseError : std::logic_error
    {
        explicit IllegalCaseError(const std::string& what) : std::logic_error(what) {}
    };

    // Bad run parameters or malformed input files.
    struct ConfigError : std::runtime_error
    {
        explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
    };

    // Argument outside a formula's domain.
    struct DomainError : std::invalid_argument
    {
        explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
    };

    // Querying a waiting time before the vehicle has crossed.
    struct NotDepartedError : std::logic_error
    {
        explicit NotDepartedError(const std::string& what) : std::logic_error(what) {}
    };

    // A state the scheduler must make unreachable.
    struct InvariantViolation : std::logic_error
    {
        explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
    };

    // Two coincident points cannot define a calibration line.
    struct DegenerateLineError : std::invalid_argument
    {
        explicit DegenerateLineError(const std::string& what) : std::invalid_argument(what) {}
    };

} // namespace crossflow
