#pragma once

#include <stdexcept>
#include <string>

namespace dro {

/// Invalid user-supplied configuration: unknown scenario, bad dimensions,
/// out-of-range gains, malformed files. Maps to CLI exit code 3.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Internal-consistency violation detected at run time, e.g. a regressor
/// extension matrix that lost symmetry. Indicates an integrator fault,
/// not bad user input.
struct IntegrityError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Non-finite value produced while integrating. Carries the time of the
/// failing step and the Runge-Kutta stage index (1-4, or -1 if unknown).
struct IntegrationFault : std::runtime_error {
    IntegrationFault(const std::string& what, double t_fail, int stage_index = -1)
        : std::runtime_error(what), t(t_fail), stage(stage_index) {}

    double t;
    int stage;
};

}  // namespace dro
