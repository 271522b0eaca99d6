#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

// Closed signal algebra for exogenous inputs: constants, sinusoids,
// decaying sinusoids, each optionally switched off at a fixed time.
// Runs are reproducible from a config file alone because inputs are
// data, not user code.

namespace dro {

struct Signal {
    enum class Kind { Constant, Sine, DecayingSine };

    Kind kind = Kind::Constant;
    double value = 0.0;      // Constant
    double amplitude = 0.0;  // Sine / DecayingSine
    double omega = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double decay = 0.0;  // DecayingSine: amplitude * exp(-decay*t) * sin(omega*t + phase)

    // Channel output is forced to 0 for t >= switch_off.
    double switch_off = std::numeric_limits<double>::infinity();

    double operator()(double t) const;

    static Signal constant(double c);
    static Signal sine(double amplitude, double omega, double phase = 0.0, double offset = 0.0);
    static Signal decaying_sine(double amplitude, double decay, double omega, double phase = 0.0);

    /// Copy of this signal that switches off at t_off.
    Signal until(double t_off) const;
};

struct InputSignal {
    std::vector<Signal> channels;

    Eigen::VectorXd operator()(double t) const;
    int dim() const { return static_cast<int>(channels.size()); }
};

}  // namespace dro
