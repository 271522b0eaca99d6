#include "dro/signals.hpp"

#include <cmath>

namespace dro {

double Signal::operator()(double t) const {
    if (t >= switch_off) return 0.0;
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::Sine:
            return amplitude * std::sin(omega * t + phase) + offset;
        case Kind::DecayingSine:
            return amplitude * std::exp(-decay * t) * std::sin(omega * t + phase) + offset;
    }
    return 0.0;
}

Signal Signal::constant(double c) {
    Signal s;
    s.kind = Kind::Constant;
    s.value = c;
    return s;
}

Signal Signal::sine(double amplitude, double omega, double phase, double offset) {
    Signal s;
    s.kind = Kind::Sine;
    s.amplitude = amplitude;
    s.omega = omega;
    s.phase = phase;
    s.offset = offset;
    return s;
}

Signal Signal::decaying_sine(double amplitude, double decay, double omega, double phase) {
    Signal s;
    s.kind = Kind::DecayingSine;
    s.amplitude = amplitude;
    s.decay = decay;
    s.omega = omega;
    s.phase = phase;
    return s;
}

Signal Signal::until(double t_off) const {
    Signal s = *this;
    s.switch_off = t_off;
    return s;
}

Eigen::VectorXd InputSignal::operator()(double t) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(channels.size()));
    for (size_t i = 0; i < channels.size(); ++i) u(static_cast<Eigen::Index>(i)) = channels[i](t);
    return u;
}

}  // namespace dro
