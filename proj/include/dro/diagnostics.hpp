#pragma once

#include <vector>

#include "dro/model.hpp"
#include "dro/sim.hpp"

// Post-hoc verification of excitation conditions, the kappa gain bound, the
// Lyapunov monotonicity of runs, and the scenario certificate inequality
//
//     P*Lambda(u,y) + Lambda(u,y)^T*P + C(u)^T*C(u) <= 0
//
// sampled along a nominal open-loop run.

namespace dro {

struct ExcitationReport {
    double pe_window_T = 0.0;
    double pe_level = 0.0;           // required window energy
    double min_window_integral = 0.0;
    std::vector<double> cumulative;  // running integral of delta^2
    double tail_slope = 0.0;         // over the final 20% of the horizon
    bool pe_satisfied = false;
    // Finite-horizon proxy verdict for non-square-integrable excitation:
    // the tail must still contribute at least 1% of the average energy rate.
    bool tail_consistent = false;
};

/// Minimum over all window start times of the trapezoidal integral of
/// delta^2 over a window of length T. Throws ConfigError if the series is
/// shorter than T.
double pe_window_metric(const std::vector<double>& delta_series, double sample_dt,
                        double window_T);

/// Running trapezoidal integral of delta^2 on the sampled grid.
std::vector<double> cumulative_excitation(const std::vector<double>& delta_series,
                                          double sample_dt);

/// Mean growth rate of a cumulative series over its final `tail_fraction`.
double tail_slope(const std::vector<double>& cumulative, double sample_dt,
                  double tail_fraction = 0.2);

ExcitationReport excitation_report(const std::vector<double>& delta_series, double sample_dt,
                                   double window_T, double pe_level);

struct KappaBoundResult {
    bool pass = false;
    double margin = 0.0;  // kappa - rho*(p/4)*psi_sup^2
};

/// Feedback-gain bound on the forgetting rate: kappa must exceed
/// rho*(p/4)*psi_sup^2. Always passes when rho or psi_sup is zero.
KappaBoundResult kappa_bound_check(double kappa, double rho_gain, int p, double psi_sup);

/// Recomputes V0(t) = 0.5 z_bar'P z_bar + (rho/2)|eps|^2 at the stored steps
/// and returns the largest step-to-step increment; <= 1e-8 certifies
/// monotone decrease at trace resolution.
double lyapunov_monitor(const Trace& trace, const CertificateP& certificate, double kappa,
                        double rho_gain);

struct CertificateCheckResult {
    bool pass = false;
    double worst_eigenvalue = 0.0;
};

/// Max eigenvalue of P*Lambda + Lambda^T*P + C^T*C over (u,y) samples from a
/// nominal open-loop run; pass iff <= 1e-9.
CertificateCheckResult certificate_check(const Scenario& scenario, double sample_dt = 1e-3,
                                         int sample_every = 100);

}  // namespace dro
