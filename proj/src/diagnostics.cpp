#include "dro/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace dro {

double pe_window_metric(const std::vector<double>& delta_series, double sample_dt,
                        double window_T) {
    if (!(sample_dt > 0)) throw ConfigError("pe_window_metric: sample_dt must be > 0");
    if (!(window_T > 0)) throw ConfigError("pe_window_metric: window_T must be > 0");
    const size_t n = delta_series.size();
    const double horizon = n < 2 ? 0.0 : static_cast<double>(n - 1) * sample_dt;
    if (horizon < window_T)
        throw ConfigError("pe_window_metric: series covers " + std::to_string(horizon) +
                          " s, shorter than the window of " + std::to_string(window_T) + " s");

    const size_t m = std::max<size_t>(1, static_cast<size_t>(std::llround(window_T / sample_dt)));
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + m < n; ++i) {
        double acc = 0.0;
        for (size_t j = i; j < i + m; ++j) {
            const double a = delta_series[j] * delta_series[j];
            const double b = delta_series[j + 1] * delta_series[j + 1];
            acc += 0.5 * (a + b) * sample_dt;
        }
        best = std::min(best, acc);
    }
    return best;
}

std::vector<double> cumulative_excitation(const std::vector<double>& delta_series,
                                          double sample_dt) {
    if (!(sample_dt > 0)) throw ConfigError("cumulative_excitation: sample_dt must be > 0");
    std::vector<double> out(delta_series.size(), 0.0);
    for (size_t i = 1; i < delta_series.size(); ++i) {
        const double a = delta_series[i - 1] * delta_series[i - 1];
        const double b = delta_series[i] * delta_series[i];
        out[i] = out[i - 1] + 0.5 * (a + b) * sample_dt;
    }
    return out;
}

double tail_slope(const std::vector<double>& cumulative, double sample_dt,
                  double tail_fraction) {
    if (cumulative.size() < 2) return 0.0;
    const size_t n = cumulative.size();
    const size_t start = std::min(n - 2, static_cast<size_t>(std::floor(
                                             static_cast<double>(n - 1) * (1.0 - tail_fraction))));
    const double dt_total = static_cast<double>(n - 1 - start) * sample_dt;
    return (cumulative[n - 1] - cumulative[start]) / dt_total;
}

ExcitationReport excitation_report(const std::vector<double>& delta_series, double sample_dt,
                                   double window_T, double pe_level) {
    ExcitationReport r;
    r.pe_window_T = window_T;
    r.pe_level = pe_level;
    r.min_window_integral = pe_window_metric(delta_series, sample_dt, window_T);
    r.pe_satisfied = r.min_window_integral >= pe_level;
    r.cumulative = cumulative_excitation(delta_series, sample_dt);
    r.tail_slope = tail_slope(r.cumulative, sample_dt);
    const double horizon = static_cast<double>(delta_series.size() - 1) * sample_dt;
    const double avg_rate = horizon > 0 ? r.cumulative.back() / horizon : 0.0;
    r.tail_consistent = r.tail_slope > 0.01 * avg_rate && r.tail_slope > 0.0;
    return r;
}

KappaBoundResult kappa_bound_check(double kappa, double rho_gain, int p, double psi_sup) {
    if (!(kappa > 0)) throw ConfigError("kappa_bound_check: kappa must be > 0");
    if (!(rho_gain >= 0)) throw ConfigError("kappa_bound_check: rho must be >= 0");
    if (p < 1) throw ConfigError("kappa_bound_check: p must be >= 1");
    if (!(psi_sup >= 0)) throw ConfigError("kappa_bound_check: psi_sup must be >= 0");
    KappaBoundResult r;
    r.margin = kappa - rho_gain * (static_cast<double>(p) / 4.0) * psi_sup * psi_sup;
    r.pass = r.margin > 0.0;
    return r;
}

double lyapunov_monitor(const Trace& trace, const CertificateP& certificate, double kappa,
                        double rho_gain) {
    (void)kappa;  // part of the run context; the monitor only checks monotonicity
    double max_increment = 0.0;
    double prev = 0.0;
    for (size_t i = 0; i < trace.rows(); ++i) {
        const Eigen::VectorXd& zb = trace.z_bar[i];
        const Eigen::VectorXd& eps = trace.eps[i];
        const double v0 = 0.5 * zb.dot(certificate.P * zb) + 0.5 * rho_gain * eps.squaredNorm();
        if (i > 0) max_increment = std::max(max_increment, v0 - prev);
        prev = v0;
    }
    return max_increment;
}

CertificateCheckResult certificate_check(const Scenario& scenario, double sample_dt,
                                         int sample_every) {
    const PlantSamples samples = sample_plant(scenario, sample_dt, sample_every);
    const Eigen::MatrixXd& P = scenario.certificate.P;

    CertificateCheckResult r;
    r.worst_eigenvalue = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < samples.t.size(); ++i) {
        const Eigen::MatrixXd lambda = lambda_map(scenario.model, samples.u[i], samples.y[i]);
        const Eigen::MatrixXd c = scenario.model.C_map(samples.u[i]);
        Eigen::MatrixXd m = P * lambda + lambda.transpose() * P + c.transpose() * c;
        m = 0.5 * (m + m.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        r.worst_eigenvalue = std::max(r.worst_eigenvalue, es.eigenvalues().maxCoeff());
    }
    r.pass = r.worst_eigenvalue <= 1e-9;
    return r;
}

}  // namespace dro
