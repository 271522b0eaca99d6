#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dro/errors.hpp"
#include "dro/model.hpp"
#include "dro/observer.hpp"

// Deterministic fixed-step co-simulation of plant, observer, and the
// epsilon consistency oracle
//
//     eps_dot = -kappa * eps + Xi(u,Y)^T C(u) (z - z_hat),
//
// which depends on the true z and therefore exists only inside the
// simulator, never inside the observer.

namespace dro {

/// Per-field initial-condition overrides; unset fields keep the zero default.
struct InitialOverrides {
    std::optional<Eigen::VectorXd> z_hat;
    std::optional<Eigen::VectorXd> theta_hat;
    std::optional<Eigen::MatrixXd> Y;
    std::optional<Eigen::VectorXd> y_script;
    std::optional<Eigen::MatrixXd> phi;  // must be symmetric PSD
};

struct SimConfig {
    Scenario scenario;
    ObserverVariant variant = ObserverVariant::Prop1;
    ObserverGains gains;
    double dt = 1e-3;      // <= 1e-2 (stability guard for the catalog plants)
    int record_every = 10;  // trace decimation
    InitialOverrides init;

    void validate() const;
};

struct Fault {
    enum class Kind { NonFinite, Divergence, PsiSupViolation };
    Kind kind;
    double t = 0.0;
    int stage = -1;
    std::string detail;
};

/// Time-indexed record of a run. Column-oriented; all rows share the
/// uniform spacing dt * record_every.
struct Trace {
    Dimensions dims;
    double dt = 0.0;
    int record_every = 1;

    std::vector<double> t;
    std::vector<Eigen::VectorXd> x;            // plant state
    std::vector<Eigen::VectorXd> x_hat;        // z_hat + Y*theta_hat
    std::vector<Eigen::VectorXd> z;            // x - Y*theta_true
    std::vector<Eigen::VectorXd> z_hat;
    std::vector<Eigen::VectorXd> z_bar;        // z - z_hat
    std::vector<Eigen::VectorXd> theta_hat;
    std::vector<Eigen::VectorXd> theta_tilde;  // theta_true - theta_hat
    std::vector<Eigen::VectorXd> eps;          // oracle
    std::vector<double> delta;
    std::vector<double> det_phi;
    std::vector<double> min_eig_phi;
    std::vector<double> swap_residual;  // |y_script - eps - phi*theta_true|
    std::vector<double> v0;             // 0.5 z_bar'P z_bar + (rho/2)|eps|^2

    std::optional<Fault> fault;
    double max_phi_asymmetry = 0.0;  // run-wide, relative

    size_t rows() const { return t.size(); }
    double sample_dt() const { return dt * record_every; }
};

/// Classical fourth-order Runge-Kutta step. Deterministic, no adaptivity.
/// A non-finite stage derivative raises IntegrationFault with t and the
/// stage index.
template <typename F>
Eigen::VectorXd rk4_step(F&& f, const Eigen::VectorXd& s, double t, double dt) {
    const auto check = [&](const Eigen::VectorXd& k, int stage) -> const Eigen::VectorXd& {
        if (!k.allFinite())
            throw IntegrationFault("non-finite derivative at stage " + std::to_string(stage), t,
                                   stage);
        return k;
    };
    const Eigen::VectorXd k1 = check(f(t, s), 1);
    const Eigen::VectorXd k2 = check(f(t + 0.5 * dt, s + (0.5 * dt) * k1), 2);
    const Eigen::VectorXd k3 = check(f(t + 0.5 * dt, s + (0.5 * dt) * k2), 3);
    const Eigen::VectorXd k4 = check(f(t + dt, s + dt * k3), 4);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates plant, observer, and oracle jointly from t = 0 to t_final.
/// Terminates early with a fault record if any state entry exceeds 1e9 in
/// magnitude or a non-finite stage appears; both are recorded in the trace,
/// never thrown.
Trace run(const SimConfig& config);

struct RhoSweepEntry {
    double rho = 0.0;
    double sup_eps = 0.0;          // sup_t |eps(t)|
    double sup_theta_err = 0.0;    // sup_t |theta_tilde(t)|
    double final_theta_err = 0.0;
};

/// Runs the scenario once per rho value with otherwise identical
/// configuration (variant must be Prop2). The rho = 0 entry reproduces a
/// Prop1 run bit-exactly.
std::vector<RhoSweepEntry> compare_rho_sweep(const SimConfig& config,
                                             const std::vector<double>& rho_values);

/// Uniform (t, u, y) samples along an open-loop run of the plant alone;
/// used by the certificate diagnostics.
struct PlantSamples {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> u;
    std::vector<Eigen::VectorXd> y;
};

PlantSamples sample_plant(const Scenario& scenario, double dt = 1e-3, int record_every = 100);

}  // namespace dro
