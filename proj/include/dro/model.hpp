#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dro/errors.hpp"
#include "dro/signals.hpp"

// Affine plant contract
//
//     x_dot = A(u,y) x + Omega(u,y) theta + L(u,y)
//         y = C(u) x + Psi(u) theta
//
// together with the output-injection mapping Gamma and the derived
// quantities Lambda = A - Gamma*C and Xi = C*Y + Psi, plus a catalog of
// built-in benchmark scenarios.

namespace dro {

struct Dimensions {
    int n_x = 1;  // state
    int n_u = 1;  // input
    int n_y = 1;  // output
    int p = 1;    // parameter

    /// All dimensions >= 1 and p <= 5 (mixing algebra is cofactor-based).
    void validate() const;
};

using MatrixMapUY = std::function<Eigen::MatrixXd(const Eigen::VectorXd& u, const Eigen::VectorXd& y)>;
using VectorMapUY = std::function<Eigen::VectorXd(const Eigen::VectorXd& u, const Eigen::VectorXd& y)>;
using MatrixMapU = std::function<Eigen::MatrixXd(const Eigen::VectorXd& u)>;

struct SystemModel {
    Dimensions dims;
    MatrixMapUY A_map;      // n_x x n_x
    MatrixMapUY Omega_map;  // n_x x p
    VectorMapUY L_map;      // n_x
    MatrixMapU C_map;       // n_y x n_x
    MatrixMapU Psi_map;     // n_y x p
    MatrixMapUY Gamma_map;  // n_x x n_y

    // Declared upper bound on the spectral norm of Psi(u) over the
    // scenario's input range; checked online at every integration step.
    double psi_sup = 0.0;
};

/// Constant symmetric positive-definite certificate matrix with its
/// precomputed inverse.
struct CertificateP {
    Eigen::MatrixXd P;
    Eigen::MatrixXd P_inv;

    /// Validates symmetry, positive definiteness, and P*P_inv = I to 1e-12.
    static CertificateP from(const Eigen::MatrixXd& P);
};

struct Scenario {
    SystemModel model;
    Eigen::VectorXd theta_true;
    Eigen::VectorXd x0;
    InputSignal input;
    CertificateP certificate;
    double t_final = 50.0;
    std::string name;
};

/// y = C(u) x + Psi(u) theta.
Eigen::VectorXd output(const SystemModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta, const Eigen::VectorXd& u);

/// Plant state derivative; y is computed internally from x, theta, u.
Eigen::VectorXd plant_rhs(const SystemModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, const Eigen::VectorXd& u);

/// Lambda(u,y) = A(u,y) - Gamma(u,y) C(u).
Eigen::MatrixXd lambda_map(const SystemModel& model, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& y);

/// Xi(u,Y) = C(u) Y + Psi(u).
Eigen::MatrixXd xi_map(const SystemModel& model, const Eigen::VectorXd& u,
                       const Eigen::MatrixXd& Y);

/// Spectral norm of Psi(u), compared against the declared psi_sup.
double psi_spectral_norm(const SystemModel& model, const Eigen::VectorXd& u);

/// Solves P*L + L^T*P = Q for symmetric P (dense Kronecker linear solve;
/// intended for the small constant-Lambda certificates of the catalog).
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& q);

/// Catalog entry by name; unknown names raise a ConfigError listing the
/// valid ones.
Scenario builtin_scenario(const std::string& name);

const std::vector<std::string>& builtin_scenario_names();

/// One-line description of a catalog entry, for `list-scenarios`.
std::string builtin_scenario_summary(const std::string& name);

}  // namespace dro
