#pragma once

#include <Eigen/Dense>

#include "dro/mixing.hpp"
#include "dro/model.hpp"

// Observer right-hand sides. Variant Prop1 runs the plain filtered
// transformation with the Kreisselmeier regressor extension; Prop2 feeds the
// extension matrix back into the filter and estimator through
// T(u,Y) = P^{-1} C^T Xi, damping the effect of the initial state error on
// parameter estimation.

namespace dro {

enum class ObserverVariant { Prop1, Prop2 };

struct ObserverGains {
    double lambda = 1.0;    // adaptation gain, > 0
    double kappa = 1.0;     // extension forgetting rate, > 0
    double rho_gain = 0.0;  // feedback gain, >= 0; 0 makes Prop2 coincide with Prop1
    MixingMode mode = MixingMode::Adjugate;

    void validate() const;
};

/// The flat vector of observer integrators.
struct ObserverState {
    Eigen::VectorXd z_hat;      // n_x
    Eigen::VectorXd theta_hat;  // p
    Eigen::MatrixXd Y;          // n_x x p auxiliary filter
    Eigen::VectorXd y_script;   // p   extended regressor vector
    Eigen::MatrixXd phi;        // p x p extended regressor matrix, symmetric PSD

    static ObserverState zero(const Dimensions& dims);
};

/// T(u,Y) = P^{-1} C(u)^T Xi(u,Y).
Eigen::MatrixXd t_matrix(const SystemModel& model, const CertificateP& certificate,
                         const Eigen::VectorXd& u, const Eigen::MatrixXd& Y);

/// Time derivative of every observer integrator at the given measurements.
///
/// The phi derivative -kappa*phi + Xi^T*Xi is symmetric whenever phi is, so
/// symmetric integrators preserve the phi invariant exactly. The rho-feedback
/// terms are skipped entirely (not multiplied by zero) when the variant is
/// Prop1 or rho_gain == 0, making the two variants coincide bit-for-bit at
/// rho = 0.
ObserverState observer_rhs(ObserverVariant variant, const SystemModel& model,
                           const CertificateP& certificate, const ObserverGains& gains,
                           const ObserverState& state, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& y);

/// State estimate x_hat = z_hat + Y * theta_hat.
Eigen::VectorXd reconstruct_x(const ObserverState& state);

const char* to_string(ObserverVariant variant);
ObserverVariant parse_observer_variant(const std::string& s);

}  // namespace dro
