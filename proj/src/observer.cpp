#include "dro/observer.hpp"

namespace dro {

void ObserverGains::validate() const {
    if (!(lambda > 0)) throw ConfigError("ObserverGains: lambda must be > 0");
    if (!(kappa > 0)) throw ConfigError("ObserverGains: kappa must be > 0");
    if (!(rho_gain >= 0)) throw ConfigError("ObserverGains: rho_gain must be >= 0");
}

ObserverState ObserverState::zero(const Dimensions& dims) {
    ObserverState s;
    s.z_hat = Eigen::VectorXd::Zero(dims.n_x);
    s.theta_hat = Eigen::VectorXd::Zero(dims.p);
    s.Y = Eigen::MatrixXd::Zero(dims.n_x, dims.p);
    s.y_script = Eigen::VectorXd::Zero(dims.p);
    s.phi = Eigen::MatrixXd::Zero(dims.p, dims.p);
    return s;
}

Eigen::MatrixXd t_matrix(const SystemModel& model, const CertificateP& certificate,
                         const Eigen::VectorXd& u, const Eigen::MatrixXd& Y) {
    return certificate.P_inv * model.C_map(u).transpose() * xi_map(model, u, Y);
}

ObserverState observer_rhs(ObserverVariant variant, const SystemModel& model,
                           const CertificateP& certificate, const ObserverGains& gains,
                           const ObserverState& state, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& y) {
    const Eigen::MatrixXd lambda = lambda_map(model, u, y);
    const Eigen::MatrixXd gamma = model.Gamma_map(u, y);
    const Eigen::MatrixXd omega = model.Omega_map(u, y);
    const Eigen::MatrixXd psi = model.Psi_map(u);
    const Eigen::MatrixXd c = model.C_map(u);
    const Eigen::MatrixXd xi = c * state.Y + psi;

    ObserverState dot;
    dot.z_hat = lambda * state.z_hat + gamma * y + model.L_map(u, y);
    dot.Y = lambda * state.Y + omega - gamma * psi;
    dot.theta_hat = theta_dot(state.phi, state.y_script, state.theta_hat, gains.lambda, gains.mode);
    dot.y_script = -gains.kappa * state.y_script + xi.transpose() * (y - c * state.z_hat);
    dot.phi = -gains.kappa * state.phi + xi.transpose() * xi;

    const bool with_feedback = variant == ObserverVariant::Prop2 && gains.rho_gain != 0.0;
    if (with_feedback) {
        const Eigen::MatrixXd t_mat = certificate.P_inv * c.transpose() * xi;
        dot.z_hat += gains.rho_gain * (t_mat * state.y_script);
        dot.Y -= gains.rho_gain * (t_mat * state.phi);
    }
    return dot;
}

Eigen::VectorXd reconstruct_x(const ObserverState& state) {
    return state.z_hat + state.Y * state.theta_hat;
}

const char* to_string(ObserverVariant variant) {
    return variant == ObserverVariant::Prop1 ? "prop1" : "prop2";
}

ObserverVariant parse_observer_variant(const std::string& s) {
    if (s == "prop1") return ObserverVariant::Prop1;
    if (s == "prop2") return ObserverVariant::Prop2;
    throw ConfigError("unknown observer variant '" + s + "' (expected prop1 or prop2)");
}

}  // namespace dro
