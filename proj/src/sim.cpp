#include "dro/sim.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>

#include "dro/mixing.hpp"

namespace dro {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Flat layout of the augmented state:
// [ x | z_hat | theta_hat | vec(Y) | y_script | vec(phi) | eps ].
struct Layout {
    int n_x, p;
    int off_x, off_zhat, off_theta, off_Y, off_yscript, off_phi, off_eps, total;

    explicit Layout(const Dimensions& d) : n_x(d.n_x), p(d.p) {
        off_x = 0;
        off_zhat = off_x + n_x;
        off_theta = off_zhat + n_x;
        off_Y = off_theta + p;
        off_yscript = off_Y + n_x * p;
        off_phi = off_yscript + p;
        off_eps = off_phi + p * p;
        total = off_eps + p;
    }

    VectorXd pack(const VectorXd& x, const ObserverState& o, const VectorXd& eps) const {
        VectorXd s(total);
        s.segment(off_x, n_x) = x;
        s.segment(off_zhat, n_x) = o.z_hat;
        s.segment(off_theta, p) = o.theta_hat;
        s.segment(off_Y, n_x * p) = Eigen::Map<const VectorXd>(o.Y.data(), n_x * p);
        s.segment(off_yscript, p) = o.y_script;
        s.segment(off_phi, p * p) = Eigen::Map<const VectorXd>(o.phi.data(), p * p);
        s.segment(off_eps, p) = eps;
        return s;
    }

    VectorXd x_of(const VectorXd& s) const { return s.segment(off_x, n_x); }
    VectorXd eps_of(const VectorXd& s) const { return s.segment(off_eps, p); }

    ObserverState observer_of(const VectorXd& s) const {
        ObserverState o;
        o.z_hat = s.segment(off_zhat, n_x);
        o.theta_hat = s.segment(off_theta, p);
        o.Y = Eigen::Map<const MatrixXd>(s.data() + off_Y, n_x, p);
        o.y_script = s.segment(off_yscript, p);
        o.phi = Eigen::Map<const MatrixXd>(s.data() + off_phi, p, p);
        return o;
    }

    std::string field_name(int idx) const {
        if (idx < off_zhat) return "x";
        if (idx < off_theta) return "z_hat";
        if (idx < off_Y) return "theta_hat";
        if (idx < off_yscript) return "Y";
        if (idx < off_phi) return "y_script";
        if (idx < off_eps) return "phi";
        return "eps";
    }
};

constexpr double kDivergenceGuard = 1e9;

void validate_override_shape(const InitialOverrides& init, const Dimensions& d) {
    const auto bad = [](const std::string& f) {
        throw ConfigError("initial override '" + f + "' has wrong shape");
    };
    if (init.z_hat && init.z_hat->size() != d.n_x) bad("z_hat");
    if (init.theta_hat && init.theta_hat->size() != d.p) bad("theta_hat");
    if (init.Y && (init.Y->rows() != d.n_x || init.Y->cols() != d.p)) bad("Y");
    if (init.y_script && init.y_script->size() != d.p) bad("y_script");
    if (init.phi) {
        if (init.phi->rows() != d.p || init.phi->cols() != d.p) bad("phi");
        const double scale = std::max(init.phi->cwiseAbs().maxCoeff(), 1.0);
        if ((*init.phi - init.phi->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw ConfigError("initial override 'phi' must be symmetric");
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(*init.phi);
        if (es.eigenvalues().minCoeff() < -1e-12 * scale)
            throw ConfigError("initial override 'phi' must be positive semidefinite");
    }
}

ObserverState initial_observer_state(const SimConfig& cfg) {
    ObserverState o = ObserverState::zero(cfg.scenario.model.dims);
    const auto& init = cfg.init;
    if (init.z_hat) o.z_hat = *init.z_hat;
    if (init.theta_hat) o.theta_hat = *init.theta_hat;
    if (init.Y) o.Y = *init.Y;
    if (init.y_script) o.y_script = *init.y_script;
    if (init.phi) o.phi = *init.phi;
    return o;
}

}  // namespace

void SimConfig::validate() const {
    scenario.model.dims.validate();
    gains.validate();
    if (!(dt > 0)) throw ConfigError("SimConfig: dt must be > 0");
    if (dt > 1e-2 * (1.0 + 1e-12)) throw ConfigError("SimConfig: dt must be <= 1e-2");
    if (record_every < 1) throw ConfigError("SimConfig: record_every must be >= 1");
    if (!(scenario.t_final > 0)) throw ConfigError("SimConfig: t_final must be > 0");
    const double steps = scenario.t_final / dt;
    if (!(steps < 1e9)) throw ConfigError("SimConfig: t_final/dt exceeds the step counter");
    if (scenario.input.dim() != scenario.model.dims.n_u)
        throw ConfigError("SimConfig: input signal dimension does not match n_u");
    if (scenario.theta_true.size() != scenario.model.dims.p)
        throw ConfigError("SimConfig: theta_true dimension does not match p");
    if (scenario.x0.size() != scenario.model.dims.n_x)
        throw ConfigError("SimConfig: x0 dimension does not match n_x");
    if (scenario.certificate.P.rows() != scenario.model.dims.n_x)
        throw ConfigError("SimConfig: certificate P dimension does not match n_x");
    validate_override_shape(init, scenario.model.dims);
}

Trace run(const SimConfig& config) {
    config.validate();
    const Scenario& sc = config.scenario;
    const SystemModel& model = sc.model;
    const Dimensions& dims = model.dims;
    const Layout layout(dims);

    // Effective feedback gain: the rho terms exist only in Prop2.
    const double rho_eff = config.variant == ObserverVariant::Prop2 ? config.gains.rho_gain : 0.0;

    const auto deriv = [&](double t, const VectorXd& s) -> VectorXd {
        const VectorXd x = layout.x_of(s);
        const ObserverState obs = layout.observer_of(s);
        const VectorXd eps = layout.eps_of(s);

        const VectorXd u = sc.input(t);
        const VectorXd y = output(model, x, sc.theta_true, u);

        const VectorXd x_dot = plant_rhs(model, x, sc.theta_true, u);
        const ObserverState obs_dot =
            observer_rhs(config.variant, model, sc.certificate, config.gains, obs, u, y);

        const VectorXd z_bar = (x - obs.Y * sc.theta_true) - obs.z_hat;
        const MatrixXd xi = xi_map(model, u, obs.Y);
        const VectorXd eps_dot =
            -config.gains.kappa * eps + xi.transpose() * (model.C_map(u) * z_bar);

        return layout.pack(x_dot, obs_dot, eps_dot);
    };

    Trace trace;
    trace.dims = dims;
    trace.dt = config.dt;
    trace.record_every = config.record_every;

    const ObserverState obs0 = initial_observer_state(config);
    // The oracle starts at y_script(0) - phi(0)*theta so that the swapping
    // identity y_script - eps = phi*theta holds from t = 0.
    const VectorXd eps0 = obs0.y_script - obs0.phi * sc.theta_true;
    VectorXd s = layout.pack(sc.x0, obs0, eps0);

    const auto record = [&](double t, const VectorXd& state) {
        const VectorXd x = layout.x_of(state);
        const ObserverState obs = layout.observer_of(state);
        const VectorXd eps = layout.eps_of(state);

        const VectorXd z = x - obs.Y * sc.theta_true;
        const VectorXd z_bar = z - obs.z_hat;
        const VectorXd theta_tilde = sc.theta_true - obs.theta_hat;

        trace.t.push_back(t);
        trace.x.push_back(x);
        trace.x_hat.push_back(reconstruct_x(obs));
        trace.z.push_back(z);
        trace.z_hat.push_back(obs.z_hat);
        trace.z_bar.push_back(z_bar);
        trace.theta_hat.push_back(obs.theta_hat);
        trace.theta_tilde.push_back(theta_tilde);
        trace.eps.push_back(eps);
        trace.delta.push_back(delta(obs.phi));
        trace.det_phi.push_back(determinant(obs.phi));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(obs.phi);
        trace.min_eig_phi.push_back(es.eigenvalues().minCoeff());
        trace.swap_residual.push_back((obs.y_script - eps - obs.phi * sc.theta_true).norm());
        trace.v0.push_back(0.5 * z_bar.dot(sc.certificate.P * z_bar) +
                           0.5 * rho_eff * eps.squaredNorm());

        const double phi_scale = std::max(obs.phi.cwiseAbs().maxCoeff(), 1e-300);
        const double asym = (obs.phi - obs.phi.transpose()).cwiseAbs().maxCoeff() / phi_scale;
        trace.max_phi_asymmetry = std::max(trace.max_phi_asymmetry, asym);
    };

    const std::int64_t steps = std::llround(sc.t_final / config.dt);
    record(0.0, s);

    for (std::int64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;

        const double psi_norm = psi_spectral_norm(model, sc.input(t));
        if (psi_norm > model.psi_sup * (1.0 + 1e-12) + 1e-15) {
            trace.fault = Fault{Fault::Kind::PsiSupViolation, t, -1,
                                "|Psi(u(t))| = " + std::to_string(psi_norm) +
                                    " exceeds declared psi_sup = " +
                                    std::to_string(model.psi_sup)};
            break;
        }

        try {
            s = rk4_step(deriv, s, t, config.dt);
        } catch (const IntegrationFault& f) {
            trace.fault = Fault{Fault::Kind::NonFinite, f.t, f.stage, f.what()};
            break;
        }

        Eigen::Index worst;
        if (s.cwiseAbs().maxCoeff(&worst) > kDivergenceGuard) {
            trace.fault =
                Fault{Fault::Kind::Divergence, static_cast<double>(k + 1) * config.dt, -1,
                      "state field '" + layout.field_name(static_cast<int>(worst)) +
                          "' exceeded 1e9"};
            break;
        }

        if ((k + 1) % config.record_every == 0)
            record(static_cast<double>(k + 1) * config.dt, s);
    }

    return trace;
}

std::vector<RhoSweepEntry> compare_rho_sweep(const SimConfig& config,
                                             const std::vector<double>& rho_values) {
    if (config.variant != ObserverVariant::Prop2)
        throw ConfigError("compare_rho_sweep: variant must be prop2");
    if (rho_values.empty()) throw ConfigError("compare_rho_sweep: rho list is empty");

    std::vector<RhoSweepEntry> entries;
    entries.reserve(rho_values.size());
    for (const double rho : rho_values) {
        if (!(rho >= 0)) throw ConfigError("compare_rho_sweep: rho must be >= 0");
        SimConfig cfg = config;
        cfg.gains.rho_gain = rho;
        const Trace trace = run(cfg);

        RhoSweepEntry e;
        e.rho = rho;
        for (size_t i = 0; i < trace.rows(); ++i) {
            e.sup_eps = std::max(e.sup_eps, trace.eps[i].norm());
            e.sup_theta_err = std::max(e.sup_theta_err, trace.theta_tilde[i].norm());
        }
        e.final_theta_err = trace.rows() ? trace.theta_tilde.back().norm() : 0.0;
        entries.push_back(e);
    }
    return entries;
}

PlantSamples sample_plant(const Scenario& scenario, double dt, int record_every) {
    const SystemModel& model = scenario.model;
    const auto deriv = [&](double t, const VectorXd& x) {
        return plant_rhs(model, x, scenario.theta_true, scenario.input(t));
    };

    PlantSamples out;
    VectorXd x = scenario.x0;
    const std::int64_t steps = std::llround(scenario.t_final / dt);
    const auto record = [&](double t, const VectorXd& xs) {
        const VectorXd u = scenario.input(t);
        out.t.push_back(t);
        out.u.push_back(u);
        out.y.push_back(output(model, xs, scenario.theta_true, u));
    };
    record(0.0, x);
    for (std::int64_t k = 0; k < steps; ++k) {
        x = rk4_step(deriv, x, static_cast<double>(k) * dt, dt);
        if ((k + 1) % record_every == 0) record(static_cast<double>(k + 1) * dt, x);
    }
    return out;
}

}  // namespace dro
