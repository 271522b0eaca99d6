#include "dro/model.hpp"

#include <Eigen/Eigenvalues>
#include <numbers>
#include <sstream>

#include "dro/mixing.hpp"

namespace dro {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

void Dimensions::validate() const {
    require(n_x >= 1, "Dimensions: n_x must be >= 1");
    require(n_u >= 1, "Dimensions: n_u must be >= 1");
    require(n_y >= 1, "Dimensions: n_y must be >= 1");
    require(p >= 1, "Dimensions: p must be >= 1");
    require(p <= kMaxParamDim,
            "Dimensions: p must be <= " + std::to_string(kMaxParamDim) +
                " (adjugate is computed by cofactor expansion)");
}

CertificateP CertificateP::from(const Eigen::MatrixXd& P) {
    require(P.rows() == P.cols(), "CertificateP: P must be square");
    const double scale = std::max(P.cwiseAbs().maxCoeff(), 1.0);
    require((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "CertificateP: P must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
    require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
            "CertificateP: P must be positive definite");
    CertificateP cert;
    cert.P = P;
    cert.P_inv = P.llt().solve(Eigen::MatrixXd::Identity(P.rows(), P.cols()));
    require((cert.P * cert.P_inv - Eigen::MatrixXd::Identity(P.rows(), P.cols()))
                    .cwiseAbs()
                    .maxCoeff() <= 1e-12,
            "CertificateP: P * P_inv deviates from identity beyond 1e-12");
    return cert;
}

Eigen::VectorXd output(const SystemModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta, const Eigen::VectorXd& u) {
    const auto& d = model.dims;
    require(x.size() == d.n_x, "output: x has wrong dimension");
    require(theta.size() == d.p, "output: theta has wrong dimension");
    require(u.size() == d.n_u, "output: u has wrong dimension");
    const Eigen::MatrixXd C = model.C_map(u);
    const Eigen::MatrixXd Psi = model.Psi_map(u);
    require(C.rows() == d.n_y && C.cols() == d.n_x, "output: C(u) has wrong shape");
    require(Psi.rows() == d.n_y && Psi.cols() == d.p, "output: Psi(u) has wrong shape");
    return C * x + Psi * theta;
}

Eigen::VectorXd plant_rhs(const SystemModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, const Eigen::VectorXd& u) {
    const Eigen::VectorXd y = output(model, x, theta, u);
    return model.A_map(u, y) * x + model.Omega_map(u, y) * theta + model.L_map(u, y);
}

Eigen::MatrixXd lambda_map(const SystemModel& model, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& y) {
    return model.A_map(u, y) - model.Gamma_map(u, y) * model.C_map(u);
}

Eigen::MatrixXd xi_map(const SystemModel& model, const Eigen::VectorXd& u,
                       const Eigen::MatrixXd& Y) {
    return model.C_map(u) * Y + model.Psi_map(u);
}

double psi_spectral_norm(const SystemModel& model, const Eigen::VectorXd& u) {
    const Eigen::MatrixXd Psi = model.Psi_map(u);
    if (Psi.size() == 0) return 0.0;
    return Psi.jacobiSvd().singularValues()(0);
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& q) {
    const Eigen::Index n = lambda.rows();
    require(lambda.cols() == n && q.rows() == n && q.cols() == n,
            "lyapunov_solve: shape mismatch");
    // vec(P*L) = (L^T (x) I) vec(P), vec(L^T*P) = (I (x) L^T) vec(P).
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    const Eigen::MatrixXd Lt = lambda.transpose();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                K(i + n * j, i + n * k) += Lt(j, k);  // L^T (x) I
                K(i + n * j, k + n * j) += Lt(i, k);  // I (x) L^T
            }
    Eigen::VectorXd qv(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) qv(i + n * j) = q(i, j);
    const Eigen::VectorXd pv = K.fullPivLu().solve(qv);
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) P(i, j) = pv(i + n * j);
    return 0.5 * (P + P.transpose());
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd mat1(double v) { return MatrixXd::Constant(1, 1, v); }

// S1 scalar benchmark: x_dot = -x + u*theta, y = x.
Scenario make_s1() {
    Scenario s;
    s.name = "S1";
    SystemModel m;
    m.dims = Dimensions{1, 1, 1, 1};
    m.A_map = [](const VectorXd&, const VectorXd&) { return mat1(-1.0); };
    m.Omega_map = [](const VectorXd& u, const VectorXd&) { return mat1(u(0)); };
    m.L_map = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(1); };
    m.C_map = [](const VectorXd&) { return mat1(1.0); };
    m.Psi_map = [](const VectorXd&) { return mat1(0.0); };
    m.Gamma_map = [](const VectorXd&, const VectorXd&) { return mat1(0.0); };
    m.psi_sup = 0.0;
    s.model = m;
    s.theta_true = VectorXd::Constant(1, 2.0);
    s.x0 = VectorXd::Constant(1, 1.0);
    s.input.channels = {Signal::sine(1.0, 1.0)};
    s.certificate = CertificateP::from(mat1(1.0));
    s.t_final = 50.0;
    return s;
}

// S2 second-order chain with output injection Gamma = [2;1]; the
// certificate solves P*Lambda + Lambda^T*P = -C^T*C - 0.1*I.
Scenario make_s2() {
    Scenario s;
    s.name = "S2";
    SystemModel m;
    m.dims = Dimensions{2, 1, 1, 1};
    m.A_map = [](const VectorXd&, const VectorXd&) {
        MatrixXd a(2, 2);
        a << 0, 1, 0, 0;
        return a;
    };
    m.Omega_map = [](const VectorXd& u, const VectorXd&) {
        MatrixXd w(2, 1);
        w << 0, u(0);
        return w;
    };
    m.L_map = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(2); };
    m.C_map = [](const VectorXd&) {
        MatrixXd c(1, 2);
        c << 1, 0;
        return c;
    };
    m.Psi_map = [](const VectorXd&) { return MatrixXd::Zero(1, 1); };
    m.Gamma_map = [](const VectorXd&, const VectorXd&) {
        MatrixXd g(2, 1);
        g << 2, 1;
        return g;
    };
    m.psi_sup = 0.0;
    s.model = m;

    MatrixXd lambda(2, 2);
    lambda << -2, 1, -1, 0;
    MatrixXd c(1, 2);
    c << 1, 0;
    const MatrixXd q = -(c.transpose() * c) - 0.1 * MatrixXd::Identity(2, 2);
    s.certificate = CertificateP::from(lyapunov_solve(lambda, q));

    s.theta_true = VectorXd::Constant(1, 1.5);
    s.x0 = (VectorXd(2) << 1.0, 0.0).finished();
    s.input.channels = {Signal::sine(1.0, 1.0)};
    s.t_final = 50.0;
    return s;
}

// S3 feedthrough: S1 with Psi = 0.5, exercising the kappa gain bound.
Scenario make_s3() {
    Scenario s = make_s1();
    s.name = "S3";
    s.model.Psi_map = [](const VectorXd&) { return mat1(0.5); };
    s.model.psi_sup = 0.5;
    return s;
}

// S4 two-parameter scalar plant driven by (sin t, cos 2t); nontrivial adjugate.
Scenario make_s4() {
    Scenario s;
    s.name = "S4";
    SystemModel m;
    m.dims = Dimensions{1, 2, 1, 2};
    m.A_map = [](const VectorXd&, const VectorXd&) { return mat1(-1.0); };
    m.Omega_map = [](const VectorXd& u, const VectorXd&) {
        MatrixXd w(1, 2);
        w << u(0), u(1);
        return w;
    };
    m.L_map = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(1); };
    m.C_map = [](const VectorXd&) { return mat1(1.0); };
    m.Psi_map = [](const VectorXd&) { return MatrixXd::Zero(1, 2); };
    m.Gamma_map = [](const VectorXd&, const VectorXd&) { return mat1(0.0); };
    m.psi_sup = 0.0;
    s.model = m;
    s.theta_true = (VectorXd(2) << 2.0, -1.0).finished();
    s.x0 = VectorXd::Constant(1, 1.0);
    s.input.channels = {Signal::sine(1.0, 1.0),
                        Signal::sine(1.0, 2.0, std::numbers::pi / 2.0)};  // cos 2t
    s.certificate = CertificateP::from(mat1(1.0));
    s.t_final = 50.0;
    return s;
}

// W1 weak excitation: S1 with the input switched off at t = 20.
Scenario make_w1() {
    Scenario s = make_s1();
    s.name = "W1";
    s.input.channels = {Signal::sine(1.0, 1.0).until(20.0)};
    return s;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = {"S1", "S2", "S3", "S4", "W1"};
    return names;
}

Scenario builtin_scenario(const std::string& name) {
    if (name == "S1") return make_s1();
    if (name == "S2") return make_s2();
    if (name == "S3") return make_s3();
    if (name == "S4") return make_s4();
    if (name == "W1") return make_w1();
    std::ostringstream os;
    os << "unknown scenario '" << name << "'; valid names:";
    for (const auto& n : builtin_scenario_names()) os << " " << n;
    throw ConfigError(os.str());
}

std::string builtin_scenario_summary(const std::string& name) {
    if (name == "S1") return "scalar plant x' = -x + u*theta, y = x, u = sin t";
    if (name == "S2") return "second-order chain with output injection, Lyapunov-solved certificate";
    if (name == "S3") return "S1 with output feedthrough Psi = 0.5";
    if (name == "S4") return "scalar plant with two parameters, u = (sin t, cos 2t)";
    if (name == "W1") return "S1 with excitation switched off at t = 20";
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace dro
