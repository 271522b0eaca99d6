#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dro/sim.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace dro;

namespace {

SimConfig standard_config(const char* name, ObserverVariant v = ObserverVariant::Prop1,
                          double rho = 0.0) {
    SimConfig cfg;
    cfg.scenario = builtin_scenario(name);
    cfg.variant = v;
    cfg.gains.lambda = 1.0;
    cfg.gains.kappa = 1.0;
    cfg.gains.rho_gain = rho;
    cfg.dt = 1e-3;
    cfg.record_every = 10;
    return cfg;
}

// Scalar unstable plant with a formally valid certificate shape; used to
// exercise the divergence guard (run() does not re-check the certificate).
Scenario unstable_scenario() {
    Scenario s = builtin_scenario("S1");
    s.name = "unstable";
    s.model.A_map = [](const VectorXd&, const VectorXd&) {
        return MatrixXd::Constant(1, 1, 1.0);
    };
    return s;
}

}  // namespace

TEST_CASE("rk4_step leaves the state unchanged for f = 0") {
    const auto f = [](double, const VectorXd& s) { return VectorXd::Zero(s.size()).eval(); };
    const VectorXd s0 = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
    const VectorXd s1 = rk4_step(f, s0, 0.0, 0.1);
    CHECK(s1 == s0);
}

TEST_CASE("rk4_step reproduces the exponential to fifth order") {
    const auto f = [](double, const VectorXd& s) { return (-s).eval(); };
    const VectorXd s1 = rk4_step(f, VectorXd::Constant(1, 1.0), 0.0, 0.1);
    CHECK(s1(0) == doctest::Approx(0.9048375).epsilon(1e-7));
    CHECK(std::abs(s1(0) - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("rk4 global error drops ~16x when dt halves on the frozen-theta S1 plant") {
    // x' = -x + 2 sin t, x(0) = 1; exact x(t) = 2 e^{-t} + sin t - cos t
    const auto f = [](double t, const VectorXd& s) {
        return VectorXd::Constant(1, -s(0) + 2.0 * std::sin(t)).eval();
    };
    const auto endpoint_err = [&](double dt) {
        VectorXd x = VectorXd::Constant(1, 1.0);
        const long n = std::lround(10.0 / dt);
        for (long k = 0; k < n; ++k) x = rk4_step(f, x, static_cast<double>(k) * dt, dt);
        const double exact = 2.0 * std::exp(-10.0) + std::sin(10.0) - std::cos(10.0);
        return std::abs(x(0) - exact);
    };
    const double ratio = endpoint_err(0.1) / endpoint_err(0.05);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("rk4_step reports the failing stage for non-finite derivatives") {
    const auto f = [](double t, const VectorXd& s) {
        // becomes NaN only on the mid-step stages
        return VectorXd::Constant(1, t > 0.0 ? std::nan("") : s(0)).eval();
    };
    try {
        rk4_step(f, VectorXd::Constant(1, 1.0), 0.0, 0.1);
        FAIL("expected IntegrationFault");
    } catch (const IntegrationFault& e) {
        CHECK(e.stage == 2);
        CHECK(e.t == 0.0);
    }
}

TEST_CASE("S1 reference run converges and matches the frozen regression value") {
    const Trace tr = run(standard_config("S1"));
    REQUIRE(!tr.fault);
    REQUIRE(tr.rows() == 5001);
    CHECK(tr.t.back() == doctest::Approx(50.0));
    CHECK(tr.theta_tilde.back().norm() < 1e-2);
    CHECK(tr.z_bar.back().norm() < 1e-6);
    CHECK((tr.x_hat.back() - tr.x.back()).norm() < 1e-3);
    // frozen from the first verified reference run (lambda = kappa = 1, dt = 1e-3)
    CHECK(tr.theta_hat.back()(0) == doctest::Approx(1.9999921325129391).epsilon(1e-9));

    for (size_t i = 1; i < tr.rows(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
    for (size_t i = 0; i < tr.rows(); ++i) {
        CHECK(tr.x[i].allFinite());
        CHECK(tr.theta_hat[i].allFinite());
        CHECK(std::isfinite(tr.v0[i]));
        CHECK(std::isfinite(tr.min_eig_phi[i]));
    }
}

TEST_CASE("the alternative mixing modes run the catalog plant to convergence") {
    SimConfig cfg = standard_config("S1");
    cfg.gains.mode = MixingMode::DeltaAdjugate;
    const Trace damped = run(cfg);
    REQUIRE(!damped.fault);
    CHECK(damped.theta_tilde.back().norm() < 1e-2);

    // at p = 1 the adjugate is [1], so identity mode coincides with it
    cfg.gains.mode = MixingMode::Identity;
    const Trace ident = run(cfg);
    cfg.gains.mode = MixingMode::Adjugate;
    const Trace adj = run(cfg);
    REQUIRE(!ident.fault);
    CHECK(ident.theta_hat.back() == adj.theta_hat.back());
}

TEST_CASE("exact initialization is an equilibrium of the error dynamics") {
    for (const auto variant : {ObserverVariant::Prop1, ObserverVariant::Prop2}) {
        SimConfig cfg =
            standard_config("S1", variant, variant == ObserverVariant::Prop2 ? 1.0 : 0.0);
        cfg.init.theta_hat = cfg.scenario.theta_true;
        cfg.init.z_hat = cfg.scenario.x0;  // Y(0) = 0, so z(0) = x0
        const Trace tr = run(cfg);
        REQUIRE(!tr.fault);
        for (size_t i = 0; i < tr.rows(); ++i) {
            CHECK(tr.theta_tilde[i].norm() <= 1e-9);
            CHECK(tr.z_bar[i].norm() <= 1e-9);
        }
    }
}

TEST_CASE("swap residual stays at roundoff with nonzero filter initial conditions") {
    SimConfig cfg = standard_config("S1");
    cfg.init.y_script = VectorXd::Constant(1, 0.3);
    cfg.init.phi = MatrixXd::Constant(1, 1, 0.2);
    const Trace tr = run(cfg);
    REQUIRE(!tr.fault);
    for (size_t i = 0; i < tr.rows(); ++i) CHECK(tr.swap_residual[i] <= 1e-10);
}

TEST_CASE("W1 adjugate run stalls once the excitation dies") {
    SimConfig cfg = standard_config("W1");
    cfg.gains.kappa = 8.0;
    const Trace tr = run(cfg);
    REQUIRE(!tr.fault);

    // the stall region {delta < 1e-8} away from t = 0 must be non-empty
    size_t stall_rows = 0;
    for (size_t i = 0; i < tr.rows(); ++i)
        if (tr.t[i] > 1.0 && tr.delta[i] < 1e-8) ++stall_rows;
    CHECK(stall_rows > 100);

    // theta_hat drift over every maximal interval with delta < 1e-8
    size_t i = 0;
    while (i < tr.rows()) {
        if (tr.delta[i] >= 1e-8) {
            ++i;
            continue;
        }
        size_t j = i;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        while (j < tr.rows() && tr.delta[j] < 1e-8) {
            lo = std::min(lo, tr.theta_hat[j](0));
            hi = std::max(hi, tr.theta_hat[j](0));
            ++j;
        }
        CHECK(hi - lo <= 1e-6);
        i = j;
    }

    // with this forgetting rate the update is also quiet across [25, 50]
    double th25 = 0.0;
    for (size_t k = 0; k < tr.rows(); ++k)
        if (std::abs(tr.t[k] - 25.0) < 1e-9) th25 = tr.theta_hat[k](0);
    CHECK(std::abs(tr.theta_hat.back()(0) - th25) <= 1e-6);
}

TEST_CASE("identical configs give bit-identical traces") {
    const SimConfig cfg = standard_config("S2", ObserverVariant::Prop2, 1.0);
    const Trace a = run(cfg);
    const Trace b = run(cfg);
    REQUIRE(a.rows() == b.rows());
    for (size_t i = 0; i < a.rows(); ++i) {
        CHECK(a.t[i] == b.t[i]);
        CHECK(a.x[i] == b.x[i]);
        CHECK(a.x_hat[i] == b.x_hat[i]);
        CHECK(a.z_bar[i] == b.z_bar[i]);
        CHECK(a.theta_hat[i] == b.theta_hat[i]);
        CHECK(a.eps[i] == b.eps[i]);
        CHECK(a.delta[i] == b.delta[i]);
        CHECK(a.det_phi[i] == b.det_phi[i]);
        CHECK(a.v0[i] == b.v0[i]);
    }
}

TEST_CASE("halving dt moves the end-point estimate by less than 1e-6") {
    for (const char* name : {"S1", "S2"}) {
        CAPTURE(name);
        SimConfig cfg = standard_config(name);
        const Trace coarse = run(cfg);
        cfg.dt = 5e-4;
        cfg.record_every = 20;
        const Trace fine = run(cfg);
        CHECK((coarse.theta_hat.back() - fine.theta_hat.back()).norm() < 1e-6);
    }
}

TEST_CASE("stored theta_tilde follows -lambda*delta^2*theta_tilde - lambda*adj(phi)*eps") {
    // scalar scenario: adj(phi) = 1 and delta^2 = det phi, both trace columns
    const auto worst_fd_error = [](int record_every) {
        SimConfig cfg = standard_config("S1");
        cfg.record_every = record_every;
        const Trace tr = run(cfg);
        const double h = tr.sample_dt();
        double worst = 0.0;
        for (size_t k = 1; k + 1 < tr.rows(); ++k) {
            const double fd = (tr.theta_tilde[k + 1](0) - tr.theta_tilde[k - 1](0)) / (2.0 * h);
            const double rhs = -tr.det_phi[k] * tr.theta_tilde[k](0) - tr.eps[k](0);
            worst = std::max(worst, std::abs(fd - rhs));
        }
        return worst;
    };
    const double err_h = worst_fd_error(10);   // h = 0.01
    const double err_4h = worst_fd_error(40);  // h = 0.04
    CHECK(err_h <= 1e-4);
    CHECK(err_4h / err_h > 8.0);  // second-order central difference: ~16x
}

TEST_CASE("divergence guard trips on an unstable plant") {
    SimConfig cfg;
    cfg.scenario = unstable_scenario();
    cfg.variant = ObserverVariant::Prop1;
    cfg.dt = 1e-2;
    cfg.record_every = 10;
    const Trace tr = run(cfg);
    REQUIRE(tr.fault.has_value());
    CHECK(tr.fault->kind == Fault::Kind::Divergence);
    CHECK(tr.fault->t > 0.0);
    CHECK(tr.fault->t < 50.0);
    CHECK(tr.fault->detail.find("x") != std::string::npos);
}

TEST_CASE("non-finite mapping values become a recorded integration fault") {
    SimConfig cfg = standard_config("S1");
    cfg.scenario.model.L_map = [](const VectorXd&, const VectorXd&) {
        return VectorXd::Constant(1, std::nan(""));
    };
    const Trace tr = run(cfg);
    REQUIRE(tr.fault.has_value());
    CHECK(tr.fault->kind == Fault::Kind::NonFinite);
    CHECK(tr.fault->t == 0.0);
    CHECK(tr.fault->stage == 1);
}

TEST_CASE("psi_sup violations abort the run with a diagnostic") {
    SimConfig cfg = standard_config("S3");
    cfg.scenario.model.psi_sup = 0.1;  // lies about |Psi| = 0.5
    const Trace tr = run(cfg);
    REQUIRE(tr.fault.has_value());
    CHECK(tr.fault->kind == Fault::Kind::PsiSupViolation);
    CHECK(tr.fault->detail.find("psi_sup") != std::string::npos);
}

TEST_CASE("rho sweep validates its inputs and degenerates cleanly") {
    SimConfig cfg = standard_config("S1", ObserverVariant::Prop2, 0.0);
    CHECK_THROWS_AS(compare_rho_sweep(cfg, {}), ConfigError);
    CHECK_THROWS_AS(compare_rho_sweep(cfg, {-1.0}), ConfigError);

    SimConfig prop1 = standard_config("S1", ObserverVariant::Prop1, 0.0);
    CHECK_THROWS_AS(compare_rho_sweep(prop1, {0.0}), ConfigError);

    // single-element {0} matches a plain prop1 run bit-exactly
    const auto entries = compare_rho_sweep(cfg, {0.0});
    REQUIRE(entries.size() == 1);
    const Trace ref = run(prop1);
    double sup_eps = 0.0, sup_th = 0.0;
    for (size_t i = 0; i < ref.rows(); ++i) {
        sup_eps = std::max(sup_eps, ref.eps[i].norm());
        sup_th = std::max(sup_th, ref.theta_tilde[i].norm());
    }
    CHECK(entries[0].sup_eps == sup_eps);
    CHECK(entries[0].sup_theta_err == sup_th);
    CHECK(entries[0].final_theta_err == ref.theta_tilde.back().norm());
}

TEST_CASE("config validation rejects out-of-range settings") {
    SimConfig cfg = standard_config("S1");
    cfg.dt = 0.02;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.dt = -1e-3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.dt = 1e-3;
    cfg.record_every = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.record_every = 10;
    cfg.init.phi = MatrixXd::Constant(1, 1, -1.0);  // not PSD
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.init.phi.reset();
    cfg.init.z_hat = VectorXd::Zero(3);  // wrong shape
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
