#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "dro/model.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace dro;

namespace {
VectorXd vec1(double v) { return VectorXd::Constant(1, v); }
}  // namespace

TEST_CASE("output map") {
    const Scenario s1 = builtin_scenario("S1");
    CHECK(output(s1.model, vec1(0.0), vec1(0.0), vec1(0.3))(0) == 0.0);
    CHECK(output(s1.model, vec1(1.5), vec1(2.0), vec1(0.0))(0) == doctest::Approx(1.5));

    const Scenario s3 = builtin_scenario("S3");
    CHECK(output(s3.model, vec1(1.0), vec1(2.0), vec1(0.0))(0) == doctest::Approx(2.0));
}

TEST_CASE("output rejects dimension mismatches") {
    const Scenario s1 = builtin_scenario("S1");
    CHECK_THROWS_AS(output(s1.model, VectorXd::Zero(2), vec1(0.0), vec1(0.0)), ConfigError);
    CHECK_THROWS_AS(output(s1.model, vec1(0.0), VectorXd::Zero(2), vec1(0.0)), ConfigError);
    CHECK_THROWS_AS(output(s1.model, vec1(0.0), vec1(0.0), VectorXd::Zero(2)), ConfigError);
}

TEST_CASE("plant_rhs hand-evaluated at (x0, theta_true, u(0)) for each catalog entry") {
    struct Fixture {
        const char* name;
        std::vector<double> expected;
    };
    // u(0) = sin 0 = 0 everywhere; S4 additionally sees cos 0 = 1 on channel 2.
    const Fixture fixtures[] = {
        {"S1", {-1.0}},
        {"S2", {0.0, 0.0}},
        {"S3", {-1.0}},
        {"S4", {-2.0}},
        {"W1", {-1.0}},
    };
    for (const auto& f : fixtures) {
        CAPTURE(f.name);
        const Scenario s = builtin_scenario(f.name);
        const VectorXd rhs = plant_rhs(s.model, s.x0, s.theta_true, s.input(0.0));
        REQUIRE(rhs.size() == static_cast<Eigen::Index>(f.expected.size()));
        for (Eigen::Index i = 0; i < rhs.size(); ++i)
            CHECK(rhs(i) == doctest::Approx(f.expected[static_cast<size_t>(i)]));
    }
}

TEST_CASE("plant_rhs is zero at an equilibrium with no drift") {
    const Scenario s1 = builtin_scenario("S1");
    CHECK(plant_rhs(s1.model, vec1(0.0), vec1(0.0), vec1(0.7))(0) == 0.0);
}

TEST_CASE("lambda_map") {
    SUBCASE("Gamma = 0 reduces to A") {
        const Scenario s1 = builtin_scenario("S1");
        CHECK(lambda_map(s1.model, vec1(0.2), vec1(0.4))(0, 0) == doctest::Approx(-1.0));
    }

    SUBCASE("S2 value and eigenvalues") {
        const Scenario s2 = builtin_scenario("S2");
        const MatrixXd lam = lambda_map(s2.model, vec1(0.0), vec1(0.0));
        MatrixXd expected(2, 2);
        expected << -2, 1, -1, 0;
        CHECK((lam - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

        // characteristic polynomial x^2 + 2x + 1: double eigenvalue at -1
        const Eigen::EigenSolver<MatrixXd> es(lam);
        for (int i = 0; i < 2; ++i) {
            CHECK(es.eigenvalues()(i).real() == doctest::Approx(-1.0).epsilon(1e-8));
            CHECK(es.eigenvalues()(i).imag() == doctest::Approx(0.0).epsilon(1e-8));
        }
    }

    SUBCASE("definition check A - Gamma*C on random inputs") {
        std::mt19937 rng(21);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (const auto& name : builtin_scenario_names()) {
            const Scenario s = builtin_scenario(name);
            for (int trial = 0; trial < 20; ++trial) {
                VectorXd u(s.model.dims.n_u), y(s.model.dims.n_y);
                for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = dist(rng);
                for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = dist(rng);
                const MatrixXd direct =
                    s.model.A_map(u, y) - s.model.Gamma_map(u, y) * s.model.C_map(u);
                CHECK((lambda_map(s.model, u, y) - direct).cwiseAbs().maxCoeff() <= 1e-14);
            }
        }
    }
}

TEST_CASE("xi_map") {
    const Scenario s1 = builtin_scenario("S1");
    CHECK(xi_map(s1.model, vec1(0.0), MatrixXd::Zero(1, 1))(0, 0) == 0.0);
    CHECK(xi_map(s1.model, vec1(0.0), MatrixXd::Constant(1, 1, 0.3))(0, 0) ==
          doctest::Approx(0.3));

    const Scenario s3 = builtin_scenario("S3");
    CHECK(xi_map(s3.model, vec1(0.0), MatrixXd::Constant(1, 1, 0.3))(0, 0) ==
          doctest::Approx(0.8));
}

TEST_CASE("catalog: S1 fields") {
    const Scenario s = builtin_scenario("S1");
    CHECK(s.model.dims.n_x == 1);
    CHECK(s.model.dims.n_u == 1);
    CHECK(s.model.dims.n_y == 1);
    CHECK(s.model.dims.p == 1);
    CHECK(s.theta_true(0) == 2.0);
    CHECK(s.x0(0) == 1.0);
    CHECK(s.t_final == 50.0);
    CHECK(s.certificate.P(0, 0) == 1.0);
    CHECK(s.input(std::numbers::pi / 2.0)(0) == doctest::Approx(1.0));
}

TEST_CASE("catalog: S2 certificate solves the Lyapunov equation") {
    const Scenario s = builtin_scenario("S2");
    MatrixXd lambda(2, 2);
    lambda << -2, 1, -1, 0;
    MatrixXd c(1, 2);
    c << 1, 0;
    const MatrixXd q = -(c.transpose() * c) - 0.1 * MatrixXd::Identity(2, 2);
    const MatrixXd residual =
        s.certificate.P * lambda + lambda.transpose() * s.certificate.P - q;
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);

    // hand solve of the 3-unknown symmetric system
    CHECK(s.certificate.P(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.certificate.P(0, 1) == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(s.certificate.P(1, 1) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("catalog: S4 and W1 shapes") {
    const Scenario s4 = builtin_scenario("S4");
    CHECK(s4.model.dims.p == 2);
    CHECK(s4.model.dims.n_u == 2);
    CHECK(s4.theta_true(0) == 2.0);
    CHECK(s4.theta_true(1) == -1.0);
    CHECK(s4.input(0.0)(1) == doctest::Approx(1.0));  // cos 0

    const Scenario w1 = builtin_scenario("W1");
    CHECK(w1.input(10.0)(0) == doctest::Approx(std::sin(10.0)));
    CHECK(w1.input(20.0)(0) == 0.0);
    CHECK(w1.input(35.0)(0) == 0.0);
}

TEST_CASE("catalog: psi_sup bounds the feedthrough norm along the input range") {
    for (const auto& name : builtin_scenario_names()) {
        const Scenario s = builtin_scenario(name);
        for (double t = 0.0; t <= s.t_final; t += 0.5)
            CHECK(psi_spectral_norm(s.model, s.input(t)) <= s.model.psi_sup + 1e-15);
    }
}

TEST_CASE("unknown scenario lists the valid names") {
    try {
        builtin_scenario("bogus");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const auto& name : {"S1", "S2", "S3", "S4", "W1"})
            CHECK(msg.find(name) != std::string::npos);
    }
}

TEST_CASE("dimensions validation") {
    CHECK_THROWS_AS((Dimensions{0, 1, 1, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((Dimensions{1, 1, 1, 6}.validate()), ConfigError);
    CHECK_NOTHROW((Dimensions{3, 2, 2, 5}.validate()));
}

TEST_CASE("certificate validation") {
    MatrixXd asym(2, 2);
    asym << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(CertificateP::from(asym), ConfigError);

    MatrixXd indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(CertificateP::from(indef), ConfigError);

    MatrixXd spd(2, 2);
    spd << 2, 0.3, 0.3, 1;
    const CertificateP cert = CertificateP::from(spd);
    CHECK((cert.P * cert.P_inv - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("lyapunov_solve recovers a known solution") {
    // for L = -I, P*L + L'*P = -2P, so Q = -2*M has solution P = M
    MatrixXd m(2, 2);
    m << 3, 1, 1, 2;
    const MatrixXd p = lyapunov_solve(-MatrixXd::Identity(2, 2), -2.0 * m);
    CHECK((p - m).cwiseAbs().maxCoeff() < 1e-12);
}
