#include "dro/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace dro {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

Eigen::MatrixXd parse_matrix(const json& j, int rows, int cols, const std::string& origin,
                             const std::string& key) {
    if (!j.is_array()) fail(origin, "'" + key + "' must be an array of rows");
    Eigen::MatrixXd m(rows, cols);
    if (static_cast<int>(j.size()) != rows)
        fail(origin, "'" + key + "' must have " + std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
        const json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(origin, "'" + key + "' row " + std::to_string(r + 1) + " must have " +
                             std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) {
            const json& cell = row[static_cast<size_t>(c)];
            if (!cell.is_number()) fail(origin, "'" + key + "' entries must be numbers");
            m(r, c) = cell.get<double>();
        }
    }
    return m;
}

Eigen::VectorXd parse_vector(const json& j, int n, const std::string& origin,
                             const std::string& key) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        fail(origin, "'" + key + "' must be an array of " + std::to_string(n) + " numbers");
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        const json& cell = j[static_cast<size_t>(i)];
        if (!cell.is_number()) fail(origin, "'" + key + "' entries must be numbers");
        v(i) = cell.get<double>();
    }
    return v;
}

Signal parse_signal(const json& j, const std::string& origin) {
    if (!j.is_object()) fail(origin, "input channel must be an object");
    const std::string kind = j.value("kind", "");
    Signal s;
    if (kind == "constant") {
        s = Signal::constant(j.value("value", 0.0));
    } else if (kind == "sine") {
        s = Signal::sine(j.value("amplitude", 1.0), j.value("omega", 1.0), j.value("phase", 0.0),
                         j.value("offset", 0.0));
    } else if (kind == "decaying-sine") {
        s = Signal::decaying_sine(j.value("amplitude", 1.0), j.value("decay", 0.0),
                                  j.value("omega", 1.0), j.value("phase", 0.0));
    } else {
        fail(origin, "input channel kind must be constant, sine, or decaying-sine");
    }
    if (j.contains("switch_off")) s = s.until(j.at("switch_off").get<double>());
    return s;
}

// Inline scenarios carry constant coefficient matrices; input signals come
// from the signal algebra, so a run is reproducible from the file alone.
Scenario parse_inline_scenario(const json& j, const std::string& origin) {
    if (!j.contains("dims")) fail(origin, "inline scenario needs 'dims'");
    const json& jd = j.at("dims");
    Dimensions dims;
    dims.n_x = jd.value("n_x", 0);
    dims.n_u = jd.value("n_u", 0);
    dims.n_y = jd.value("n_y", 0);
    dims.p = jd.value("p", 0);
    dims.validate();

    const auto want = [&](const char* key) -> const json& {
        if (!j.contains(key)) fail(origin, std::string("inline scenario needs '") + key + "'");
        return j.at(key);
    };

    const Eigen::MatrixXd A = parse_matrix(want("A"), dims.n_x, dims.n_x, origin, "A");
    const Eigen::MatrixXd Omega = parse_matrix(want("Omega"), dims.n_x, dims.p, origin, "Omega");
    const Eigen::VectorXd L = parse_vector(want("L"), dims.n_x, origin, "L");
    const Eigen::MatrixXd C = parse_matrix(want("C"), dims.n_y, dims.n_x, origin, "C");
    const Eigen::MatrixXd Psi = parse_matrix(want("Psi"), dims.n_y, dims.p, origin, "Psi");
    const Eigen::MatrixXd Gamma = parse_matrix(want("Gamma"), dims.n_x, dims.n_y, origin, "Gamma");

    Scenario s;
    s.name = j.value("name", "custom");
    s.model.dims = dims;
    s.model.A_map = [A](const Eigen::VectorXd&, const Eigen::VectorXd&) { return A; };
    s.model.Omega_map = [Omega](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Omega; };
    s.model.L_map = [L](const Eigen::VectorXd&, const Eigen::VectorXd&) { return L; };
    s.model.C_map = [C](const Eigen::VectorXd&) { return C; };
    s.model.Psi_map = [Psi](const Eigen::VectorXd&) { return Psi; };
    s.model.Gamma_map = [Gamma](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Gamma; };
    s.model.psi_sup = j.value("psi_sup", 0.0);

    s.theta_true = parse_vector(want("theta_true"), dims.p, origin, "theta_true");
    s.x0 = parse_vector(want("x0"), dims.n_x, origin, "x0");
    s.certificate = CertificateP::from(parse_matrix(want("P"), dims.n_x, dims.n_x, origin, "P"));
    s.t_final = j.value("t_final", 50.0);

    const json& ji = want("input");
    if (!ji.is_array() || static_cast<int>(ji.size()) != dims.n_u)
        fail(origin, "'input' must list one channel per input dimension");
    for (const auto& jc : ji) s.input.channels.push_back(parse_signal(jc, origin));
    return s;
}

}  // namespace

RunSetup parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(origin, "top level must be an object");

    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != 1)
        fail(origin, "schema_version must be the integer 1");

    RunSetup setup;

    if (!j.contains("scenario")) fail(origin, "missing 'scenario'");
    const json& js = j.at("scenario");
    if (js.is_string())
        setup.sim.scenario = builtin_scenario(js.get<std::string>());
    else if (js.is_object())
        setup.sim.scenario = parse_inline_scenario(js, origin);
    else
        fail(origin, "'scenario' must be a catalog name or an inline object");

    if (j.contains("observer")) {
        const json& jo = j.at("observer");
        if (!jo.is_object()) fail(origin, "'observer' must be an object");
        setup.sim.variant = parse_observer_variant(jo.value("variant", "prop1"));
        setup.sim.gains.lambda = jo.value("lambda", 1.0);
        setup.sim.gains.kappa = jo.value("kappa", 1.0);
        setup.sim.gains.rho_gain = jo.value("rho_gain", 0.0);
        setup.sim.gains.mode = parse_mixing_mode(jo.value("mode", "adj"));
    }

    if (j.contains("sim")) {
        const json& jm = j.at("sim");
        if (!jm.is_object()) fail(origin, "'sim' must be an object");
        setup.sim.dt = jm.value("dt", 1e-3);
        setup.sim.record_every = jm.value("record_every", 10);
        if (jm.contains("t_final")) setup.sim.scenario.t_final = jm.at("t_final").get<double>();
        if (jm.contains("initial_overrides")) {
            const json& jiv = jm.at("initial_overrides");
            const Dimensions& d = setup.sim.scenario.model.dims;
            if (jiv.contains("z_hat"))
                setup.sim.init.z_hat = parse_vector(jiv.at("z_hat"), d.n_x, origin, "z_hat");
            if (jiv.contains("theta_hat"))
                setup.sim.init.theta_hat =
                    parse_vector(jiv.at("theta_hat"), d.p, origin, "theta_hat");
            if (jiv.contains("Y"))
                setup.sim.init.Y = parse_matrix(jiv.at("Y"), d.n_x, d.p, origin, "Y");
            if (jiv.contains("y_script"))
                setup.sim.init.y_script =
                    parse_vector(jiv.at("y_script"), d.p, origin, "y_script");
            if (jiv.contains("phi"))
                setup.sim.init.phi = parse_matrix(jiv.at("phi"), d.p, d.p, origin, "phi");
        }
    }

    if (j.contains("diagnostics")) {
        const json& jg = j.at("diagnostics");
        if (!jg.is_object()) fail(origin, "'diagnostics' must be an object");
        setup.diagnostics.pe_window_T = jg.value("pe_window_T", -1.0);
        setup.diagnostics.pe_level = jg.value("pe_level", 1e-6);
    }

    setup.sim.validate();
    return setup;
}

RunSetup load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace dro
