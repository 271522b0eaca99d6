#include "dro/cli_app.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dro/config.hpp"
#include "dro/diagnostics.hpp"
#include "dro/trace_csv.hpp"

namespace dro {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBoundFail = 1;
constexpr int kExitRunFault = 2;
constexpr int kExitConfig = 3;

std::string fmt(double v, const char* format = "%.10g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        try {
            size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(what + ": bad numeric entry '" + tok + "'");
        }
    }
    return out;
}

struct SimulateFlags {
    std::string config_path;
    std::string scenario_name;
    std::string variant = "prop1";
    std::string mode = "adj";
    double lambda = 1.0, kappa = 1.0, rho = 0.0;
    double dt = 1e-3;
    double t_final = -1.0;  // <= 0: keep the scenario's horizon
    int record_every = 10;
    std::string zhat0, thetahat0;
    double pe_window = -1.0, pe_level = 1e-6;
    std::string out;
};

void add_gain_flags(CLI::App* cmd, SimulateFlags& f) {
    cmd->add_option("--config", f.config_path, "run config file (JSON, schema_version 1)");
    cmd->add_option("--scenario", f.scenario_name, "built-in scenario name");
    cmd->add_option("--observer", f.variant, "observer variant: prop1 | prop2");
    cmd->add_option("--lambda", f.lambda, "adaptation gain (> 0)");
    cmd->add_option("--kappa", f.kappa, "forgetting rate (> 0)");
    cmd->add_option("--rho", f.rho, "feedback gain (>= 0, prop2 only)");
    cmd->add_option("--mode", f.mode, "mixing mode: adj | delta-adj | identity");
    cmd->add_option("--dt", f.dt, "integration step (<= 0.01)");
    cmd->add_option("--tfinal", f.t_final, "horizon override in seconds");
    cmd->add_option("--record-every", f.record_every, "trace decimation factor");
    cmd->add_option("--zhat0", f.zhat0, "initial z_hat, comma-separated");
    cmd->add_option("--thetahat0", f.thetahat0, "initial theta_hat, comma-separated");
    cmd->add_option("--pe-window", f.pe_window, "PE window length (default: 10% of horizon)");
    cmd->add_option("--pe-level", f.pe_level, "required PE window energy");
}

RunSetup setup_from_flags(const SimulateFlags& f, const CLI::App* cmd) {
    RunSetup setup;
    if (!f.config_path.empty()) {
        setup = load_config_file(f.config_path);
    } else if (!f.scenario_name.empty()) {
        setup.sim.scenario = builtin_scenario(f.scenario_name);
    } else {
        throw ConfigError("either --config or --scenario is required");
    }

    // Explicit flags override the config file.
    const auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--observer") || f.config_path.empty())
        setup.sim.variant = parse_observer_variant(f.variant);
    if (given("--lambda") || f.config_path.empty()) setup.sim.gains.lambda = f.lambda;
    if (given("--kappa") || f.config_path.empty()) setup.sim.gains.kappa = f.kappa;
    if (given("--rho") || f.config_path.empty()) setup.sim.gains.rho_gain = f.rho;
    if (given("--mode") || f.config_path.empty())
        setup.sim.gains.mode = parse_mixing_mode(f.mode);
    if (given("--dt") || f.config_path.empty()) setup.sim.dt = f.dt;
    if (given("--record-every") || f.config_path.empty())
        setup.sim.record_every = f.record_every;
    if (f.t_final > 0) setup.sim.scenario.t_final = f.t_final;
    if (given("--pe-window")) setup.diagnostics.pe_window_T = f.pe_window;
    if (given("--pe-level")) setup.diagnostics.pe_level = f.pe_level;

    if (!f.zhat0.empty()) {
        const std::vector<double> v = parse_double_list(f.zhat0, "--zhat0");
        setup.sim.init.z_hat =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (!f.thetahat0.empty()) {
        const std::vector<double> v = parse_double_list(f.thetahat0, "--thetahat0");
        setup.sim.init.theta_hat =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    setup.sim.validate();
    return setup;
}

std::string fault_status(const Trace& trace) {
    if (!trace.fault) return "ok";
    switch (trace.fault->kind) {
        case Fault::Kind::Divergence: return "divergence";
        case Fault::Kind::NonFinite: return "non-finite";
        case Fault::Kind::PsiSupViolation: return "psi-sup-violation";
    }
    return "?";
}

void write_summary(std::ostream& os, const RunSetup& setup, const Trace& trace,
                   const CertificateCheckResult& cert) {
    const SimConfig& cfg = setup.sim;
    const Dimensions& dims = cfg.scenario.model.dims;
    const double rho_eff =
        cfg.variant == ObserverVariant::Prop2 ? cfg.gains.rho_gain : 0.0;

    os << "# drem-observer summary v1\n";
    os << "scenario = " << cfg.scenario.name << "\n";
    os << "variant = " << to_string(cfg.variant) << "\n";
    os << "mode = " << to_string(cfg.gains.mode) << "\n";
    os << "lambda = " << fmt(cfg.gains.lambda) << "\n";
    os << "kappa = " << fmt(cfg.gains.kappa) << "\n";
    os << "rho = " << fmt(rho_eff) << "\n";
    os << "dt = " << fmt(cfg.dt) << "\n";
    os << "t_final = " << fmt(cfg.scenario.t_final) << "\n";
    os << "rows = " << trace.rows() << "\n";
    os << "status = " << fault_status(trace) << "\n";
    if (trace.fault)
        os << "fault_detail = t=" << fmt(trace.fault->t) << " " << trace.fault->detail << "\n";
    os << "certificate_check = " << (cert.pass ? "pass" : "FAIL")
       << " (worst eigenvalue " << fmt(cert.worst_eigenvalue, "%.6g") << ")\n";

    if (trace.rows() > 0) {
        os << "final_theta_error_norm = " << fmt(trace.theta_tilde.back().norm()) << "\n";
        os << "final_zbar_norm = " << fmt(trace.z_bar.back().norm()) << "\n";
        double max_delta = 0.0, max_swap = 0.0, min_eig = 0.0;
        for (size_t i = 0; i < trace.rows(); ++i) {
            max_delta = std::max(max_delta, trace.delta[i]);
            max_swap = std::max(max_swap, trace.swap_residual[i]);
            min_eig = std::min(min_eig, trace.min_eig_phi[i]);
        }
        os << "final_delta = " << fmt(trace.delta.back()) << "\n";
        os << "max_delta = " << fmt(max_delta) << "\n";
        os << "max_swap_residual = " << fmt(max_swap) << "\n";
        os << "min_phi_eigenvalue = " << fmt(min_eig) << "\n";
    }

    // Excitation diagnostics need at least one full window of samples.
    const double sample_dt = trace.sample_dt();
    const double window_T = setup.diagnostics.effective_window(cfg.scenario.t_final);
    if (trace.rows() >= 2 &&
        static_cast<double>(trace.rows() - 1) * sample_dt >= window_T) {
        const ExcitationReport rep =
            excitation_report(trace.delta, sample_dt, window_T, setup.diagnostics.pe_level);
        os << "pe_window_T = " << fmt(rep.pe_window_T) << "\n";
        os << "pe_level = " << fmt(rep.pe_level) << "\n";
        os << "pe_min_window_integral = " << fmt(rep.min_window_integral) << "\n";
        os << "pe_satisfied = " << (rep.pe_satisfied ? "yes" : "no") << "\n";
        os << "cumulative_excitation_total = " << fmt(rep.cumulative.back()) << "\n";
        os << "cumulative_excitation_tail_slope = " << fmt(rep.tail_slope) << "\n";
        os << "excitation_verdict = "
           << (rep.tail_consistent
                   ? "consistent with non-square-integrable excitation"
                   : "inconsistent with non-square-integrable excitation (energy flattening)")
           << "\n";
    } else {
        os << "excitation_verdict = insufficient data\n";
    }

    if (trace.rows() >= 2) {
        const double max_inc =
            lyapunov_monitor(trace, cfg.scenario.certificate, cfg.gains.kappa, rho_eff);
        os << "lyapunov_max_increment = " << fmt(max_inc) << "\n";
    }

    const KappaBoundResult kb = kappa_bound_check(cfg.gains.kappa, rho_eff, dims.p,
                                                  cfg.scenario.model.psi_sup);
    os << "kappa_bound = " << (kb.pass ? "PASS" : "FAIL") << "\n";
    os << "kappa_bound_margin = " << fmt(kb.margin) << "\n";
}

int cmd_simulate(const SimulateFlags& f, const CLI::App* cmd) {
    const RunSetup setup = setup_from_flags(f, cmd);

    const CertificateCheckResult cert = certificate_check(setup.sim.scenario);
    if (!cert.pass) {
        std::cerr << "error: scenario certificate check failed (worst eigenvalue "
                  << fmt(cert.worst_eigenvalue, "%.6g")
                  << " > 1e-9); P does not certify the error dynamics\n";
        return kExitConfig;
    }

    const Trace trace = run(setup.sim);
    write_trace_csv(trace, f.out);

    std::ostringstream summary;
    write_summary(summary, setup, trace, cert);
    std::cout << summary.str();
    {
        std::ofstream sf(f.out + ".summary.txt");
        if (!sf) throw ConfigError("cannot open summary file '" + f.out + ".summary.txt'");
        sf << summary.str();
    }

    if (trace.fault) {
        std::cerr << "run fault: " << fault_status(trace) << " at t=" << fmt(trace.fault->t)
                  << ": " << trace.fault->detail << "\n";
        return trace.fault->kind == Fault::Kind::PsiSupViolation ? kExitConfig : kExitRunFault;
    }
    return kExitOk;
}

int cmd_check_kappa(double kappa, double rho, int p, double psi_sup) {
    const KappaBoundResult r = kappa_bound_check(kappa, rho, p, psi_sup);
    std::cout << (r.pass ? "PASS" : "FAIL") << " margin = " << fmt(r.margin) << "\n";
    return r.pass ? kExitOk : kExitBoundFail;
}

int cmd_sweep_rho(const SimulateFlags& f, const CLI::App* cmd, const std::string& rho_list) {
    RunSetup setup = setup_from_flags(f, cmd);
    setup.sim.variant = ObserverVariant::Prop2;  // the sweep is a prop2 feature

    const std::vector<double> rhos = parse_double_list(rho_list, "--rho-list");
    const std::vector<RhoSweepEntry> entries = compare_rho_sweep(setup.sim, rhos);

    std::ostringstream table;
    table << "rho,sup_eps,sup_theta_err,final_theta_err\n";
    for (const auto& e : entries)
        table << fmt(e.rho, "%.17g") << "," << fmt(e.sup_eps, "%.17g") << ","
              << fmt(e.sup_theta_err, "%.17g") << "," << fmt(e.final_theta_err, "%.17g") << "\n";

    std::printf("%-10s %-14s %-16s %-16s\n", "rho", "sup|eps|", "sup|theta_err|",
                "final|theta_err|");
    for (const auto& e : entries)
        std::printf("%-10.4g %-14.6g %-16.6g %-16.6g\n", e.rho, e.sup_eps, e.sup_theta_err,
                    e.final_theta_err);

    if (!f.out.empty()) {
        std::ofstream of(f.out);
        if (!of) throw ConfigError("cannot open output file '" + f.out + "'");
        of << "# drem-observer rho-sweep v1\n" << table.str();
    }
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path) {
    std::ifstream f(csv_path);
    if (!f) throw ConfigError("cannot open trace file '" + csv_path + "'");
    std::string marker, header;
    if (!std::getline(f, marker) || marker.rfind(kTraceCsvMarker, 0) != 0)
        throw ConfigError("'" + csv_path + "' is not a v1 trace CSV (missing marker line)");
    if (!std::getline(f, header)) throw ConfigError("'" + csv_path + "' has no header row");

    std::vector<std::string> names;
    {
        std::istringstream is(header);
        std::string tok;
        while (std::getline(is, tok, ',')) names.push_back(tok);
    }
    const auto cols_with_prefix = [&](const std::string& prefix) {
        std::vector<int> idx;
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i].rfind(prefix + "_", 0) == 0) idx.push_back(static_cast<int>(i) + 1);
        return idx;  // 1-based for gnuplot
    };
    const auto col_of = [&](const std::string& name) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i) + 1;
        return -1;
    };

    const std::vector<int> thetatilde = cols_with_prefix("thetatilde");
    const std::vector<int> zbar = cols_with_prefix("zbar");
    const int c_t = col_of("t");
    const int c_delta = col_of("delta");
    const int c_v0 = col_of("V0");
    if (c_t != 1 || thetatilde.empty() || zbar.empty() || c_delta < 0 || c_v0 < 0)
        throw ConfigError("'" + csv_path + "' header is missing v1 trace columns");

    const auto norm_expr = [](const std::vector<int>& idx) {
        std::string e = "sqrt(";
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) e += "+";
            e += "column(" + std::to_string(idx[i]) + ")**2";
        }
        return e + ")";
    };
    const auto names_of = [&](const std::vector<int>& idx) {
        std::string s;
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) s += " ";
            s += names[static_cast<size_t>(idx[i] - 1)];
        }
        return s;
    };

    std::ostringstream os;
    os << "# drem-observer plot script (gnuplot)\n";
    os << "# source: " << csv_path << "\n";
    os << "set datafile separator ','\n";
    os << "set key autotitle columnhead\n";
    os << "set grid\n";
    os << "set xlabel 't'\n";
    os << "set multiplot layout 2,2 title '" << csv_path << "'\n";
    os << "set logscale y\n";
    os << "# columns: " << names_of(thetatilde) << "\n";
    os << "set title 'parameter error norm'\n";
    os << "plot '" << csv_path << "' using 1:(" << norm_expr(thetatilde)
       << ") with lines title '|thetatilde|'\n";
    os << "# columns: " << names_of(zbar) << "\n";
    os << "set title 'state error norm'\n";
    os << "plot '" << csv_path << "' using 1:(" << norm_expr(zbar)
       << ") with lines title '|zbar|'\n";
    os << "unset logscale y\n";
    os << "set title 'excitation delta'\n";
    os << "plot '" << csv_path << "' using 1:" << c_delta << " with lines title 'delta'\n";
    os << "set title 'Lyapunov value V0'\n";
    os << "plot '" << csv_path << "' using 1:" << c_v0 << " with lines title 'V0'\n";
    os << "unset multiplot\n";

    std::ofstream of(out_path);
    if (!of) throw ConfigError("cannot open output file '" + out_path + "'");
    of << os.str();
    return kExitOk;
}

int cmd_list_scenarios() {
    for (const auto& name : builtin_scenario_names())
        std::cout << name << "  " << builtin_scenario_summary(name) << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"DREM adaptive observer co-simulation"};
    app.require_subcommand(1);

    SimulateFlags sim_flags;
    CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write a trace CSV");
    add_gain_flags(simulate, sim_flags);
    simulate->add_option("--out", sim_flags.out, "trace CSV output path")->required();

    double kb_kappa = 0, kb_rho = 0, kb_psi = 0;
    int kb_p = 1;
    CLI::App* check = app.add_subcommand("check-kappa", "check the feedback gain bound");
    check->add_option("--kappa", kb_kappa, "forgetting rate")->required();
    check->add_option("--rho", kb_rho, "feedback gain")->required();
    check->add_option("--p", kb_p, "parameter dimension")->required();
    check->add_option("--psi-sup", kb_psi, "bound on |Psi(u)|")->required();

    SimulateFlags sweep_flags;
    std::string rho_list;
    CLI::App* sweep = app.add_subcommand("sweep-rho", "run a scenario across feedback gains");
    add_gain_flags(sweep, sweep_flags);
    sweep->add_option("--rho-list", rho_list, "comma-separated rho values")->required();
    sweep->add_option("--out", sweep_flags.out, "sweep summary CSV path");

    std::string plot_csv, plot_out;
    CLI::App* plot = app.add_subcommand("plot", "emit a gnuplot script for a trace CSV");
    plot->add_option("--csv", plot_csv, "trace CSV produced by simulate")->required();
    plot->add_option("--out", plot_out, "script output path")->required();

    CLI::App* list = app.add_subcommand("list-scenarios", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_flags, simulate);
        if (check->parsed()) return cmd_check_kappa(kb_kappa, kb_rho, kb_p, kb_psi);
        if (sweep->parsed()) return cmd_sweep_rho(sweep_flags, sweep, rho_list);
        if (plot->parsed()) return cmd_plot(plot_csv, plot_out);
        if (list->parsed()) return cmd_list_scenarios();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IntegrationFault& e) {
        std::cerr << "integration fault at t=" << e.t << ": " << e.what() << "\n";
        return kExitRunFault;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return kExitRunFault;
    }
    return kExitConfig;
}

}  // namespace dro
