#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "geopid/commands.hpp"
#include "geopid/errors.hpp"

namespace {

struct CommonArgs {
    std::string builtin;
    std::string config_path;
    std::optional<double> dt, t_end, kp, kd, ki, kappa;
    std::string out_dir = ".";
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("builtin", args.builtin,
                    "Built-in system: unicycle, circle-particle[:r=F], euclidean[:n=I]");
    cmd->add_option("--config", args.config_path, "Path to a system config file");
    cmd->add_option("--dt", args.dt, "Integrator step [s]");
    cmd->add_option("--t-end", args.t_end, "Simulation horizon [s]");
    cmd->add_option("--kp", args.kp, "Proportional gain");
    cmd->add_option("--kd", args.kd, "Derivative gain");
    cmd->add_option("--ki", args.ki, "Integral gain");
    cmd->add_option("--kappa", args.kappa, "Certificate parameter kappa");
    cmd->add_option("--out", args.out_dir, "Output directory (default: cwd)");
}

geopid::CompiledSystem load_system(const CommonArgs& args) {
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) {
            throw geopid::IoError("cannot open config: " + args.config_path);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return geopid::compile(geopid::parse_config(buf.str()));
    }
    if (args.builtin.empty()) {
        throw geopid::ParameterError("give a BUILTIN name or --config PATH");
    }
    if (!geopid::is_builtin(args.builtin)) {
        throw geopid::ParameterError("unknown builtin '" + args.builtin +
                                     "'; known: unicycle, circle-particle, euclidean");
    }
    return geopid::builtin_compiled(args.builtin);
}

geopid::CompiledSystem load_with_overrides(const CommonArgs& args) {
    geopid::CompiledSystem cs = load_system(args);
    if (args.dt) cs.dt = *args.dt;
    if (args.t_end) cs.t_end = *args.t_end;
    if (args.kp) cs.gains.kp = *args.kp;
    if (args.kd) cs.gains.kd = *args.kd;
    if (args.ki) cs.gains.ki = *args.ki;
    if (args.kappa) cs.kappa = *args.kappa;
    return cs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and gain design for PID control of nonholonomic "
                 "mechanical systems on product groups"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    CLI::App* sim = app.add_subcommand("sim", "Integrate the closed loop and write "
                                              "trajectory CSV + summary");
    add_common(sim, sim_args);
    sim->add_flag("--svg", sim_args.svg, "Also write an SVG line plot of the states");

    CommonArgs gains_args;
    std::optional<double> lambda_override, mu_override;
    bool grid = false;
    CLI::App* gains = app.add_subcommand("gains", "Evaluate the gain certificate");
    add_common(gains, gains_args);
    gains->add_option("--lambda", lambda_override, "Override lambda");
    gains->add_option("--mu", mu_override, "Override mu");
    gains->add_flag("--grid", grid, "Sweep kappa over (0, 2/mu) in 50 steps");

    CommonArgs crit_args;
    double tol = 1e-9;
    CLI::App* critical =
        app.add_subcommand("critical", "Sample the D-critical set over the region");
    add_common(critical, crit_args);
    critical->add_option("--tol", tol, "Residual tolerance (default 1e-9)");

    CommonArgs sweep_args;
    std::string kp_range, kd_range, ki_range;
    CLI::App* sweep = app.add_subcommand("sweep", "Cartesian gain sweep, one summary "
                                                  "row per run");
    sweep->add_option("builtin", sweep_args.builtin, "Built-in system");
    sweep->add_option("--config", sweep_args.config_path, "Path to a system config file");
    sweep->add_option("--dt", sweep_args.dt, "Integrator step [s]");
    sweep->add_option("--t-end", sweep_args.t_end, "Simulation horizon [s]");
    sweep->add_option("--kp", kp_range, "kp range lo:hi:count (or single value)");
    sweep->add_option("--kd", kd_range, "kd range lo:hi:count (or single value)");
    sweep->add_option("--ki", ki_range, "ki range lo:hi:count (or single value)");
    sweep->add_option("--kappa", sweep_args.kappa, "Certificate parameter kappa");
    sweep->add_option("--out", sweep_args.out_dir, "Output directory (default: cwd)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const geopid::CompiledSystem cs = load_with_overrides(sim_args);
            geopid::CommandOptions options{sim_args.out_dir, sim_args.svg};
            geopid::cmd_sim(cs, options, std::cout);
        } else if (gains->parsed()) {
            geopid::CompiledSystem cs = load_with_overrides(gains_args);
            if (lambda_override) cs.lambda_ref = *lambda_override;
            if (mu_override) cs.mu_ref = *mu_override;
            geopid::cmd_gains(cs, grid, std::cout);
        } else if (critical->parsed()) {
            const geopid::CompiledSystem cs = load_with_overrides(crit_args);
            geopid::cmd_critical(cs, tol, std::cout);
        } else if (sweep->parsed()) {
            geopid::CompiledSystem cs = load_with_overrides(sweep_args);
            const auto range_or = [&](const std::string& text, double fallback) {
                return text.empty() ? geopid::SweepRange{fallback, fallback, 1}
                                    : geopid::SweepRange::parse(text);
            };
            geopid::CommandOptions options{sweep_args.out_dir, false};
            geopid::cmd_sweep(cs, range_or(kp_range, cs.gains.kp),
                              range_or(kd_range, cs.gains.kd),
                              range_or(ki_range, cs.gains.ki), options, std::cout);
        }
    } catch (const geopid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
