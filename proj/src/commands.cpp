#include "geopid/commands.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "geopid/controller.hpp"
#include "geopid/errors.hpp"

namespace geopid {

namespace {

std::pair<double, double> lambda_mu_for(const CompiledSystem& cs, LambdaMu* estimates_out) {
    const LambdaMu est = estimate_lambda_mu(cs.morse, cs.system.metric, cs.system.dist,
                                            cs.region, cs.system.topology);
    if (estimates_out) *estimates_out = est;
    const double lambda = cs.lambda_ref.value_or(est.lambda);
    const double mu = cs.mu_ref.value_or(est.mu);
    return {lambda, mu};
}

std::string out_path(const CommandOptions& options, const std::string& name,
                     const std::string& suffix) {
    return options.out_dir + "/" + name + suffix;
}

} // namespace

SimResult cmd_sim(const CompiledSystem& cs, const CommandOptions& options,
                  std::ostream& out) {
    const Trajectory traj = integrate(cs.system, cs.morse, cs.gains, cs.initial, cs.t_end,
                                      cs.dt, cs.kappa);
    RunSummary summary = summarize(cs.name, traj, cs.gains, cs.kappa);
    summary.lambda_ref = cs.lambda_ref;
    summary.mu_ref = cs.mu_ref;

    const auto [lambda, mu] = lambda_mu_for(cs, &summary.estimates);
    try {
        summary.certificate = certify_geometric(cs.gains, lambda, mu, cs.kappa);
    } catch (const ParameterError&) {
        // kappa outside (0, 2/mu) for the lambda/mu in use; leave the
        // certificate unset rather than failing the run.
    }

    SimResult result{std::move(summary), {}};
    const std::string csv_path = out_path(options, cs.name, "_traj.csv");
    write_file(csv_path, trajectory_csv(traj, cs.vars));
    result.files.push_back(csv_path);

    const std::string summary_path = out_path(options, cs.name, "_summary.txt");
    write_file(summary_path, summary_text(result.summary));
    result.files.push_back(summary_path);

    if (options.svg) {
        const std::string svg_path = out_path(options, cs.name, "_states.svg");
        write_file(svg_path, trajectory_svg(traj, cs.vars));
        result.files.push_back(svg_path);
    }

    out << summary_text(result.summary);
    for (const std::string& f : result.files) {
        out << "wrote " << f << "\n";
    }
    return result;
}

GainsReport cmd_gains(const CompiledSystem& cs, bool grid, std::ostream& out) {
    GainsReport report;
    LambdaMu est;
    const auto [lambda, mu] = lambda_mu_for(cs, &est);
    report.lambda_used = lambda;
    report.mu_used = mu;
    report.lambda_from_reference = cs.lambda_ref.has_value();

    report.certificate = certify_geometric(cs.gains, lambda, mu, cs.kappa);

    out << "lambda = " << format_double(lambda)
        << (cs.lambda_ref ? " (reference)" : " (sampled)") << "\n";
    out << "mu = " << format_double(mu) << (cs.mu_ref ? " (reference)" : " (sampled)")
        << "\n";
    out << "lambda_sampled = " << format_double(est.lambda)
        << ", mu_sampled = " << format_double(est.mu) << " over " << est.sample_count
        << " samples\n";
    out << certificate_text(report.certificate) << "\n";

    if (grid) {
        double best_margin = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 50; ++i) {
            const double kappa = (2.0 / mu) * static_cast<double>(i) / 51.0;
            const GainCertificate c = certify_geometric(cs.gains, lambda, mu, kappa);
            const double margin =
                std::min({c.kd_margin, c.ki_margin_low, c.ki_margin, c.kp_margin});
            if (margin > best_margin) {
                best_margin = margin;
                report.best_grid = c;
            }
        }
        out << "kappa grid best: " << certificate_text(*report.best_grid) << "\n";
    }
    return report;
}

CriticalReport cmd_critical(const CompiledSystem& cs, double tol, std::ostream& out) {
    CriticalReport report;
    report.result = find_d_critical(cs.morse, cs.system.metric, cs.system.dist, cs.region,
                                    cs.system.topology, tol);
    out << "seeds = " << report.result.seeds << ", dropped = " << report.result.dropped
        << ", points = " << report.result.points.size() << "\n";
    for (const CriticalPoint& cp : report.result.points) {
        out << "point (";
        for (int i = 0; i < cp.point.dim(); ++i) {
            if (i) out << ", ";
            out << format_double(cp.point[i]);
        }
        out << ") residual = " << format_double(cp.residual) << " signature = +"
            << cp.positive << "/-" << cp.negative << "/0:" << cp.zero;
        if (cp.is_minimum()) out << " [minimum]";
        if (cp.is_declared_minimum) out << " [declared minimum]";
        out << "\n";
    }
    return report;
}

std::vector<double> SweepRange::values() const {
    std::vector<double> v;
    if (count <= 1) {
        v.push_back(lo);
        return v;
    }
    for (int i = 0; i < count; ++i) {
        v.push_back(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
    }
    return v;
}

SweepRange SweepRange::parse(const std::string& text) {
    SweepRange r;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        r.lo = r.hi = std::stod(text);
        r.count = 1;
        return r;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        throw ParameterError("sweep range must be 'lo:hi:count' or a single number: " +
                             text);
    }
    r.lo = std::stod(text.substr(0, c1));
    r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.count = std::stoi(text.substr(c2 + 1));
    if (r.count < 1) {
        throw ParameterError("sweep range count must be at least 1");
    }
    return r;
}

SweepResult cmd_sweep(const CompiledSystem& cs, const SweepRange& kp, const SweepRange& kd,
                      const SweepRange& ki, const CommandOptions& options,
                      std::ostream& out) {
    const std::vector<double> kps = kp.values();
    const std::vector<double> kds = kd.values();
    const std::vector<double> kis = ki.values();

    struct Row {
        Gains gains;
        RunSummary summary;
        bool certified = false;
    };

    const auto run_one = [&cs](const Gains& gains) {
        const Trajectory traj =
            integrate(cs.system, cs.morse, gains, cs.initial, cs.t_end, cs.dt, cs.kappa);
        Row row;
        row.gains = gains;
        row.summary = summarize(cs.name, traj, gains, cs.kappa);
        return row;
    };

    // Fan out concurrently; collect in cartesian order so the CSV is
    // deterministic regardless of scheduling.
    std::vector<std::future<Row>> futures;
    futures.reserve(kps.size() * kds.size() * kis.size());
    for (double vkp : kps) {
        for (double vkd : kds) {
            for (double vki : kis) {
                futures.push_back(std::async(std::launch::async, run_one,
                                             Gains{vkp, vkd, vki}));
            }
        }
    }

    const auto [lambda, mu] = lambda_mu_for(cs, nullptr);

    std::ostringstream csv;
    csv << "kp,kd,ki,certificate,converged,converged_time,final_u_norm,final_w_norm,"
           "max_constraint_residual,w_monotone\n";
    int rows = 0;
    for (auto& f : futures) {
        Row row = f.get();
        bool certified = false;
        try {
            certified = certify_geometric(row.gains, lambda, mu, cs.kappa).pass;
        } catch (const ParameterError&) {
            certified = false;
        }
        csv << format_double(row.gains.kp) << "," << format_double(row.gains.kd) << ","
            << format_double(row.gains.ki) << "," << (certified ? "PASS" : "FAIL") << ","
            << (row.summary.converged ? "true" : "false") << ","
            << format_double(row.summary.converged_time) << ","
            << format_double(row.summary.final_u.norm()) << ","
            << format_double(row.summary.final_w.norm()) << ","
            << format_double(row.summary.max_constraint_residual) << ","
            << (row.summary.w_monotone ? "true" : "false") << "\n";
        ++rows;
    }

    SweepResult result;
    result.csv = csv.str();
    result.rows = rows;
    result.path = options.out_dir + "/" + cs.name + "_sweep.csv";
    write_file(result.path, result.csv);
    out << "wrote " << result.path << " (" << rows << " rows)\n";
    return result;
}

} // namespace geopid
