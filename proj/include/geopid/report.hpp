#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geopid/controller.hpp"
#include "geopid/dynamics.hpp"
#include "geopid/gains.hpp"
#include "geopid/morse.hpp"

namespace geopid {

// 17 significant digits: bit-faithful f64 round trip.
std::string format_double(double v);

// Digest of one simulation run; mirrors the trajectory diagnostics exactly.
struct RunSummary {
    std::string name;
    Eigen::VectorXd final_g;
    Eigen::VectorXd final_u;
    Eigen::VectorXd final_w;
    double max_constraint_residual = 0.0;
    double max_integral_residual = 0.0;
    bool w_monotone = true; // W non-increasing up to 1e-9 per step
    bool converged = false;
    double converged_time = -1.0;
    std::optional<GainCertificate> certificate;
    LambdaMu estimates;
    std::optional<double> lambda_ref;
    std::optional<double> mu_ref;
    WCoeffs coeffs;
    double kappa = 1.0;
};

RunSummary summarize(const std::string& name, const Trajectory& traj,
                     const Gains& gains, double kappa);

// key = value lines, deterministic order.
std::string summary_text(const RunSummary& summary);

// Comma-separated, header row, LF endings, every float at 17 significant
// digits. Columns: t, chart coordinates, u components, w components,
// residual, W, force components.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& vars);

// Minimal SVG 1.1 line plot: one polyline per chart coordinate over time,
// axes and a legend, no external dependencies.
std::string trajectory_svg(const Trajectory& traj, const std::vector<std::string>& vars);

std::string certificate_text(const GainCertificate& cert);

void write_file(const std::string& path, const std::string& content);

} // namespace geopid
