#include "geopid/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "geopid/errors.hpp"

namespace geopid {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunSummary summarize(const std::string& name, const Trajectory& traj, const Gains& gains,
                     double kappa) {
    RunSummary s;
    s.name = name;
    s.final_g = traj.states.back().g.coords();
    s.final_u = traj.states.back().u;
    s.final_w = traj.states.back().w;
    s.converged = traj.converged;
    s.converged_time = traj.converged_time;
    s.coeffs = WCoeffs::from_gains(gains, kappa);
    s.kappa = kappa;

    double prev_w = traj.diagnostics.front().lyapunov_w;
    for (const StepDiagnostics& d : traj.diagnostics) {
        s.max_constraint_residual = std::max(s.max_constraint_residual, d.constraint_residual);
        s.max_integral_residual = std::max(s.max_integral_residual, d.integral_residual);
        if (d.lyapunov_w > prev_w + 1e-9) s.w_monotone = false;
        prev_w = d.lyapunov_w;
    }
    return s;
}

namespace {

std::string join_vec(const Eigen::VectorXd& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

} // namespace

std::string summary_text(const RunSummary& s) {
    std::ostringstream out;
    out << "name = " << s.name << "\n";
    out << "converged = " << (s.converged ? "true" : "false") << "\n";
    out << "converged_time = " << format_double(s.converged_time) << "\n";
    out << "final_g = " << join_vec(s.final_g) << "\n";
    out << "final_u = " << join_vec(s.final_u) << "\n";
    out << "final_w = " << join_vec(s.final_w) << "\n";
    out << "final_u_norm = " << format_double(s.final_u.norm()) << "\n";
    out << "final_w_norm = " << format_double(s.final_w.norm()) << "\n";
    out << "max_constraint_residual = " << format_double(s.max_constraint_residual) << "\n";
    out << "max_integral_residual = " << format_double(s.max_integral_residual) << "\n";
    out << "w_monotone = " << (s.w_monotone ? "true" : "false") << "\n";
    if (s.certificate) {
        out << "certificate = " << (s.certificate->pass ? "PASS" : "FAIL") << "\n";
        out << "certificate_detail = " << certificate_text(*s.certificate) << "\n";
    }
    out << "lambda_est = " << format_double(s.estimates.lambda) << "\n";
    out << "mu_est = " << format_double(s.estimates.mu) << "\n";
    out << "lambda_mu_samples = " << s.estimates.sample_count << "\n";
    if (s.lambda_ref) out << "lambda_ref = " << format_double(*s.lambda_ref) << "\n";
    if (s.mu_ref) out << "mu_ref = " << format_double(*s.mu_ref) << "\n";
    out << "w_coeffs = alpha=" << format_double(s.coeffs.alpha)
        << " beta=" << format_double(s.coeffs.beta)
        << " gamma=" << format_double(s.coeffs.gamma)
        << " sigma=" << format_double(s.coeffs.sigma) << " (designofW selection, kappa="
        << format_double(s.kappa) << ")\n";
    return out.str();
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& vars) {
    std::ostringstream out;
    const int n = static_cast<int>(vars.size());
    const int k = static_cast<int>(traj.states.front().u.size());

    out << "t";
    for (const std::string& v : vars) out << "," << v;
    for (int i = 1; i <= k; ++i) out << ",u" << i;
    for (int i = 1; i <= k; ++i) out << ",w" << i;
    out << ",residual,W";
    for (int i = 1; i <= n; ++i) out << ",f" << i;
    out << "\n";

    for (std::size_t row = 0; row < traj.size(); ++row) {
        const ClosedLoopState& s = traj.states[row];
        const StepDiagnostics& d = traj.diagnostics[row];
        out << format_double(traj.times[row]);
        for (int i = 0; i < n; ++i) out << "," << format_double(s.g[i]);
        for (int i = 0; i < k; ++i) out << "," << format_double(s.u[i]);
        for (int i = 0; i < k; ++i) out << "," << format_double(s.w[i]);
        out << "," << format_double(d.constraint_residual);
        out << "," << format_double(d.lyapunov_w);
        for (int i = 0; i < n; ++i) out << "," << format_double(d.force[i]);
        out << "\n";
    }
    return out.str();
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

} // namespace

std::string trajectory_svg(const Trajectory& traj, const std::vector<std::string>& vars) {
    const int width = 900, height = 520;
    const int m_left = 70, m_right = 150, m_top = 30, m_bottom = 50;
    const double plot_w = width - m_left - m_right;
    const double plot_h = height - m_top - m_bottom;
    const int n = static_cast<int>(vars.size());

    double y_min = 0.0, y_max = 0.0;
    for (const ClosedLoopState& s : traj.states) {
        y_min = std::min(y_min, s.g.coords().minCoeff());
        y_max = std::max(y_max, s.g.coords().maxCoeff());
    }
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    const double t_min = traj.times.front(), t_max = traj.times.back();

    const auto sx = [&](double t) { return m_left + (t - t_min) / (t_max - t_min) * plot_w; };
    const auto sy = [&](double v) {
        return m_top + (y_max - v) / (y_max - y_min) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes with end labels.
    out << "<line x1=\"" << m_left << "\" y1=\"" << m_top + plot_h << "\" x2=\""
        << m_left + plot_w << "\" y2=\"" << m_top + plot_h
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << m_left << "\" y1=\"" << m_top << "\" x2=\"" << m_left
        << "\" y2=\"" << m_top + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    char label[64];
    std::snprintf(label, sizeof(label), "%.3g", t_max);
    out << "<text x=\"" << m_left + plot_w << "\" y=\"" << height - 18
        << "\" text-anchor=\"end\" font-size=\"12\">" << label << "</text>\n";
    out << "<text x=\"" << m_left << "\" y=\"" << height - 18
        << "\" font-size=\"12\">" << "0" << "</text>\n";
    out << "<text x=\"" << (m_left + plot_w / 2) << "\" y=\"" << height - 18
        << "\" text-anchor=\"middle\" font-size=\"12\">t [s]</text>\n";
    std::snprintf(label, sizeof(label), "%.3g", y_max);
    out << "<text x=\"" << m_left - 6 << "\" y=\"" << m_top + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << label << "</text>\n";
    std::snprintf(label, sizeof(label), "%.3g", y_min);
    out << "<text x=\"" << m_left - 6 << "\" y=\"" << m_top + plot_h
        << "\" text-anchor=\"end\" font-size=\"12\">" << label << "</text>\n";

    // One polyline per chart coordinate, capped at ~2000 points.
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    for (int series = 0; series < n; ++series) {
        const char* color = kSeriesColors[series % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < traj.size(); i += stride) {
            char pt[48];
            std::snprintf(pt, sizeof(pt), "%.2f,%.2f ", sx(traj.times[i]),
                          sy(traj.states[i].g[series]));
            out << pt;
        }
        out << "\"/>\n";
        const double ly = m_top + 16 + 18 * series;
        out << "<line x1=\"" << m_left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << m_left + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << m_left + plot_w + 40 << "\" y=\"" << ly
            << "\" font-size=\"13\">" << vars[static_cast<std::size_t>(series)]
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string certificate_text(const GainCertificate& c) {
    std::ostringstream out;
    out << (c.pass ? "PASS" : "FAIL");
    out << " [kp=" << format_double(c.gains.kp) << " kd=" << format_double(c.gains.kd)
        << " ki=" << format_double(c.gains.ki) << " lambda=" << format_double(c.lambda)
        << " mu=" << format_double(c.mu) << " kappa=" << format_double(c.kappa)
        << " delta=" << format_double(c.delta) << "]";
    out << " margins: k_D>0: " << format_double(c.kd_margin)
        << "; k_I>0: " << format_double(c.ki_margin_low)
        << "; k_I<bound(" << format_double(c.ki_bound)
        << "): " << format_double(c.ki_margin) << "; k_P>bound("
        << format_double(c.kp_bound) << "): " << format_double(c.kp_margin);
    if (!c.pass) out << " violated: " << c.violated;
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << content;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace geopid
