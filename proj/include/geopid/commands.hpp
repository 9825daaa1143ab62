#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geopid/config.hpp"
#include "geopid/report.hpp"

namespace geopid {

struct CommandOptions {
    std::string out_dir = ".";
    bool svg = false;
};

struct SimResult {
    RunSummary summary;
    std::vector<std::string> files;
};

// Integrates the configured scenario, writes <name>_traj.csv and
// <name>_summary.txt (plus <name>_states.svg when requested) into out_dir,
// and prints the summary.
SimResult cmd_sim(const CompiledSystem& cs, const CommandOptions& options,
                  std::ostream& out);

struct GainsReport {
    GainCertificate certificate;
    double lambda_used = 0.0;
    double mu_used = 0.0;
    bool lambda_from_reference = false;
    // Populated by the kappa grid sweep: best certificate by smallest margin.
    std::optional<GainCertificate> best_grid;
};

// Certifies the configured gains against lambda/mu (reference values when
// the system carries them, sampled estimates otherwise). With grid set,
// sweeps kappa over (0, 2/mu) in 50 steps and reports the best margins.
GainsReport cmd_gains(const CompiledSystem& cs, bool grid, std::ostream& out);

struct CriticalReport {
    CriticalSearchResult result;
};

// Samples the D-critical set over the configured region and prints each
// point with its residual and D-Hessian signature; the declared minimum is
// tagged.
CriticalReport cmd_critical(const CompiledSystem& cs, double tol, std::ostream& out);

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> values() const;
    // "lo:hi:count" or a single number.
    static SweepRange parse(const std::string& text);
};

struct SweepResult {
    std::string csv;
    std::string path;
    int rows = 0;
};

// Cartesian product of gain ranges; one summary row per run. Runs execute
// concurrently but rows are emitted in deterministic cartesian order.
SweepResult cmd_sweep(const CompiledSystem& cs, const SweepRange& kp, const SweepRange& kd,
                      const SweepRange& ki, const CommandOptions& options,
                      std::ostream& out);

} // namespace geopid
