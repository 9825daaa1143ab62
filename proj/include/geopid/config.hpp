#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "geopid/dynamics.hpp"
#include "geopid/expression.hpp"
#include "geopid/gains.hpp"
#include "geopid/morse.hpp"

namespace geopid {

// Text-representable system description: sectioned key = value format with a
// small expression language for the metric, constraint basis, and Morse
// function. Built-ins are registered in code and have config mirrors for
// serialization.
struct SystemConfig {
    std::string name;
    int dimension = 0;
    TopologyVec topology;
    std::vector<std::string> vars;

    bool metric_identity = true;
    std::vector<std::vector<std::string>> metric_rows; // n rows of n expressions
    std::vector<std::vector<std::string>> basis_cols;  // k columns of n expressions

    std::string morse_value;
    std::vector<std::string> morse_differential; // optional analytic dV, n entries
    Eigen::VectorXd minimum;

    Gains gains;
    double kappa = 1.0;

    Eigen::VectorXd x0;
    Eigen::VectorXd u0;
    Eigen::VectorXd w0;
    double dt = 1e-3;
    double t_end = 10.0;

    SamplingRegion region;

    // Reference constants quoted for the system, reported next to sampled
    // estimates and used for certification when present.
    std::optional<double> lambda_ref;
    std::optional<double> mu_ref;

    int rank() const { return static_cast<int>(basis_cols.size()); }

    friend bool operator==(const SystemConfig& a, const SystemConfig& b);
};

// Everything needed to run commands against one system.
struct CompiledSystem {
    std::string name;
    std::vector<std::string> vars;
    MechanicalSystem system;
    MorseSpec morse;
    ClosedLoopState initial;
    Gains gains;
    double kappa = 1.0;
    double dt = 1e-3;
    double t_end = 10.0;
    SamplingRegion region;
    std::optional<double> lambda_ref;
    std::optional<double> mu_ref;
};

// Parses the sectioned key = value text. Diagnostics carry the offending
// key and 1-based line number.
SystemConfig parse_config(const std::string& text);

std::string serialize_config(const SystemConfig& config);

// Compiles the expression-defined fields and validates the constraint-module
// invariants at the initial state.
CompiledSystem compile(const SystemConfig& config);

// Built-in registry. Accepted specs: "unicycle", "circle-particle[:r=F]",
// "euclidean[:n=I]".
bool is_builtin(const std::string& spec);
std::vector<std::string> builtin_names();
SystemConfig builtin_config(const std::string& spec);

// Built-ins compiled from their native (analytic) definitions; faster than
// going through the expression mirror and numerically identical.
CompiledSystem builtin_compiled(const std::string& spec);

} // namespace geopid
