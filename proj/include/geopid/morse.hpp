#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "geopid/chart.hpp"
#include "geopid/distribution.hpp"
#include "geopid/metric.hpp"

namespace geopid {

// A candidate D-polar Morse function: nonnegative, zero exactly at the
// declared minimum, with an analytic differential when available and a
// central-difference fallback otherwise.
class MorseSpec {
public:
    using ValueFn = std::function<double(const ChartPoint&)>;
    using DifferentialFn = std::function<CotangentCoord(const ChartPoint&)>;

    MorseSpec(ValueFn value, ChartPoint minimum, DifferentialFn differential = nullptr,
              double fd_step = 1e-5);

    double value(const ChartPoint& g) const;
    CotangentCoord differential(const ChartPoint& g) const;
    const ChartPoint& minimum() const { return minimum_; }
    bool has_analytic_differential() const { return static_cast<bool>(differential_); }
    double fd_step() const { return fd_step_; }

private:
    ValueFn value_;
    DifferentialFn differential_;
    ChartPoint minimum_;
    double fd_step_;
};

// Axis-aligned sampling region with per-axis sample counts. Angular axes
// default to the whole circle with an endpoint-exclusive grid; linear axes
// are endpoint-inclusive.
struct SamplingRegion {
    std::vector<std::pair<double, double>> bounds;
    std::vector<int> samples;

    int dim() const { return static_cast<int>(bounds.size()); }
    void validate(const TopologyVec& topology) const;

    // Full-circle bounds for angular axes.
    static SamplingRegion box(std::vector<std::pair<double, double>> bounds,
                              std::vector<int> samples);
};

struct LambdaMu {
    double lambda = 0.0;
    double mu = 0.0;
    long sample_count = 0;
};

// One sampled D-critical point with its restricted-Hessian signature.
struct CriticalPoint {
    ChartPoint point;
    double residual;                 // |P_{D*} dV| at the point
    Eigen::VectorXd hessian_eigs;    // eigenvalues of the D-restricted Hessian
    int positive = 0;
    int negative = 0;
    int zero = 0;
    bool is_declared_minimum = false;

    bool is_minimum() const { return negative == 0 && zero == 0; }
};

struct CriticalSearchResult {
    std::vector<CriticalPoint> points;
    int seeds = 0;
    int dropped = 0; // seeds whose Newton iteration failed to converge
};

// Projected differential P_{D*}(g) dV(g) -- the constrained error covector.
CotangentCoord projected_dv(const MorseSpec& morse, const MetricField& metric,
                            const DistributionField& dist, const ChartPoint& g);

// Multi-start damped Newton on the residual r(g) = P_{D*} dV(g). Seeds are a
// per-axis grid over the region (capped at 4096) plus the declared minimum;
// converged points are deduplicated at chart distance 1e-4 and annotated with
// the D-Hessian signature. The critical set can be a continuum, so the result
// is a sample of it, not a complete description.
CriticalSearchResult find_d_critical(const MorseSpec& morse, const MetricField& metric,
                                     const DistributionField& dist,
                                     const SamplingRegion& region,
                                     const TopologyVec& topology, double tol);

// D-restricted Hessian B' H(V) B, symmetrized, with H the central-difference
// Jacobian of the differential.
Eigen::MatrixXd d_hessian(const MorseSpec& morse, const MetricField& metric,
                          const DistributionField& dist, const ChartPoint& g);

// Sampled estimates of the gain-design constants:
//   lambda = sup |P_D grad V|_I^2 / (2 V)
//   mu     = sup lambda_max( sym(B' H B), B' I B )   (generalized eigenvalue)
// over the region grid, excluding a 1e-6 ball around the minimum where the
// lambda quotient is 0/0.
LambdaMu estimate_lambda_mu(const MorseSpec& morse, const MetricField& metric,
                            const DistributionField& dist, const SamplingRegion& region,
                            const TopologyVec& topology);

} // namespace geopid
