#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "geopid/chart.hpp"
#include "geopid/distribution.hpp"
#include "geopid/gains.hpp"
#include "geopid/metric.hpp"
#include "geopid/morse.hpp"

namespace geopid {

// The quartet (G, ., I, D) in chart form.
struct MechanicalSystem {
    std::string name;
    TopologyVec topology;
    MetricField metric;
    DistributionField dist;

    int dim() const { return metric.dim(); }
    int rank() const { return dist.rank(); }
    ChartPoint identity() const { return ChartPoint::identity(topology); }
};

// Closed-loop state (g, zeta_E, zeta_I) in reduced coordinates: the error
// velocity and integral error are stored through their distribution
// coefficients, zeta_E = B(g) u and zeta_I = B(g) w, which keeps both
// momenta in D* exactly by construction.
struct ClosedLoopState {
    ChartPoint g;
    Eigen::VectorXd u;
    Eigen::VectorXd w;

    static ClosedLoopState at_rest(const MechanicalSystem& sys, ChartPoint g0);
};

struct StateRate {
    Eigen::VectorXd g_dot;
    Eigen::VectorXd u_dot;
    Eigen::VectorXd w_dot;
};

// Per-step trajectory diagnostics.
struct StepDiagnostics {
    double constraint_residual = 0.0; // |P_{D perp} zeta|
    double integral_residual = 0.0;   // |P_{D* perp} I zeta_I|
    double lyapunov_w = 0.0;
    Eigen::VectorXd force;            // PID force covector
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ClosedLoopState> states;
    std::vector<StepDiagnostics> diagnostics;
    bool converged = false;
    double converged_time = -1.0;

    std::size_t size() const { return times.size(); }
    const ClosedLoopState& back() const { return states.back(); }
};

// Reduced acceleration of the projected Newton equation
//   (B' I B) udot = B' gamma - B' I [ Gamma(zeta, zeta) + (D_zeta B) u ],
// zeta = B u. The reconstructed full-space acceleration satisfies the
// D*-projected Newton equation; the constraint force never appears because
// B' annihilates D*perp.
Eigen::VectorXd reduced_accel(const MechanicalSystem& sys, const ChartPoint& g,
                              const Eigen::VectorXd& u, const CotangentCoord& gamma_applied);

// Reduced form of the constrained integral-error dynamics
//   I nabla_{zeta_E} zeta_I = P_{D*} dV - (nabla_{zeta_E} P_{D*perp}) I zeta_I.
// The correction term is annihilated exactly by B', leaving
//   (B' I B) wdot = B' dV - B' I [ Gamma(zeta_E, zeta_I) + (D_{zeta_E} B) w ].
Eigen::VectorXd integral_error_rate(const MechanicalSystem& sys, const MorseSpec& morse,
                                    const ChartPoint& g, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& w);

// Full closed-loop right-hand side under the PID force (regulation, so
// zeta_E = zeta and the feedforward vanishes).
StateRate closed_loop_rhs(const MechanicalSystem& sys, const MorseSpec& morse,
                          const Gains& gains, const ClosedLoopState& state);

// Lyapunov function
//   W = kp V + 1/2 <zE,zE> + gamma/2 <zI,zI> + alpha <P_D grad V, zE>
//       + beta <zI,zE> + sigma <zI, P_D grad V>,
// all inner products in the metric.
double lyapunov_w(const MechanicalSystem& sys, const MorseSpec& morse, const Gains& gains,
                  const WCoeffs& coeffs, const ClosedLoopState& state);

// Fixed-step RK4 with per-step diagnostics; angles re-wrapped after every
// step. The trajectory is flagged converged once
// |P_{D*} dV| + |u| + |w| < 1e-2 is sustained for one second of simulated
// time. kappa feeds the Lyapunov coefficients recorded in the diagnostics.
Trajectory integrate(const MechanicalSystem& sys, const MorseSpec& morse,
                     const Gains& gains, const ClosedLoopState& state0, double t_end,
                     double dt, double kappa = 1.0);

} // namespace geopid
