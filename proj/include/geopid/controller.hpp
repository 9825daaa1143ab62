#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "geopid/chart.hpp"
#include "geopid/dynamics.hpp"
#include "geopid/gains.hpp"
#include "geopid/morse.hpp"

namespace geopid {

// Outcome of the geometric gain theorem
//   0 < k_D
//   0 < k_I < k_D^3 (1 - delta^2) / mu
//   k_P > max[ 2 kappa k_D^2,
//              (lambda k_I^2 / 2 k_D^4)(1 + sqrt(1 + (4 k_D^3 / lambda k_I^3)
//                                                    (k_I^2 + 4 kappa^2 k_D^6))) ]
// with 0 < kappa < 2/mu and delta = kappa mu - 1. Margins are the slack of
// each strict inequality; the verdict passes iff every margin is positive.
struct GainCertificate {
    Gains gains;
    double lambda = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
    double delta = 0.0;

    double kd_margin = 0.0;     // k_D - 0
    double ki_margin_low = 0.0; // k_I - 0
    double ki_bound = 0.0;      // k_D^3 (1 - delta^2) / mu
    double ki_margin = 0.0;     // ki_bound - k_I
    double kp_bound = 0.0;      // max of the two k_P lower bounds
    double kp_margin = 0.0;     // k_P - kp_bound

    bool pass = false;
    std::string violated; // name of the first violated inequality, empty when pass
};

// The Euclidean Lyapunov design: coefficient selection, the W-matrix P and
// the -2*Wdot matrix Q after freezing the coefficients, and the three
// gain conditions of the Euclidean stability theorem.
struct EuclideanDesign {
    Gains gains;
    double K = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    Eigen::Matrix3d P;
    Eigen::Matrix3d Q;

    double kd_margin = 0.0; // k_D^3 - k_I/(1 - delta^2)
    double kp_bound = 0.0;
    double kp_margin = 0.0;
    double p_eig_min = 0.0;
    double q_eig_min = 0.0;
    bool pass = false;
};

// Trajectory of the Euclidean PID loop (e, edot, z). Integrated directly
// from the second-order ODE so it can serve as an independent oracle for the
// geometric pipeline.
struct EuclideanTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> e;
    std::vector<Eigen::VectorXd> edot;
    std::vector<Eigen::VectorXd> z;
    std::optional<EuclideanDesign> design;
};

// PID force covector
//   P_{D*} gamma = -k_p P_{D*} dV - k_d I zeta_E - k_i I zeta_I
// (regulation, so the feedforward term is zero). Every term lies in D*.
CotangentCoord pid_force(const MorseSpec& morse, const MechanicalSystem& sys,
                         const Gains& gains, const ClosedLoopState& state);

// Evaluates the geometric gain theorem. lambda, mu must be positive and
// kappa must lie in (0, 2/mu); nonpositive k_D or k_I yield a failed
// certificate rather than an error.
GainCertificate certify_geometric(const Gains& gains, double lambda, double mu,
                                  double kappa);

// Euclidean coefficient selection and positive-definiteness analysis for
// 0 < K < 2 and positive gains.
EuclideanDesign euclidean_design(const Gains& gains, double K);

// RK4 integration of  e'' = D - k_P e - k_D e' - k_I z,  z' = e  with a
// constant disturbance D. x0 is the initial error (initial velocity and
// integral state are zero). Runs regardless of certification; the design for
// K = 1 is attached when the gains admit one.
EuclideanTrajectory euclidean_simulate(const Gains& gains, const Eigen::VectorXd& disturbance,
                                       const Eigen::VectorXd& x0, double t_end, double dt);

// Feedforward force of the error-dynamics lemma for time-varying references
// on the abelian product chart (eta_r = zeta_r):
//   F_r = nabla_{zeta_E} eta_r + nabla_{eta_r} zeta_E + nabla_{eta_r} eta_r,
// with constant-component fields, evaluated at the given configuration.
// Zero whenever zeta_r = 0 (regulation) or the chart is flat.
TangentCoord feedforward_fr(const MechanicalSystem& sys, const ChartPoint& at,
                            const TangentCoord& zeta_e, const TangentCoord& zeta_r);

} // namespace geopid
