#include "geopid/controller.hpp"

#include <cmath>
#include <limits>

#include "geopid/errors.hpp"

namespace geopid {

CotangentCoord pid_force(const MorseSpec& morse, const MechanicalSystem& sys,
                         const Gains& gains, const ClosedLoopState& state) {
    const Eigen::MatrixXd b = sys.dist.basis(state.g);
    const Eigen::MatrixXd m = sys.metric(state.g);
    const GramFactor gram = gram_factor(m, b);
    const Eigen::VectorXd dv = morse.differential(state.g).comps;
    const Eigen::VectorXd pdv = m * (b * gram.solver.solve(b.transpose() * dv));
    return CotangentCoord(-gains.kp * pdv - gains.kd * (m * (b * state.u)) -
                          gains.ki * (m * (b * state.w)));
}

GainCertificate certify_geometric(const Gains& gains, double lambda, double mu,
                                  double kappa) {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !(mu > 0.0) || !std::isfinite(mu)) {
        throw ParameterError("certify_geometric: lambda and mu must be positive");
    }
    if (!(kappa > 0.0) || !(kappa < 2.0 / mu)) {
        throw ParameterError("certify_geometric: kappa must lie in (0, 2/mu)");
    }

    GainCertificate c;
    c.gains = gains;
    c.lambda = lambda;
    c.mu = mu;
    c.kappa = kappa;
    c.delta = kappa * mu - 1.0;

    const double kp = gains.kp, kd = gains.kd, ki = gains.ki;
    c.kd_margin = kd;
    c.ki_margin_low = ki;

    if (kd > 0.0 && ki > 0.0) {
        c.ki_bound = kd * kd * kd * (1.0 - c.delta * c.delta) / mu;
        c.ki_margin = c.ki_bound - ki;
        const double bound_a = 2.0 * kappa * kd * kd;
        const double kd3 = kd * kd * kd;
        const double kd4 = kd3 * kd;
        const double kd6 = kd3 * kd3;
        const double bound_b =
            lambda * ki * ki / (2.0 * kd4) *
            (1.0 + std::sqrt(1.0 + 4.0 * kd3 / (lambda * ki * ki * ki) *
                                       (ki * ki + 4.0 * kappa * kappa * kd6)));
        c.kp_bound = std::max(bound_a, bound_b);
        c.kp_margin = kp - c.kp_bound;
    } else {
        c.ki_bound = std::numeric_limits<double>::quiet_NaN();
        c.ki_margin = -std::numeric_limits<double>::infinity();
        c.kp_bound = std::numeric_limits<double>::quiet_NaN();
        c.kp_margin = -std::numeric_limits<double>::infinity();
    }

    if (!(c.kd_margin > 0.0)) {
        c.violated = "0 < k_D";
    } else if (!(c.ki_margin_low > 0.0)) {
        c.violated = "0 < k_I";
    } else if (!(c.ki_margin > 0.0)) {
        c.violated = "k_I < k_D^3 (1 - delta^2) / mu";
    } else if (!(c.kp_margin > 0.0)) {
        c.violated = "k_P > max(2 kappa k_D^2, lambda-bound)";
    }
    c.pass = c.violated.empty();
    return c;
}

EuclideanDesign euclidean_design(const Gains& gains, double K) {
    if (!(gains.kp > 0.0) || !(gains.kd > 0.0) || !(gains.ki > 0.0)) {
        throw ParameterError("euclidean_design: gains must be positive");
    }
    if (!(K > 0.0) || !(K < 2.0)) {
        throw ParameterError("euclidean_design: K must lie in (0, 2)");
    }

    EuclideanDesign d;
    d.gains = gains;
    d.K = K;
    const WCoeffs c = WCoeffs::from_gains(gains, K);
    d.alpha = c.alpha;
    d.beta = c.beta;
    d.gamma = c.gamma;
    d.sigma = c.sigma;

    const double kp = gains.kp, kd = gains.kd, ki = gains.ki;
    d.P << kp, d.alpha, d.sigma,
           d.alpha, 1.0, d.beta,
           d.sigma, d.beta, d.gamma;
    d.Q << 2.0 * (kp * ki / (kd * kd) - d.sigma), 0.0, 0.0,
           0.0, 2.0 * (kd - ki / (kd * kd)), 2.0 * ki - d.sigma,
           0.0, 2.0 * ki - d.sigma, 2.0 * ki * ki / kd;

    const double delta = K - 1.0;
    const double kd3 = kd * kd * kd;
    d.kd_margin = kd3 - ki / (1.0 - delta * delta);
    const double kd5 = kd3 * kd * kd;
    const double kd6 = kd3 * kd3;
    d.kp_bound = std::max(2.0 * K * kd * kd,
                          std::sqrt((ki * ki * ki + 4.0 * K * K * ki * kd6 +
                                     4.0 * K * ki * ki * kd3) /
                                    kd5));
    d.kp_margin = kp - d.kp_bound;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ep(d.P, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eq(d.Q, Eigen::EigenvaluesOnly);
    d.p_eig_min = ep.eigenvalues().minCoeff();
    d.q_eig_min = eq.eigenvalues().minCoeff();

    d.pass = d.kd_margin > 0.0 && d.kp_margin > 0.0;
    return d;
}

EuclideanTrajectory euclidean_simulate(const Gains& gains, const Eigen::VectorXd& disturbance,
                                       const Eigen::VectorXd& x0, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) {
        throw ParameterError("euclidean_simulate: dt and t_end must be positive");
    }
    const int n = static_cast<int>(x0.size());
    if (disturbance.size() != n) {
        throw DimensionError("euclidean_simulate: disturbance has wrong dimension");
    }

    // Independent RK4 on the packed state [e; edot; z].
    const auto rhs = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd out(3 * n);
        out.head(n) = y.segment(n, n);
        out.segment(n, n) = disturbance - gains.kp * y.head(n) -
                            gains.kd * y.segment(n, n) - gains.ki * y.tail(n);
        out.tail(n) = y.head(n);
        return out;
    };

    Eigen::VectorXd y = Eigen::VectorXd::Zero(3 * n);
    y.head(n) = x0;

    EuclideanTrajectory traj;
    const long steps = static_cast<long>(std::llround(t_end / dt));
    traj.times.reserve(static_cast<std::size_t>(steps + 1));
    const auto record = [&](double t) {
        traj.times.push_back(t);
        traj.e.push_back(y.head(n));
        traj.edot.push_back(y.segment(n, n));
        traj.z.push_back(y.tail(n));
    };
    record(0.0);
    for (long i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = rhs(y);
        const Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) {
            throw NonFiniteError("euclidean_simulate: state left the finite range");
        }
        record(static_cast<double>(i + 1) * dt);
    }

    if (gains.kp > 0.0 && gains.kd > 0.0 && gains.ki > 0.0) {
        traj.design = euclidean_design(gains, 1.0);
    }
    return traj;
}

TangentCoord feedforward_fr(const MechanicalSystem& sys, const ChartPoint& at,
                            const TangentCoord& zeta_e, const TangentCoord& zeta_r) {
    if (zeta_e.dim() != sys.dim() || zeta_r.dim() != sys.dim()) {
        throw DimensionError("feedforward_fr: velocity has wrong dimension");
    }
    if (zeta_r.comps.isZero(0.0)) {
        return TangentCoord::zero(sys.dim()); // regulation corollary
    }
    const ChristoffelTensor gamma = christoffel(sys.metric, at);
    const Eigen::VectorXd& eta_r = zeta_r.comps; // Ad is the identity here
    return TangentCoord(gamma.contract(zeta_e.comps, eta_r) +
                        gamma.contract(eta_r, zeta_e.comps) +
                        gamma.contract(eta_r, eta_r));
}

} // namespace geopid
