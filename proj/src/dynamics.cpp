#include "geopid/dynamics.hpp"

#include <cmath>

#include "geopid/errors.hpp"

namespace geopid {

namespace {

// Everything the right-hand side needs at one configuration.
struct Frame {
    Eigen::MatrixXd b;
    Eigen::MatrixXd m;
    GramFactor gram;
    ChristoffelTensor gamma;
};

Frame make_frame(const MechanicalSystem& sys, const ChartPoint& g) {
    Frame f;
    f.b = sys.dist.basis(g);
    f.m = sys.metric(g);
    f.gram = gram_factor(f.m, f.b);
    f.gamma = christoffel(sys.metric, g);
    return f;
}

Eigen::VectorXd reduced_accel_impl(const MechanicalSystem& sys, const Frame& f,
                                   const ChartPoint& g, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& bt_gamma) {
    const Eigen::VectorXd zeta = f.b * u;
    Eigen::VectorXd drift = f.gamma.contract(zeta, zeta);
    drift += sys.dist.basis_directional(g, zeta) * u;
    return f.gram.solver.solve(bt_gamma - f.b.transpose() * (f.m * drift));
}

Eigen::VectorXd integral_rate_impl(const MechanicalSystem& sys, const Frame& f,
                                   const ChartPoint& g, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& w, const Eigen::VectorXd& dv) {
    const Eigen::VectorXd zeta_e = f.b * u;
    const Eigen::VectorXd zeta_i = f.b * w;
    Eigen::VectorXd drift = f.gamma.contract(zeta_e, zeta_i);
    drift += sys.dist.basis_directional(g, zeta_e) * w;
    return f.gram.solver.solve(f.b.transpose() * dv -
                               f.b.transpose() * (f.m * drift));
}

StateRate rhs_impl(const MechanicalSystem& sys, const MorseSpec& morse, const Gains& gains,
                   const Frame& f, const ClosedLoopState& s) {
    const Eigen::VectorXd dv = morse.differential(s.g).comps;
    // B' of the PID covector: B' P_{D*} dV = B' dV and B' I B u = G u.
    const Eigen::VectorXd bt_force = -gains.kp * (f.b.transpose() * dv) -
                                     gains.kd * (f.gram.value * s.u) -
                                     gains.ki * (f.gram.value * s.w);
    StateRate rate;
    rate.g_dot = f.b * s.u;
    rate.u_dot = reduced_accel_impl(sys, f, s.g, s.u, bt_force);
    // With no integral gain the integrator state feeds nothing; keep it
    // frozen so an all-zero-gain run is plain free mechanics.
    rate.w_dot = gains.ki != 0.0 ? integral_rate_impl(sys, f, s.g, s.u, s.w, dv)
                                 : Eigen::VectorXd::Zero(s.w.size());
    return rate;
}

} // namespace

ClosedLoopState ClosedLoopState::at_rest(const MechanicalSystem& sys, ChartPoint g0) {
    return ClosedLoopState{std::move(g0), Eigen::VectorXd::Zero(sys.rank()),
                           Eigen::VectorXd::Zero(sys.rank())};
}

Eigen::VectorXd reduced_accel(const MechanicalSystem& sys, const ChartPoint& g,
                              const Eigen::VectorXd& u,
                              const CotangentCoord& gamma_applied) {
    const Frame f = make_frame(sys, g);
    return reduced_accel_impl(sys, f, g, u, f.b.transpose() * gamma_applied.comps);
}

Eigen::VectorXd integral_error_rate(const MechanicalSystem& sys, const MorseSpec& morse,
                                    const ChartPoint& g, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& w) {
    const Frame f = make_frame(sys, g);
    return integral_rate_impl(sys, f, g, u, w, morse.differential(g).comps);
}

StateRate closed_loop_rhs(const MechanicalSystem& sys, const MorseSpec& morse,
                          const Gains& gains, const ClosedLoopState& state) {
    const Frame f = make_frame(sys, state.g);
    return rhs_impl(sys, morse, gains, f, state);
}

double lyapunov_w(const MechanicalSystem& sys, const MorseSpec& morse, const Gains& gains,
                  const WCoeffs& coeffs, const ClosedLoopState& state) {
    const Frame f = make_frame(sys, state.g);
    const Eigen::VectorXd dv = morse.differential(state.g).comps;
    const Eigen::VectorXd gu = f.gram.value * state.u;
    const Eigen::VectorXd gw = f.gram.value * state.w;
    const Eigen::VectorXd bdv = f.b.transpose() * dv;
    // <P_D grad V, B x> = dV' B x because P_D B = B and P_D' I = I P_D.
    return gains.kp * morse.value(state.g) + 0.5 * state.u.dot(gu) +
           0.5 * coeffs.gamma * state.w.dot(gw) + coeffs.alpha * bdv.dot(state.u) +
           coeffs.beta * state.w.dot(gu) + coeffs.sigma * bdv.dot(state.w);
}

Trajectory integrate(const MechanicalSystem& sys, const MorseSpec& morse,
                     const Gains& gains, const ClosedLoopState& state0, double t_end,
                     double dt, double kappa) {
    if (!(dt > 0.0) || !(t_end > 0.0)) {
        throw ParameterError("integrate: dt and t_end must be positive");
    }
    const int n = sys.dim();
    const int k = sys.rank();
    if (state0.g.dim() != n || state0.u.size() != k || state0.w.size() != k) {
        throw DimensionError("integrate: initial state has wrong shape");
    }
    const WCoeffs coeffs = WCoeffs::from_gains(gains, kappa);
    const long steps = static_cast<long>(std::llround(t_end / dt));

    // Integration runs on the raw packed vector [g; u; w]; ChartPoints are
    // built (and wrapped) only at evaluation sites, and the stored state is
    // re-wrapped once per step.
    Eigen::VectorXd y(n + 2 * k);
    y << state0.g.coords(), state0.u, state0.w;

    const auto unpack = [&](const Eigen::VectorXd& v) {
        return ClosedLoopState{ChartPoint(v.head(n), sys.topology), v.segment(n, k),
                               v.tail(k)};
    };
    const auto eval = [&](const Eigen::VectorXd& v) {
        if (!v.allFinite()) {
            throw NonFiniteError("integrate: state left the finite range");
        }
        const ClosedLoopState s = unpack(v);
        const StateRate r = closed_loop_rhs(sys, morse, gains, s);
        Eigen::VectorXd out(n + 2 * k);
        out << r.g_dot, r.u_dot, r.w_dot;
        return out;
    };

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(steps + 1));
    traj.states.reserve(static_cast<std::size_t>(steps + 1));
    traj.diagnostics.reserve(static_cast<std::size_t>(steps + 1));

    double sustained_since = -1.0;
    const double conv_threshold = 1e-2;
    const double conv_hold = 1.0;

    const auto record = [&](double t, const ClosedLoopState& s) {
        const Frame f = make_frame(sys, s.g);
        const Eigen::VectorXd dv = morse.differential(s.g).comps;
        const Eigen::VectorXd zeta = f.b * s.u;
        const Eigen::VectorXd momentum_i = f.m * (f.b * s.w);

        StepDiagnostics d;
        d.constraint_residual =
            (zeta - f.b * f.gram.solver.solve(f.b.transpose() * (f.m * zeta))).norm();
        d.integral_residual =
            (momentum_i -
             f.m * (f.b * f.gram.solver.solve(f.b.transpose() * momentum_i)))
                .norm();
        d.lyapunov_w = gains.kp * morse.value(s.g) +
                       0.5 * s.u.dot(f.gram.value * s.u) +
                       0.5 * coeffs.gamma * s.w.dot(f.gram.value * s.w) +
                       coeffs.alpha * (f.b.transpose() * dv).dot(s.u) +
                       coeffs.beta * s.w.dot(f.gram.value * s.u) +
                       coeffs.sigma * (f.b.transpose() * dv).dot(s.w);
        const Eigen::VectorXd pdv = f.m * (f.b * f.gram.solver.solve(f.b.transpose() * dv));
        d.force = -gains.kp * pdv - gains.kd * (f.m * zeta) - gains.ki * momentum_i;

        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.diagnostics.push_back(std::move(d));

        const double conv = pdv.norm() + s.u.norm() + s.w.norm();
        if (conv < conv_threshold) {
            if (sustained_since < 0.0) sustained_since = t;
            if (!traj.converged && t - sustained_since >= conv_hold) {
                traj.converged = true;
                traj.converged_time = sustained_since;
            }
        } else {
            sustained_since = -1.0;
        }
    };

    record(0.0, unpack(y));
    for (long i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = eval(y);
        const Eigen::VectorXd k2 = eval(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = eval(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = eval(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) {
            throw NonFiniteError("integrate: state left the finite range at t = " +
                                 std::to_string(static_cast<double>(i + 1) * dt));
        }
        const ClosedLoopState s = unpack(y);
        y.head(n) = s.g.coords(); // commit the angular wrap
        record(static_cast<double>(i + 1) * dt, s);
    }
    return traj;
}

} // namespace geopid
