#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geopid/builtins.hpp"
#include "geopid/controller.hpp"
#include "geopid/dynamics.hpp"
#include "support/full_space.hpp"
#include "support/test_util.hpp"

using namespace geopid;
using geopid::testing::kPi;

namespace {

const Gains kDefaultGains{20.0, 2.0, 0.5};

ChartPoint robot_point(double x, double y, double theta) {
    return ChartPoint(Eigen::Vector3d(x, y, theta),
                      {Topology::kLinear, Topology::kLinear, Topology::kAngular});
}

ClosedLoopState default_initial(const MechanicalSystem& robot) {
    return ClosedLoopState::at_rest(robot, robot_point(1.0, -0.1, 0.6));
}

testing::FullSpaceSetup robot_full_space_setup(const Gains& gains) {
    const MorseSpec morse = builtin::unicycle_morse();
    testing::FullSpaceSetup s;
    s.metric = Eigen::Matrix3d::Identity();
    s.basis = [](const Eigen::VectorXd& g) {
        Eigen::MatrixXd b(3, 2);
        b << 0.0, std::cos(g[2]), 0.0, std::sin(g[2]), 1.0, 0.0;
        return b;
    };
    s.dv = [](const Eigen::VectorXd& g) {
        return Eigen::VectorXd(Eigen::Vector3d(g[0], g[1], std::sin(g[2])));
    };
    s.force = [s, gains](const Eigen::VectorXd& g, const Eigen::VectorXd& zeta,
                         const Eigen::VectorXd& zi) {
        const Eigen::MatrixXd b = s.basis(g);
        const Eigen::MatrixXd gram = b.transpose() * b;
        const Eigen::MatrixXd pdstar = b * gram.ldlt().solve(b.transpose());
        return Eigen::VectorXd(-gains.kp * (pdstar * s.dv(g)) - gains.kd * zeta -
                               gains.ki * zi);
    };
    return s;
}

} // namespace

TEST_CASE("reduced_accel: coasting is force free") {
    const MechanicalSystem robot = builtin::unicycle_system();

    // Pure forward roll, no turn rate: straight-line coasting.
    const Eigen::VectorXd udot = reduced_accel(robot, robot_point(0.2, 0.1, 0.8),
                                               Eigen::Vector2d(0.0, 1.0),
                                               CotangentCoord::zero(3));
    CHECK(udot.cwiseAbs().maxCoeff() < 1e-12);

    // Free particle on the circle keeps constant angular speed; the groove
    // supplies the centripetal force.
    const MechanicalSystem particle = builtin::circle_particle_system();
    const ChartPoint g(Eigen::Vector2d(1.5, 0.0), linear_topology(2));
    const Eigen::VectorXd rate = reduced_accel(particle, g, Eigen::VectorXd::Constant(1, 2.0),
                                               CotangentCoord::zero(2));
    CHECK(rate.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reduced_accel: robot forced along the second basis covector") {
    const MechanicalSystem robot = builtin::unicycle_system();
    testing::Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        const ChartPoint g = rng.robot_config();
        const Eigen::VectorXd u = rng.vector(2, -1.5, 1.5);
        const Eigen::MatrixXd b = robot.dist.basis(g);
        const double c = rng.uniform(-2.0, 2.0);
        const CotangentCoord gamma(c * (robot.metric(g) * b.col(1)));

        const Eigen::VectorXd udot = reduced_accel(robot, g, u, gamma);
        // B' dB/dt is identically zero for the unicycle basis, so the
        // reduced equation collapses to G udot = B' gamma.
        const Eigen::MatrixXd gram = b.transpose() * robot.metric(g) * b;
        const Eigen::VectorXd expected = gram.ldlt().solve(b.transpose() * gamma.comps);
        CHECK((udot - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reduced_accel: cross-validated against the full-space oracle") {
    const Gains zero_gains{};
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const double dt = 1e-4, t_end = 1.0;

    // Forced motion: constant covector along the current second basis leg.
    testing::FullSpaceSetup setup = robot_full_space_setup(zero_gains);
    setup.force = [&setup](const Eigen::VectorXd& g, const Eigen::VectorXd&,
                           const Eigen::VectorXd&) {
        return Eigen::VectorXd(0.7 * setup.basis(g).col(1));
    };
    const testing::FullSpaceIntegrator oracle(setup);

    const Eigen::VectorXd g0 = Eigen::Vector3d(0.1, -0.2, 0.5);
    const Eigen::VectorXd u0 = Eigen::Vector2d(0.4, 0.3);
    const Eigen::MatrixXd b0 = setup.basis(g0);
    const auto full = oracle.integrate(g0, b0 * u0, t_end, dt);

    // Reduced path under the same force, integrated with the same scheme.
    const ChartPoint start(g0, robot.topology);
    Eigen::VectorXd y(5);
    y << g0, u0;
    const auto rhs = [&](const Eigen::VectorXd& v) {
        const ChartPoint g(v.head(3), robot.topology);
        const Eigen::MatrixXd b = robot.dist.basis(g);
        const CotangentCoord gamma(Eigen::VectorXd(0.7 * b.col(1)));
        Eigen::VectorXd out(5);
        out.head(3) = b * v.tail(2);
        out.tail(2) = reduced_accel(robot, g, v.tail(2), gamma);
        return out;
    };
    const long steps = static_cast<long>(std::llround(t_end / dt));
    for (long i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = rhs(y);
        const Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK((y.head(3) - full.g.back()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("integral_error_rate: fixed points and the Euclidean reduction") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();

    // At a D-critical point with w = 0 the integrator is at rest.
    const Eigen::VectorXd at_critical = integral_error_rate(
        robot, morse, robot_point(0.0, 1.3, 0.0), Eigen::Vector2d::Zero(),
        Eigen::Vector2d::Zero());
    CHECK(at_critical.cwiseAbs().maxCoeff() < 1e-14);

    // Unconstrained Euclidean case recovers zdot = e.
    const MechanicalSystem euclid = builtin::euclidean_system(2);
    const MorseSpec emorse = builtin::euclidean_morse(2, Eigen::VectorXd::Zero(2));
    const ChartPoint x(Eigen::Vector2d(0.7, -0.4), linear_topology(2));
    const Eigen::VectorXd wdot = integral_error_rate(euclid, emorse, x,
                                                     Eigen::Vector2d(0.1, 0.2),
                                                     Eigen::Vector2d(-0.3, 0.5));
    CHECK((wdot - x.coords()).cwiseAbs().maxCoeff() < 1e-14);

    // Worked robot value at (1, 0, 0): wdot = (0, 1) in (thetadot, v) order.
    const Eigen::VectorXd w1 = integral_error_rate(robot, morse, robot_point(1, 0, 0),
                                                   Eigen::Vector2d::Zero(),
                                                   Eigen::Vector2d::Zero());
    CHECK((w1 - Eigen::Vector2d(0.0, 1.0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("integral_error_rate: matches full-space propagation of the integral law") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const Gains gains = kDefaultGains;
    const double dt = 1e-3, t_end = 1.0;

    const auto oracle =
        testing::FullSpaceIntegrator(robot_full_space_setup(gains))
            .integrate(Eigen::Vector3d(1.0, -0.1, 0.6), Eigen::Vector3d::Zero(), t_end, dt);
    const Trajectory reduced = integrate(robot, morse, gains, default_initial(robot),
                                         t_end, dt);

    const ClosedLoopState& last = reduced.back();
    const Eigen::MatrixXd b = robot.dist.basis(last.g);
    CHECK(testing::chart_max_diff(last.g, ChartPoint(oracle.g.back(), robot.topology)) <
          1e-6);
    CHECK((b * last.w - oracle.zeta_i.back()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((b * last.u - oracle.zeta.back()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("closed_loop_rhs: equilibria of the closed loop") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();

    const StateRate at_e = closed_loop_rhs(
        robot, morse, kDefaultGains, ClosedLoopState::at_rest(robot, robot.identity()));
    CHECK(at_e.g_dot.cwiseAbs().maxCoeff() == 0.0);
    CHECK(at_e.u_dot.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(at_e.w_dot.cwiseAbs().maxCoeff() < 1e-14);

    // theta = pi lies in the D-critical set C: also an equilibrium.
    const StateRate at_pi = closed_loop_rhs(
        robot, morse, kDefaultGains,
        ClosedLoopState::at_rest(robot, robot_point(0.0, 0.0, kPi)));
    CHECK(at_pi.u_dot.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(at_pi.w_dot.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("closed_loop_rhs: default initial condition, single-step values") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const StateRate rate = closed_loop_rhs(robot, morse, kDefaultGains, default_initial(robot));

    // With zero velocities, udot = -(B'IB)^{-1} B' kp P_{D*} dV evaluated by
    // hand: B'dV = (sin 0.6, cos 0.6 - 0.1 sin 0.6).
    const double s = std::sin(0.6), c = std::cos(0.6);
    const Eigen::Vector2d expected = -20.0 * Eigen::Vector2d(s, c - 0.1 * s);
    CHECK((rate.u_dot - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rate.g_dot.cwiseAbs().maxCoeff() == 0.0);
    CHECK((rate.w_dot - Eigen::Vector2d(s, c - 0.1 * s)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed_loop_rhs: reduces to the classical Euclidean PID ODE") {
    const int n = 2;
    const MechanicalSystem sys = builtin::euclidean_system(n);
    const MorseSpec morse = builtin::euclidean_morse(n, Eigen::VectorXd::Zero(n));
    const Gains gains{5.0, 1.5, 0.7};
    testing::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const ClosedLoopState s{ChartPoint(rng.vector(n, -2, 2), linear_topology(n)),
                                rng.vector(n, -2, 2), rng.vector(n, -2, 2)};
        const StateRate rate = closed_loop_rhs(sys, morse, gains, s);
        const Eigen::VectorXd e = s.g.coords();
        CHECK((rate.g_dot - s.u).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((rate.u_dot - (-gains.kp * e - gains.kd * s.u - gains.ki * s.w))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK((rate.w_dot - e).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("integrate: stationary when unforced") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const ClosedLoopState s0 = default_initial(robot);
    const Trajectory traj = integrate(robot, morse, Gains{}, s0, 1.0, 1e-2);
    CHECK(testing::chart_max_diff(traj.back().g, s0.g) == 0.0);
    CHECK(traj.back().u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.back().w.cwiseAbs().maxCoeff() == 0.0);
    // Zero gains make W identically zero here; also no convergence claim.
    CHECK_FALSE(traj.converged);
}

TEST_CASE("integrate: RK4 order via Richardson on the robot benchmark") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const ClosedLoopState s0 = default_initial(robot);
    const double t_end = 2.0;

    const auto final_packed = [&](double dt) {
        const Trajectory t = integrate(robot, morse, kDefaultGains, s0, t_end, dt);
        Eigen::VectorXd y(7);
        y << t.back().g.coords(), t.back().u, t.back().w;
        return y;
    };
    const Eigen::VectorXd y1 = final_packed(1e-2);
    const Eigen::VectorXd y2 = final_packed(5e-3);
    const Eigen::VectorXd y3 = final_packed(2.5e-3);
    const double order = std::log2((y1 - y2).norm() / (y2 - y3).norm());
    CHECK(order >= 3.5);
}

TEST_CASE("integrate: default unicycle scenario approaches the critical set") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const Trajectory traj = integrate(robot, morse, kDefaultGains, default_initial(robot),
                                      120.0, 1e-2);
    CHECK(traj.converged);
    CHECK(traj.converged_time > 0.0);
    CHECK(std::fabs(traj.back().g[0]) < 1e-2);
    CHECK(std::fabs(std::sin(traj.back().g[2])) < 1e-2);
}

TEST_CASE("integrate: per-step constraint and integral containment") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const Trajectory traj = integrate(robot, morse, kDefaultGains, default_initial(robot),
                                      10.0, 1e-3);
    double w_prev = traj.diagnostics.front().lyapunov_w;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const StepDiagnostics& d = traj.diagnostics[i];
        CHECK(d.constraint_residual <= 1e-9);
        CHECK(d.integral_residual <= 1e-9);
        // Certified gains: W never increases beyond the per-step slack.
        CHECK(d.lyapunov_w <= w_prev + 1e-9);
        w_prev = d.lyapunov_w;

        // The literal chart residual of the rolling constraint.
        const ClosedLoopState& s = traj.states[i];
        const Eigen::VectorXd zeta = robot.dist.basis(s.g) * s.u;
        CHECK(std::fabs(zeta[0] * std::sin(s.g[2]) - zeta[1] * std::cos(s.g[2])) <= 1e-9);
    }
}

TEST_CASE("integrate: kinetic energy is conserved in free motion") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    ClosedLoopState s0 = default_initial(robot);
    s0.u = Eigen::Vector2d(0.8, 1.1); // spinning and rolling

    const Trajectory traj = integrate(robot, morse, Gains{}, s0, 10.0, 1e-3);
    const auto kinetic = [&](const ClosedLoopState& s) {
        const Eigen::MatrixXd b = robot.dist.basis(s.g);
        return 0.5 * (b * s.u).squaredNorm();
    };
    const double e0 = kinetic(traj.states.front());
    for (const ClosedLoopState& s : traj.states) {
        CHECK(std::fabs(kinetic(s) - e0) < 1e-6 * std::max(1.0, e0));
    }
}

TEST_CASE("integrate: full geometric pipeline matches the direct Euclidean ODE") {
    const int n = 2;
    const MechanicalSystem sys = builtin::euclidean_system(n);
    const MorseSpec morse = builtin::euclidean_morse(n, Eigen::VectorXd::Zero(n));
    const Gains gains{3.0, 1.0, 0.5};
    const Eigen::VectorXd x0 = Eigen::Vector2d(1.0, -0.5);
    const double t_end = 10.0, dt = 1e-3;

    const Trajectory geo = integrate(
        sys, morse, gains, ClosedLoopState::at_rest(sys, ChartPoint(x0, sys.topology)),
        t_end, dt);
    const EuclideanTrajectory ode =
        euclidean_simulate(gains, Eigen::VectorXd::Zero(n), x0, t_end, dt);

    REQUIRE(geo.size() == ode.times.size());
    double max_diff = 0.0;
    for (std::size_t i = 0; i < geo.size(); ++i) {
        max_diff = std::max(max_diff,
                            (geo.states[i].g.coords() - ode.e[i]).cwiseAbs().maxCoeff());
        max_diff = std::max(max_diff, (geo.states[i].u - ode.edot[i]).cwiseAbs().maxCoeff());
        max_diff = std::max(max_diff, (geo.states[i].w - ode.z[i]).cwiseAbs().maxCoeff());
    }
    CHECK(max_diff <= 1e-8);
}

TEST_CASE("integrate: full-space closed loop with explicit constraint force drifts slowly") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const testing::FullSpaceIntegrator oracle(robot_full_space_setup(kDefaultGains));
    const auto full = oracle.integrate(Eigen::Vector3d(1.0, -0.1, 0.6),
                                       Eigen::Vector3d::Zero(), 10.0, 1e-3);
    double max_residual = 0.0;
    for (std::size_t i = 0; i < full.times.size(); ++i) {
        const double th = full.g[i][2];
        max_residual = std::max(
            max_residual,
            std::fabs(full.zeta[i][0] * std::sin(th) - full.zeta[i][1] * std::cos(th)));
    }
    CHECK(max_residual <= 1e-6);

    // And it tracks the reduced-coordinate path.
    const MorseSpec morse = builtin::unicycle_morse();
    const Trajectory reduced =
        integrate(robot, morse, kDefaultGains, default_initial(robot), 10.0, 1e-3);
    CHECK(testing::chart_max_diff(reduced.back().g,
                                  ChartPoint(full.g.back(), robot.topology)) < 1e-5);
}

TEST_CASE("integrate: rejects bad parameters and non-finite states") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const ClosedLoopState s0 = default_initial(robot);
    CHECK_THROWS_AS(integrate(robot, morse, kDefaultGains, s0, -1.0, 1e-3), ParameterError);
    CHECK_THROWS_AS(integrate(robot, morse, kDefaultGains, s0, 1.0, 0.0), ParameterError);

    // Negative gains destabilize the loop until the state overflows.
    const Gains unstable{-80.0, -80.0, 0.0};
    ClosedLoopState kicked = s0;
    kicked.u = Eigen::Vector2d(1.0, 1.0);
    CHECK_THROWS_AS(integrate(robot, morse, unstable, kicked, 50.0, 1e-2), NonFiniteError);
}

TEST_CASE("reduced dynamics run on a degenerate metric with analytic symbols") {
    // Rank-1 metric: full-space inversion is impossible, the reduced path is
    // the only one available and needs nothing beyond B' I B.
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = 1.0;
    const MetricField metric(
        2, [m](const ChartPoint&) { return Eigen::MatrixXd(m); },
        [](const ChartPoint&) { return ChristoffelTensor::zero(2); });
    const DistributionField dist(2, 1, [](const ChartPoint&) {
        Eigen::MatrixXd b(2, 1);
        b << 1.0, 0.0;
        return b;
    });
    MechanicalSystem sys{"degenerate-toy", linear_topology(2), metric, dist};
    const MorseSpec morse(
        [](const ChartPoint& g) { return 0.5 * g[0] * g[0]; },
        ChartPoint(Eigen::Vector2d::Zero(), linear_topology(2)),
        [](const ChartPoint& g) { return CotangentCoord(Eigen::Vector2d(g[0], 0.0)); });

    const ChartPoint g(Eigen::Vector2d(0.7, 0.3), linear_topology(2));
    const Eigen::VectorXd udot =
        reduced_accel(sys, g, Eigen::VectorXd::Zero(1),
                      CotangentCoord(Eigen::Vector2d(2.0, 0.0)));
    CHECK(udot[0] == doctest::Approx(2.0));

    const Gains gains{3.0, 1.0, 0.5};
    const ClosedLoopState s0{g, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    const Trajectory traj = integrate(sys, morse, gains, s0, 20.0, 1e-3);
    CHECK(std::fabs(traj.back().g[0]) < 1e-2);
    CHECK(traj.back().g[1] == 0.3); // null direction never moves
}

TEST_CASE("lyapunov_w: anchor values") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    const WCoeffs coeffs = WCoeffs::from_gains(kDefaultGains, 1.0);

    CHECK(lyapunov_w(robot, morse, kDefaultGains, coeffs,
                     ClosedLoopState::at_rest(robot, robot.identity())) == 0.0);

    const ClosedLoopState rest = default_initial(robot);
    CHECK(lyapunov_w(robot, morse, kDefaultGains, coeffs, rest) ==
          doctest::Approx(kDefaultGains.kp * morse.value(rest.g)).epsilon(1e-14));
}
