#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geopid/builtins.hpp"
#include "geopid/controller.hpp"
#include "support/test_util.hpp"

using namespace geopid;
using geopid::testing::kPi;

namespace {

const Gains kDefaultGains{20.0, 2.0, 0.5};

ChartPoint robot_point(double x, double y, double theta) {
    return ChartPoint(Eigen::Vector3d(x, y, theta),
                      {Topology::kLinear, Topology::kLinear, Topology::kAngular});
}

// Straight re-derivation of the geometric theorem's bounds; the oracle for
// certificate margins.
struct TheoremBounds {
    double delta;
    double ki_bound;
    double kp_bound;
};

TheoremBounds theorem_bounds(double kd, double ki, double lambda, double mu, double kappa) {
    TheoremBounds b{};
    b.delta = kappa * mu - 1.0;
    b.ki_bound = std::pow(kd, 3) * (1.0 - b.delta * b.delta) / mu;
    const double inner = 1.0 + (4.0 * std::pow(kd, 3) / (lambda * std::pow(ki, 3))) *
                                   (ki * ki + 4.0 * kappa * kappa * std::pow(kd, 6));
    const double second =
        (lambda * ki * ki) / (2.0 * std::pow(kd, 4)) * (1.0 + std::sqrt(inner));
    b.kp_bound = std::max(2.0 * kappa * kd * kd, second);
    return b;
}

} // namespace

TEST_CASE("pid_force: zero at the equilibrium, proportional term alone otherwise") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();

    const CotangentCoord at_e = pid_force(
        morse, robot, kDefaultGains, ClosedLoopState::at_rest(robot, robot.identity()));
    CHECK(at_e.comps.cwiseAbs().maxCoeff() < 1e-14);

    const CotangentCoord prop = pid_force(
        morse, robot, kDefaultGains, ClosedLoopState::at_rest(robot, robot_point(1, 0, 0)));
    CHECK((prop.comps - Eigen::Vector3d(-20.0, 0.0, 0.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pid_force: output always lies in D*") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const MorseSpec morse = builtin::unicycle_morse();
    testing::Rng rng(88);
    for (int trial = 0; trial < 1000; ++trial) {
        const ClosedLoopState s{rng.robot_config(), rng.vector(2, -2, 2),
                                rng.vector(2, -2, 2)};
        const CotangentCoord force = pid_force(morse, robot, kDefaultGains, s);
        const ProjectorSet p = projectors(robot.metric, robot.dist, s.g);
        CHECK((p.p_dstar_perp * force.comps).norm() < 1e-10);
    }
}

TEST_CASE("certify_geometric: the worked gain set passes") {
    const GainCertificate c = certify_geometric(kDefaultGains, 4.0, 1.0, 1.0);
    CHECK(c.pass);
    CHECK(c.delta == 0.0);

    const TheoremBounds oracle = theorem_bounds(2.0, 0.5, 4.0, 1.0, 1.0);
    CHECK(std::fabs(c.ki_bound - oracle.ki_bound) < 1e-12);
    CHECK(std::fabs(c.kp_bound - oracle.kp_bound) < 1e-12);
    CHECK(std::fabs(c.ki_margin - (oracle.ki_bound - 0.5)) < 1e-12);
    CHECK(std::fabs(c.kp_margin - (20.0 - oracle.kp_bound)) < 1e-12);
    CHECK(c.ki_bound == doctest::Approx(8.0));
    CHECK(c.kp_bound == doctest::Approx(8.0)); // 2 kappa kd^2 dominates 4.03
}

TEST_CASE("certify_geometric: failures and parameter errors") {
    const GainCertificate too_much_ki = certify_geometric({20.0, 2.0, 10.0}, 4.0, 1.0, 1.0);
    CHECK_FALSE(too_much_ki.pass);
    CHECK(too_much_ki.violated == "k_I < k_D^3 (1 - delta^2) / mu");
    CHECK(too_much_ki.ki_margin == doctest::Approx(-2.0)); // bound is 8

    CHECK_FALSE(certify_geometric({20.0, 0.0, 0.5}, 4.0, 1.0, 1.0).pass);
    CHECK_FALSE(certify_geometric({20.0, 2.0, 0.0}, 4.0, 1.0, 1.0).pass);

    CHECK_THROWS_AS(certify_geometric(kDefaultGains, 4.0, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(certify_geometric(kDefaultGains, 0.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(certify_geometric(kDefaultGains, 4.0, 1.0, 2.5), ParameterError);
    CHECK_THROWS_AS(certify_geometric(kDefaultGains, 4.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("certify_geometric: monotone in kp") {
    testing::Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const double kd = rng.uniform(0.2, 4.0);
        const double ki = rng.uniform(0.05, 3.0);
        const double lambda = rng.uniform(0.5, 6.0);
        const double mu = rng.uniform(0.5, 3.0);
        const double kappa = rng.uniform(0.05, 1.9) / mu;
        const double kp = rng.uniform(0.1, 60.0);
        const GainCertificate lo = certify_geometric({kp, kd, ki}, lambda, mu, kappa);
        const GainCertificate hi =
            certify_geometric({kp + rng.uniform(0.0, 40.0), kd, ki}, lambda, mu, kappa);
        if (lo.pass) CHECK(hi.pass);
        CHECK(hi.kp_margin >= lo.kp_margin - 1e-12);
    }
}

TEST_CASE("certify_geometric: (lambda, c mu, kappa/c) substitution reproduces margins") {
    testing::Rng rng(111);
    for (int trial = 0; trial < 200; ++trial) {
        const double kd = rng.uniform(0.3, 3.0);
        const double ki = rng.uniform(0.05, 2.0);
        const double kp = rng.uniform(0.5, 50.0);
        const double lambda = rng.uniform(0.5, 6.0);
        const double mu = rng.uniform(0.5, 3.0);
        const double kappa = rng.uniform(0.1, 1.9) / mu;
        const double c = rng.uniform(0.3, 3.0);

        const GainCertificate base = certify_geometric({kp, kd, ki}, lambda, mu, kappa);
        const GainCertificate scaled =
            certify_geometric({kp, kd, ki}, lambda, c * mu, kappa / c);

        // delta = kappa*mu is invariant, so the inequalities only move
        // through their explicit mu and kappa factors.
        CHECK(std::fabs(scaled.delta - base.delta) < 1e-12);
        const TheoremBounds oracle = theorem_bounds(kd, ki, lambda, c * mu, kappa / c);
        CHECK(std::fabs(scaled.ki_bound - oracle.ki_bound) < 1e-10);
        CHECK(std::fabs(scaled.kp_bound - oracle.kp_bound) < 1e-9);
        CHECK(std::fabs(scaled.ki_bound - base.ki_bound / c) < 1e-10);
    }
}

TEST_CASE("euclidean_design: worked example and the gamma - beta^2 identity") {
    const EuclideanDesign d = euclidean_design(kDefaultGains, 1.0);
    CHECK(d.pass);
    CHECK(d.sigma == 1.0);
    CHECK(d.alpha == doctest::Approx(0.125));
    CHECK(d.beta == doctest::Approx(0.25));
    CHECK(d.gamma == doctest::Approx(5.0625));
    CHECK(d.p_eig_min > 0.0);
    CHECK(d.q_eig_min > 0.0);
    CHECK(d.kd_margin == doctest::Approx(7.5)); // kd^3 - ki = 8 - 0.5

    testing::Rng rng(222);
    for (int trial = 0; trial < 1000; ++trial) {
        const Gains g{rng.uniform(0.1, 50.0), rng.uniform(0.1, 5.0), rng.uniform(0.05, 5.0)};
        const EuclideanDesign e = euclidean_design(g, rng.uniform(0.05, 1.95));
        const double identity = g.ki * g.kp / g.kd;
        CHECK(std::fabs((e.gamma - e.beta * e.beta) - identity) <=
              1e-12 * std::max(1.0, std::fabs(identity)));
        CHECK(e.gamma > e.beta * e.beta); // Lemma condition, automatic
    }
}

TEST_CASE("euclidean_design: kp below the bound fails with a negative margin") {
    // Q(0,0) crosses zero exactly at kp = 2 K kd^2.
    const double kd = 2.0, ki = 0.5, K = 1.0;
    const EuclideanDesign below = euclidean_design({7.9, kd, ki}, K); // bound is 8
    CHECK_FALSE(below.pass);
    CHECK(below.kp_margin < 0.0);
    CHECK(below.q_eig_min < 0.0);

    const EuclideanDesign above = euclidean_design({8.1, kd, ki}, K);
    CHECK(above.pass);
    CHECK(above.q_eig_min > 0.0);

    CHECK_THROWS_AS(euclidean_design(kDefaultGains, 0.0), ParameterError);
    CHECK_THROWS_AS(euclidean_design(kDefaultGains, 2.0), ParameterError);
    CHECK_THROWS_AS(euclidean_design({1.0, 0.0, 1.0}, 1.0), ParameterError);
}

TEST_CASE("cross-theorem consistency: geometric pass implies a Euclidean design") {
    testing::Rng rng(333);
    int passing = 0;
    while (passing < 100) {
        const double ki = rng.uniform(0.05, 2.0);
        const double kd = std::cbrt(ki) * rng.uniform(1.05, 3.0);
        const GainCertificate probe =
            certify_geometric({0.0, kd, ki}, 1.0, 1.0, 1.0); // only for the bound
        const double kp = probe.kp_bound * rng.uniform(1.05, 10.0);
        const GainCertificate cert = certify_geometric({kp, kd, ki}, 1.0, 1.0, 1.0);
        if (!cert.pass) continue;
        ++passing;

        bool found = false;
        for (double K = 0.05; K < 2.0; K += 0.05) {
            const EuclideanDesign d = euclidean_design({kp, kd, ki}, K);
            if (d.p_eig_min > 0.0 && d.q_eig_min > 0.0) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("euclidean_simulate: stationary at the set point") {
    const EuclideanTrajectory t = euclidean_simulate(
        kDefaultGains, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 1.0, 1e-2);
    for (const auto& e : t.e) CHECK(e.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& z : t.z) CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("euclidean_simulate: constant disturbance parks the integrator at D/ki") {
    const Gains gains{3.0, 1.0, 0.5};
    CHECK(certify_geometric(gains, 1.0, 1.0, 1.0).pass);
    const EuclideanTrajectory t = euclidean_simulate(
        gains, Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Zero(1), 60.0, 1e-3);
    CHECK(std::fabs(t.z.back()[0] - 0.6) < 1e-3);
    CHECK(std::fabs(t.e.back()[0]) < 1e-3);
}

TEST_CASE("euclidean_simulate: u' P u decreases for certified gains") {
    const Gains gains{20.0, 2.0, 0.5};
    const EuclideanTrajectory t = euclidean_simulate(
        gains, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.0), 20.0, 1e-3);
    REQUIRE(t.design.has_value());
    const Eigen::Matrix3d p = t.design->P;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const Eigen::Vector3d u(t.e[i][0], t.edot[i][0], t.z[i][0]);
        const double val = u.dot(p * u);
        CHECK(val <= prev + 1e-9);
        prev = val;
    }
}

TEST_CASE("feedforward_fr: vanishes in regulation and on flat charts") {
    const MechanicalSystem robot = builtin::unicycle_system();
    const ChartPoint g = robot_point(0.3, 0.2, 1.0);
    CHECK(feedforward_fr(robot, g, TangentCoord(Eigen::Vector3d(1, 2, 3)),
                         TangentCoord::zero(3))
              .comps.cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(feedforward_fr(robot, g, TangentCoord(Eigen::Vector3d(1, 2, 3)),
                         TangentCoord(Eigen::Vector3d(0.5, -1, 2)))
              .comps.cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("feedforward_fr: error dynamics identity on a curved toy chart") {
    // Smooth nondegenerate metric on R^2; geodesic motion for g(t) so that
    // nabla_zeta zeta = 0 along the trajectory.
    const MetricField curved(2, [](const ChartPoint& q) {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        m(0, 0) = 1.0;
        m(1, 1) = 1.0 + q[0] * q[0];
        return Eigen::MatrixXd(m);
    });
    MechanicalSystem sys{"curved-toy", linear_topology(2), curved,
                         DistributionField::full(2)};
    const MorseSpec flat_v([](const ChartPoint&) { return 0.0; },
                           ChartPoint(Eigen::Vector2d::Zero(), linear_topology(2)),
                           [](const ChartPoint&) { return CotangentCoord::zero(2); });

    ClosedLoopState s0{ChartPoint(Eigen::Vector2d(0.4, 0.1), linear_topology(2)),
                       Eigen::Vector2d(0.3, 0.5), Eigen::Vector2d::Zero()};
    const double dt = 1e-3;
    const Trajectory traj = integrate(sys, flat_v, Gains{}, s0, 1.0, dt);

    const TangentCoord zeta_r(Eigen::Vector2d(-0.2, 0.4)); // constant reference rate
    for (std::size_t i = 10; i + 10 < traj.size(); i += 37) {
        const ChartPoint& g = traj.states[i].g;
        const Eigen::VectorXd zeta = traj.states[i].u;
        const Eigen::VectorXd zeta_e = zeta - zeta_r.comps;

        // Finite-difference time derivative of zeta_E along the trajectory.
        const Eigen::VectorXd zeta_e_dot =
            (traj.states[i + 1].u - traj.states[i - 1].u) / (2.0 * dt);

        const ChristoffelTensor gamma = christoffel(curved, g);
        const Eigen::VectorXd lhs = zeta_e_dot + gamma.contract(zeta_e, zeta_e);
        // Geodesic: nabla_zeta zeta = 0, so the lemma reduces to
        // lhs = -F_r evaluated at the current configuration.
        const Eigen::VectorXd fr =
            feedforward_fr(sys, g, TangentCoord(zeta_e), zeta_r).comps;
        CHECK((lhs + fr).cwiseAbs().maxCoeff() < 1e-5);
    }
}
