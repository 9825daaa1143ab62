#include "geopid/builtins.hpp"

#include <cmath>

namespace geopid::builtin {

MechanicalSystem unicycle_system() {
    const TopologyVec topo{Topology::kLinear, Topology::kLinear, Topology::kAngular};
    DistributionField dist(
        3, 2,
        [](const ChartPoint& g) {
            const double th = g[2];
            Eigen::MatrixXd b(3, 2);
            b << 0.0, std::cos(th),
                 0.0, std::sin(th),
                 1.0, 0.0;
            return b;
        },
        [](const ChartPoint& g) {
            const double th = g[2];
            std::vector<Eigen::MatrixXd> p(3, Eigen::MatrixXd::Zero(3, 2));
            p[2] << 0.0, -std::sin(th),
                    0.0, std::cos(th),
                    0.0, 0.0;
            return p;
        });
    return MechanicalSystem{"unicycle", topo, MetricField::identity(3), std::move(dist)};
}

MorseSpec unicycle_morse() {
    const TopologyVec topo{Topology::kLinear, Topology::kLinear, Topology::kAngular};
    return MorseSpec(
        [](const ChartPoint& g) {
            return 0.5 * (g[0] * g[0] + g[1] * g[1]) + (1.0 - std::cos(g[2]));
        },
        ChartPoint::identity(topo),
        [](const ChartPoint& g) {
            return CotangentCoord(Eigen::Vector3d(g[0], g[1], std::sin(g[2])));
        });
}

MechanicalSystem circle_particle_system(double mass) {
    const TopologyVec topo{Topology::kLinear, Topology::kLinear};
    DistributionField dist(
        2, 1,
        [](const ChartPoint& g) {
            Eigen::MatrixXd b(2, 1);
            b << -g[1], g[0];
            return b;
        },
        [](const ChartPoint&) {
            std::vector<Eigen::MatrixXd> p(2, Eigen::MatrixXd::Zero(2, 1));
            p[0](1, 0) = 1.0;  // d/dx (-y, x)
            p[1](0, 0) = -1.0; // d/dy (-y, x)
            return p;
        });
    return MechanicalSystem{"circle-particle", topo,
                            MetricField::constant(mass * Eigen::Matrix2d::Identity()),
                            std::move(dist)};
}

MorseSpec circle_particle_morse(double radius) {
    const TopologyVec topo{Topology::kLinear, Topology::kLinear};
    return MorseSpec(
        [radius](const ChartPoint& g) {
            return 0.5 * ((g[0] - radius) * (g[0] - radius) + g[1] * g[1]);
        },
        ChartPoint(Eigen::Vector2d(radius, 0.0), topo),
        [radius](const ChartPoint& g) {
            return CotangentCoord(Eigen::Vector2d(g[0] - radius, g[1]));
        });
}

MechanicalSystem euclidean_system(int n) {
    return MechanicalSystem{"euclidean", linear_topology(n), MetricField::identity(n),
                            DistributionField::full(n)};
}

MorseSpec euclidean_morse(int n, const Eigen::VectorXd& x_d) {
    return MorseSpec(
        [x_d](const ChartPoint& g) { return 0.5 * (g.coords() - x_d).squaredNorm(); },
        ChartPoint(x_d, linear_topology(n)),
        [x_d](const ChartPoint& g) { return CotangentCoord(g.coords() - x_d); });
}

} // namespace geopid::builtin
