#include "geopid/chart.hpp"

#include <cmath>
#include <numbers>

namespace geopid {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TopologyVec linear_topology(int n) {
    return TopologyVec(static_cast<std::size_t>(n), Topology::kLinear);
}

double wrap_angle(double theta) {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod can return exactly 2*pi after the correction when theta is a
    // tiny negative number.
    if (w >= kTwoPi) w -= kTwoPi;
    return w;
}

ChartPoint::ChartPoint(Eigen::VectorXd coords, TopologyVec topology)
    : coords_(std::move(coords)), topology_(std::move(topology)) {
    if (static_cast<std::size_t>(coords_.size()) != topology_.size()) {
        throw DimensionError("ChartPoint: coords length " +
                             std::to_string(coords_.size()) +
                             " does not match topology length " +
                             std::to_string(topology_.size()));
    }
    for (int i = 0; i < coords_.size(); ++i) {
        if (topology_[static_cast<std::size_t>(i)] == Topology::kAngular) {
            coords_[i] = wrap_angle(coords_[i]);
        }
    }
}

double ChartPoint::distance(const ChartPoint& other) const {
    detail::require_same_group(*this, other);
    double sq = 0.0;
    for (int i = 0; i < coords_.size(); ++i) {
        double d = coords_[i] - other.coords_[i];
        if (topology_[static_cast<std::size_t>(i)] == Topology::kAngular) {
            d = std::fabs(std::remainder(d, kTwoPi));
        }
        sq += d * d;
    }
    return std::sqrt(sq);
}

ChartPoint ChartPoint::identity(TopologyVec topology) {
    const int n = static_cast<int>(topology.size());
    return ChartPoint(Eigen::VectorXd::Zero(n), std::move(topology));
}

ChartPoint group_compose(const ChartPoint& a, const ChartPoint& b) {
    detail::require_same_group(a, b);
    return ChartPoint(a.coords() + b.coords(), a.topology());
}

ChartPoint group_inverse(const ChartPoint& a) {
    return ChartPoint(-a.coords(), a.topology());
}

ChartPoint tracking_error(const ChartPoint& g_r, const ChartPoint& g) {
    return group_compose(group_inverse(g_r), g);
}

namespace detail {

void require_same_group(const ChartPoint& a, const ChartPoint& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("group operation: dimension mismatch (" +
                             std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()) + ")");
    }
    if (a.topology() != b.topology()) {
        throw DimensionError("group operation: topology mismatch");
    }
}

} // namespace detail

} // namespace geopid
