#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

#include "geopid/errors.hpp"

namespace geopid {

// Coordinate topology of one chart axis. Angular axes live on S^1 and are
// kept normalized to [0, 2*pi); linear axes are plain reals.
enum class Topology { kLinear, kAngular };

using TopologyVec = std::vector<Topology>;

// All-linear / all-angular helpers for common systems.
TopologyVec linear_topology(int n);

// Normalize an angle to [0, 2*pi).
double wrap_angle(double theta);

// A configuration of the product group R^a x (S^1)^b in its global chart.
// Angular coordinates are wrapped at construction and after every group
// operation, so two ChartPoints representing the same configuration compare
// equal componentwise.
class ChartPoint {
public:
    ChartPoint(Eigen::VectorXd coords, TopologyVec topology);

    const Eigen::VectorXd& coords() const { return coords_; }
    const TopologyVec& topology() const { return topology_; }
    int dim() const { return static_cast<int>(coords_.size()); }

    double operator[](int i) const { return coords_[i]; }

    // Chart distance honoring the angular wrap: angular components are
    // compared along the shorter arc.
    double distance(const ChartPoint& other) const;

    // Identity element (all coordinates zero).
    static ChartPoint identity(TopologyVec topology);

private:
    Eigen::VectorXd coords_;
    TopologyVec topology_;
};

// Chart velocity components, units 1/s. In the abelian product chart the
// left-trivialized velocity coincides with the coordinate velocity.
struct TangentCoord {
    Eigen::VectorXd comps;

    TangentCoord() = default;
    explicit TangentCoord(Eigen::VectorXd c) : comps(std::move(c)) {}
    static TangentCoord zero(int n) { return TangentCoord(Eigen::VectorXd::Zero(n)); }
    int dim() const { return static_cast<int>(comps.size()); }
};

// Force covector components.
struct CotangentCoord {
    Eigen::VectorXd comps;

    CotangentCoord() = default;
    explicit CotangentCoord(Eigen::VectorXd c) : comps(std::move(c)) {}
    static CotangentCoord zero(int n) { return CotangentCoord(Eigen::VectorXd::Zero(n)); }
    int dim() const { return static_cast<int>(comps.size()); }
};

// Group operation of the product group: linear components add, angular
// components add mod 2*pi.
ChartPoint group_compose(const ChartPoint& a, const ChartPoint& b);

// Componentwise negation, angles re-wrapped.
ChartPoint group_inverse(const ChartPoint& a);

// Left-invariant tracking error E = g_r^{-1} . g. E = identity iff g = g_r.
ChartPoint tracking_error(const ChartPoint& g_r, const ChartPoint& g);

namespace detail {
// Throws DimensionError unless both points share dimension and topology.
void require_same_group(const ChartPoint& a, const ChartPoint& b);
} // namespace detail

} // namespace geopid
