#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "geopid/chart.hpp"
#include "geopid/metric.hpp"

namespace geopid {

// Constraint distribution g -> D(g) = span of the columns of B(g), a smooth
// n x k basis of constant rank k. Optional analytic partial derivatives of B
// accelerate the dynamics; otherwise central differences are used.
class DistributionField {
public:
    using BasisFn = std::function<Eigen::MatrixXd(const ChartPoint&)>;
    // partials(g)[c] = dB/dg^c at g.
    using PartialsFn = std::function<std::vector<Eigen::MatrixXd>(const ChartPoint&)>;

    DistributionField(int dim, int rank, BasisFn basis, PartialsFn partials = nullptr);

    // The full tangent bundle, B = Id (unconstrained system).
    static DistributionField full(int dim);

    int dim() const { return dim_; }
    int rank() const { return rank_; }

    // Evaluates B(g) and validates shape and rank
    // (sigma_min > 1e-8 * sigma_max).
    Eigen::MatrixXd basis(const ChartPoint& g) const;

    // dB/dg^c for every chart axis c, analytic when registered, else
    // central differences with step h.
    std::vector<Eigen::MatrixXd> basis_partials(const ChartPoint& g, double h = 1e-5) const;

    // Directional derivative D_X B = sum_c X^c dB/dg^c.
    Eigen::MatrixXd basis_directional(const ChartPoint& g, const Eigen::VectorXd& x,
                                      double h = 1e-5) const;

private:
    int dim_;
    int rank_;
    BasisFn basis_;
    PartialsFn partials_;
};

// The four projectors at one configuration. p_d / p_d_perp act on tangent
// components, p_dstar / p_dstar_perp on cotangent components. Built from the
// Gram formula P_D = B (B' I B)^{-1} B' I, which keeps the I-injectivity
// assumption an explicit invertibility check and supports degenerate I.
struct ProjectorSet {
    Eigen::MatrixXd p_d;
    Eigen::MatrixXd p_d_perp;
    Eigen::MatrixXd p_dstar;
    Eigen::MatrixXd p_dstar_perp;
};

// Condition-number ceiling for the Gram matrix B' I B.
inline constexpr double kGramConditionLimit = 1e10;

// Factored Gram matrix B' I B. Construction throws DegenerateConstraintError
// when the matrix is singular or its condition number exceeds the ceiling.
struct GramFactor {
    Eigen::MatrixXd value;
    Eigen::LDLT<Eigen::MatrixXd> solver;
};

GramFactor gram_factor(const Eigen::MatrixXd& metric_value, const Eigen::MatrixXd& basis);

ProjectorSet projectors(const MetricField& metric, const DistributionField& dist,
                        const ChartPoint& g);

// Covariant derivative of the cotangent projector P_{D*perp} regarded as a
// (1,1) tensor field, evaluated in the direction X. Entry derivatives are
// central differences with step h; the connection correction uses the
// covector convention (transposed Gamma), so for flat metrics the result is
// the plain directional derivative of the projector entries.
Eigen::MatrixXd nabla_projector(const MetricField& metric, const DistributionField& dist,
                                const ChartPoint& g, const TangentCoord& x,
                                double h = 1e-5);

// Constraint force of the Lagrange-d'Alembert split:
//   gamma_lambda = -P_{D*perp} gamma - (nabla_zeta P_{D*perp}) I zeta.
// Requires I zeta in D* to relative tolerance 1e-6; the result lies in
// D*perp.
CotangentCoord constraint_force(const MetricField& metric, const DistributionField& dist,
                                const ChartPoint& g, const TangentCoord& zeta,
                                const CotangentCoord& gamma_applied);

} // namespace geopid
