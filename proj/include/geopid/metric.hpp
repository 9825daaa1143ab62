#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "geopid/chart.hpp"

namespace geopid {

// Chart coefficients Gamma^i_{jk} of the Levi-Civita connection at a point,
// stored as one (j,k) matrix per upper index i. Symmetric in the lower pair.
struct ChristoffelTensor {
    std::vector<Eigen::MatrixXd> gamma;

    int dim() const { return static_cast<int>(gamma.size()); }

    static ChristoffelTensor zero(int n);

    // Gamma(v, w)^i = Gamma^i_{jk} v^j w^k.
    Eigen::VectorXd contract(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;

    // Directional matrix (Gamma_X)^i_j = Gamma^i_{kj} X^k, acting on vector
    // components. The covector-side correction is its transpose.
    Eigen::MatrixXd directional(const Eigen::VectorXd& x) const;

    double max_abs() const;
};

// The kinetic-energy metric tensor field g -> I(g). Values must be symmetric
// and positive semidefinite; degeneracy is allowed as long as callers never
// need a full-space inverse (analytic Christoffel symbols become mandatory
// in that case).
class MetricField {
public:
    using EvalFn = std::function<Eigen::MatrixXd(const ChartPoint&)>;
    using ChristoffelFn = std::function<ChristoffelTensor(const ChartPoint&)>;

    MetricField(int dim, EvalFn eval, ChristoffelFn analytic_christoffel = nullptr);

    static MetricField identity(int dim);
    static MetricField constant(const Eigen::MatrixXd& value);

    int dim() const { return dim_; }
    bool has_analytic_christoffel() const { return static_cast<bool>(christoffel_); }

    // Evaluates I(g) and validates symmetry (1e-12) and positive
    // semidefiniteness (eigenvalues >= -1e-10).
    Eigen::MatrixXd operator()(const ChartPoint& g) const;

    ChristoffelTensor analytic_christoffel(const ChartPoint& g) const;

private:
    int dim_;
    EvalFn eval_;
    ChristoffelFn christoffel_;
};

// Christoffel symbols at g: returns the analytic symbols when the field
// carries them, otherwise central-difference Levi-Civita symbols
// Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk})
// with step h. A degenerate metric without analytic symbols is an error.
ChristoffelTensor christoffel(const MetricField& metric, const ChartPoint& g,
                              double h = 1e-5);

// Intrinsic acceleration components (nabla_zeta zeta)^i = zdot^i +
// Gamma^i_{jk} zeta^j zeta^k.
TangentCoord covariant_accel(const ChristoffelTensor& gamma, const TangentCoord& zeta,
                             const TangentCoord& zeta_dot);

// Metric inner product <v, w>_I = v' I(g) w.
double inner(const MetricField& metric, const ChartPoint& g, const TangentCoord& v,
             const TangentCoord& w);

namespace detail {
// Displace one chart coordinate; used by every finite-difference loop.
// Periodic fields make the wrap at construction harmless.
ChartPoint displaced(const ChartPoint& g, int axis, double delta);

// True when the smallest eigenvalue is below rel_tol times the largest,
// i.e. the matrix cannot be inverted reliably.
bool nearly_singular(const Eigen::MatrixXd& sym, double rel_tol = 1e-10);
} // namespace detail

} // namespace geopid
