#include "geopid/distribution.hpp"

#include <cmath>

#include "geopid/errors.hpp"

namespace geopid {

GramFactor gram_factor(const Eigen::MatrixXd& metric_value, const Eigen::MatrixXd& basis) {
    GramFactor g;
    g.value = basis.transpose() * metric_value * basis;
    g.value = 0.5 * (g.value + g.value.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.value, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kGramConditionLimit) {
        throw DegenerateConstraintError(
            "gram_factor: B' I B is singular or ill-conditioned "
            "(metric restricted to D is not injective here)");
    }
    g.solver.compute(g.value);
    return g;
}

DistributionField::DistributionField(int dim, int rank, BasisFn basis, PartialsFn partials)
    : dim_(dim), rank_(rank), basis_(std::move(basis)), partials_(std::move(partials)) {}

DistributionField DistributionField::full(int dim) {
    return DistributionField(
        dim, dim,
        [dim](const ChartPoint&) { return Eigen::MatrixXd::Identity(dim, dim); },
        [dim](const ChartPoint&) {
            return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(dim),
                                                Eigen::MatrixXd::Zero(dim, dim));
        });
}

Eigen::MatrixXd DistributionField::basis(const ChartPoint& g) const {
    Eigen::MatrixXd b = basis_(g);
    if (b.rows() != dim_ || b.cols() != rank_) {
        throw DimensionError("DistributionField: basis returned wrong shape");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 1e-8 * sv[0]) {
        throw DegenerateConstraintError(
            "DistributionField: basis is rank deficient at the queried point");
    }
    return b;
}

std::vector<Eigen::MatrixXd> DistributionField::basis_partials(const ChartPoint& g,
                                                               double h) const {
    if (partials_) {
        auto p = partials_(g);
        if (static_cast<int>(p.size()) != dim_) {
            throw DimensionError("DistributionField: partials returned wrong count");
        }
        return p;
    }
    std::vector<Eigen::MatrixXd> p(static_cast<std::size_t>(dim_));
    for (int c = 0; c < dim_; ++c) {
        const Eigen::MatrixXd plus = basis_(detail::displaced(g, c, h));
        const Eigen::MatrixXd minus = basis_(detail::displaced(g, c, -h));
        p[static_cast<std::size_t>(c)] = (plus - minus) / (2.0 * h);
    }
    return p;
}

Eigen::MatrixXd DistributionField::basis_directional(const ChartPoint& g,
                                                     const Eigen::VectorXd& x,
                                                     double h) const {
    const auto p = basis_partials(g, h);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, rank_);
    for (int c = 0; c < dim_; ++c) {
        if (x[c] != 0.0) out += x[c] * p[static_cast<std::size_t>(c)];
    }
    return out;
}

ProjectorSet projectors(const MetricField& metric, const DistributionField& dist,
                        const ChartPoint& g) {
    const Eigen::MatrixXd b = dist.basis(g);
    const Eigen::MatrixXd m = metric(g);
    const GramFactor gm = gram_factor(m, b);
    const int n = dist.dim();

    ProjectorSet s;
    s.p_d = b * gm.solver.solve(b.transpose() * m);
    s.p_dstar = m * b * gm.solver.solve(b.transpose());
    s.p_d_perp = Eigen::MatrixXd::Identity(n, n) - s.p_d;
    s.p_dstar_perp = Eigen::MatrixXd::Identity(n, n) - s.p_dstar;
    return s;
}

Eigen::MatrixXd nabla_projector(const MetricField& metric, const DistributionField& dist,
                                const ChartPoint& g, const TangentCoord& x, double h) {
    const int n = dist.dim();
    if (x.dim() != n) {
        throw DimensionError("nabla_projector: direction has wrong dimension");
    }
    // Directional entry derivative of P_{D*perp} by central differences.
    Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        if (x.comps[c] == 0.0) continue;
        const Eigen::MatrixXd plus =
            projectors(metric, dist, detail::displaced(g, c, h)).p_dstar_perp;
        const Eigen::MatrixXd minus =
            projectors(metric, dist, detail::displaced(g, c, -h)).p_dstar_perp;
        dp += x.comps[c] / (2.0 * h) * (plus - minus);
    }
    const ChristoffelTensor gamma = christoffel(metric, g, h);
    if (gamma.max_abs() > 0.0) {
        const Eigen::MatrixXd gx = gamma.directional(x.comps);
        const Eigen::MatrixXd q = projectors(metric, dist, g).p_dstar_perp;
        dp += q * gx.transpose() - gx.transpose() * q;
    }
    return dp;
}

CotangentCoord constraint_force(const MetricField& metric, const DistributionField& dist,
                                const ChartPoint& g, const TangentCoord& zeta,
                                const CotangentCoord& gamma_applied) {
    const Eigen::MatrixXd m = metric(g);
    const Eigen::VectorXd momentum = m * zeta.comps;
    const ProjectorSet p = projectors(metric, dist, g);

    const double residual = (p.p_dstar_perp * momentum).norm();
    if (residual > 1e-6 * (1.0 + momentum.norm())) {
        throw ConstraintViolationError(
            "constraint_force: I zeta is not in D* (residual " +
                std::to_string(residual) + ")",
            residual);
    }

    const Eigen::MatrixXd dp = nabla_projector(metric, dist, g, zeta);
    Eigen::VectorXd out = -(p.p_dstar_perp * gamma_applied.comps) - dp * momentum;
    return CotangentCoord(std::move(out));
}

} // namespace geopid
