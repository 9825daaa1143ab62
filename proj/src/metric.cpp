#include "geopid/metric.hpp"

#include <cmath>

#include "geopid/errors.hpp"

namespace geopid {

ChristoffelTensor ChristoffelTensor::zero(int n) {
    ChristoffelTensor t;
    t.gamma.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    return t;
}

Eigen::VectorXd ChristoffelTensor::contract(const Eigen::VectorXd& v,
                                            const Eigen::VectorXd& w) const {
    const int n = dim();
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = v.dot(gamma[static_cast<std::size_t>(i)] * w);
    }
    return out;
}

Eigen::MatrixXd ChristoffelTensor::directional(const Eigen::VectorXd& x) const {
    const int n = dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (x[k] == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            out.row(i) += x[k] * gamma[static_cast<std::size_t>(i)].row(k);
        }
    }
    return out;
}

double ChristoffelTensor::max_abs() const {
    double m = 0.0;
    for (const auto& gi : gamma) {
        m = std::max(m, gi.cwiseAbs().maxCoeff());
    }
    return m;
}

MetricField::MetricField(int dim, EvalFn eval, ChristoffelFn analytic_christoffel)
    : dim_(dim), eval_(std::move(eval)), christoffel_(std::move(analytic_christoffel)) {}

MetricField MetricField::identity(int dim) {
    return constant(Eigen::MatrixXd::Identity(dim, dim));
}

MetricField MetricField::constant(const Eigen::MatrixXd& value) {
    const int n = static_cast<int>(value.rows());
    Eigen::MatrixXd v = value;
    return MetricField(
        n, [v](const ChartPoint&) { return v; },
        [n](const ChartPoint&) { return ChristoffelTensor::zero(n); });
}

Eigen::MatrixXd MetricField::operator()(const ChartPoint& g) const {
    Eigen::MatrixXd m = eval_(g);
    if (m.rows() != dim_ || m.cols() != dim_) {
        throw DimensionError("MetricField: evaluation returned wrong shape");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ParameterError("MetricField: value is not symmetric at the queried point");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw ParameterError("MetricField: value is not positive semidefinite "
                             "at the queried point");
    }
    return m;
}

ChristoffelTensor MetricField::analytic_christoffel(const ChartPoint& g) const {
    return christoffel_(g);
}

ChristoffelTensor christoffel(const MetricField& metric, const ChartPoint& g, double h) {
    if (metric.has_analytic_christoffel()) {
        return metric.analytic_christoffel(g);
    }
    const int n = metric.dim();
    const Eigen::MatrixXd m = metric(g);
    if (detail::nearly_singular(m)) {
        throw DegenerateMetricError(
            "christoffel: metric is degenerate and no analytic symbols were supplied");
    }
    // Central differences of the metric entries along every axis.
    std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const Eigen::MatrixXd plus = metric(detail::displaced(g, c, h));
        const Eigen::MatrixXd minus = metric(detail::displaced(g, c, -h));
        dg[static_cast<std::size_t>(c)] = (plus - minus) / (2.0 * h);
    }
    const Eigen::MatrixXd inv = m.inverse();
    ChristoffelTensor out = ChristoffelTensor::zero(n);
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
            Eigen::VectorXd lower(n); // 2 Gamma_{l,jk} of the first kind
            for (int l = 0; l < n; ++l) {
                lower[l] = dg[static_cast<std::size_t>(j)](l, k) +
                           dg[static_cast<std::size_t>(k)](l, j) -
                           dg[static_cast<std::size_t>(l)](j, k);
            }
            const Eigen::VectorXd upper = 0.5 * (inv * lower);
            for (int i = 0; i < n; ++i) {
                out.gamma[static_cast<std::size_t>(i)](j, k) = upper[i];
                out.gamma[static_cast<std::size_t>(i)](k, j) = upper[i];
            }
        }
    }
    return out;
}

TangentCoord covariant_accel(const ChristoffelTensor& gamma, const TangentCoord& zeta,
                             const TangentCoord& zeta_dot) {
    if (zeta.dim() != gamma.dim() || zeta_dot.dim() != gamma.dim()) {
        throw DimensionError("covariant_accel: shape mismatch");
    }
    return TangentCoord(zeta_dot.comps + gamma.contract(zeta.comps, zeta.comps));
}

double inner(const MetricField& metric, const ChartPoint& g, const TangentCoord& v,
             const TangentCoord& w) {
    return v.comps.dot(metric(g) * w.comps);
}

namespace detail {

ChartPoint displaced(const ChartPoint& g, int axis, double delta) {
    Eigen::VectorXd c = g.coords();
    c[axis] += delta;
    return ChartPoint(std::move(c), g.topology());
}

bool nearly_singular(const Eigen::MatrixXd& sym, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    return lo <= rel_tol * std::max(hi, 1e-300);
}

} // namespace detail

} // namespace geopid
