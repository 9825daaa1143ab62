#include "geopid/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geopid/errors.hpp"

namespace geopid {

namespace {

constexpr double kDedupRadius = 1e-4;
constexpr int kMaxNewtonIterations = 100;
constexpr int kDefaultSeedsPerAxis = 16;
constexpr long kSeedCap = 4096;

std::vector<double> axis_grid(double lo, double hi, int count, bool angular) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        pts.push_back(0.5 * (lo + hi));
        return pts;
    }
    // Angular axes wrap, so the right endpoint duplicates the left one and
    // is excluded.
    const double denom = angular ? static_cast<double>(count)
                                 : static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        pts.push_back(lo + (hi - lo) * static_cast<double>(i) / denom);
    }
    return pts;
}

// Visits every grid point of the region; f may return false to abort.
template <typename F>
void for_each_grid_point(const SamplingRegion& region, const TopologyVec& topology,
                         const std::vector<int>& counts, F&& f) {
    const int dim = region.dim();
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(dim));
    long total = 1;
    for (int i = 0; i < dim; ++i) {
        const bool angular = topology[static_cast<std::size_t>(i)] == Topology::kAngular;
        axes[static_cast<std::size_t>(i)] =
            axis_grid(region.bounds[static_cast<std::size_t>(i)].first,
                      region.bounds[static_cast<std::size_t>(i)].second,
                      counts[static_cast<std::size_t>(i)], angular);
        total *= counts[static_cast<std::size_t>(i)];
        if (total > 20'000'000) {
            throw ParameterError("SamplingRegion: grid has too many points");
        }
    }
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Eigen::VectorXd coords(dim);
    for (long p = 0; p < total; ++p) {
        for (int i = 0; i < dim; ++i) {
            coords[i] = axes[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        }
        f(coords);
        for (int i = dim - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
}

std::vector<int> seed_counts(const SamplingRegion& region) {
    const int dim = region.dim();
    std::vector<int> counts = region.samples;
    if (counts.empty()) {
        counts.assign(static_cast<std::size_t>(dim), kDefaultSeedsPerAxis);
    }
    long total = 1;
    for (int c : counts) total *= c;
    while (total > kSeedCap) {
        // Shrink the largest axis until the cap is met.
        auto it = std::max_element(counts.begin(), counts.end());
        if (*it <= 2) break;
        total = total / *it * (*it - 1);
        --(*it);
    }
    return counts;
}

} // namespace

MorseSpec::MorseSpec(ValueFn value, ChartPoint minimum, DifferentialFn differential,
                     double fd_step)
    : value_(std::move(value)),
      differential_(std::move(differential)),
      minimum_(std::move(minimum)),
      fd_step_(fd_step) {
    const double v0 = value_(minimum_);
    if (std::fabs(v0) > 1e-12) {
        throw ParameterError("MorseSpec: value at the declared minimum is " +
                             std::to_string(v0) + ", expected 0");
    }
}

double MorseSpec::value(const ChartPoint& g) const { return value_(g); }

CotangentCoord MorseSpec::differential(const ChartPoint& g) const {
    if (differential_) {
        return differential_(g);
    }
    const int n = g.dim();
    Eigen::VectorXd d(n);
    for (int c = 0; c < n; ++c) {
        d[c] = (value_(detail::displaced(g, c, fd_step_)) -
                value_(detail::displaced(g, c, -fd_step_))) /
               (2.0 * fd_step_);
    }
    return CotangentCoord(std::move(d));
}

void SamplingRegion::validate(const TopologyVec& topology) const {
    if (bounds.empty() || bounds.size() != topology.size()) {
        throw ParameterError("SamplingRegion: bounds do not match system dimension");
    }
    if (!samples.empty() && samples.size() != bounds.size()) {
        throw ParameterError("SamplingRegion: sample counts do not match bounds");
    }
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (!(bounds[i].first < bounds[i].second) ||
            !std::isfinite(bounds[i].first) || !std::isfinite(bounds[i].second)) {
            throw ParameterError("SamplingRegion: empty or infinite interval on axis " +
                                 std::to_string(i));
        }
        if (!samples.empty() && samples[i] < 1) {
            throw ParameterError("SamplingRegion: sample count must be positive");
        }
    }
}

SamplingRegion SamplingRegion::box(std::vector<std::pair<double, double>> bounds,
                                   std::vector<int> samples) {
    SamplingRegion r;
    r.bounds = std::move(bounds);
    r.samples = std::move(samples);
    return r;
}

CotangentCoord projected_dv(const MorseSpec& morse, const MetricField& metric,
                            const DistributionField& dist, const ChartPoint& g) {
    const ProjectorSet p = projectors(metric, dist, g);
    return CotangentCoord(p.p_dstar * morse.differential(g).comps);
}

Eigen::MatrixXd d_hessian(const MorseSpec& morse, const MetricField& metric,
                          const DistributionField& dist, const ChartPoint& g) {
    (void)metric;
    const int n = g.dim();
    const double h = morse.fd_step();
    Eigen::MatrixXd jac(n, n); // jac(i, j) = d_j (dV)_i
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd plus = morse.differential(detail::displaced(g, j, h)).comps;
        const Eigen::VectorXd minus = morse.differential(detail::displaced(g, j, -h)).comps;
        jac.col(j) = (plus - minus) / (2.0 * h);
    }
    const Eigen::MatrixXd hess = 0.5 * (jac + jac.transpose());
    const Eigen::MatrixXd b = dist.basis(g);
    Eigen::MatrixXd restricted = b.transpose() * hess * b;
    return 0.5 * (restricted + restricted.transpose().eval());
}

namespace {

Eigen::VectorXd critical_residual(const MorseSpec& morse, const MetricField& metric,
                                  const DistributionField& dist, const ChartPoint& g) {
    return projected_dv(morse, metric, dist, g).comps;
}

// One damped Newton run; returns the refined point when the residual drops
// below tol within the iteration budget.
std::optional<ChartPoint> newton_refine(const MorseSpec& morse, const MetricField& metric,
                                        const DistributionField& dist, ChartPoint g,
                                        double tol, double h) {
    const int n = g.dim();
    Eigen::VectorXd r = critical_residual(morse, metric, dist, g);
    for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
        if (r.norm() <= tol) return g;
        Eigen::MatrixXd jac(n, n);
        for (int c = 0; c < n; ++c) {
            jac.col(c) = (critical_residual(morse, metric, dist, detail::displaced(g, c, h)) -
                          critical_residual(morse, metric, dist, detail::displaced(g, c, -h))) /
                         (2.0 * h);
        }
        // The residual Jacobian is rank deficient along the critical set, so
        // take the minimum-norm least-squares step.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-8);
        Eigen::VectorXd step = -svd.solve(r);
        if (!step.allFinite()) return std::nullopt;

        double scale = 1.0;
        bool improved = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const ChartPoint trial(g.coords() + scale * step, g.topology());
            const Eigen::VectorXd r_trial = critical_residual(morse, metric, dist, trial);
            if (r_trial.norm() < r.norm()) {
                g = trial;
                r = r_trial;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            return r.norm() <= tol ? std::optional<ChartPoint>(g) : std::nullopt;
        }
    }
    return r.norm() <= tol ? std::optional<ChartPoint>(g) : std::nullopt;
}

CriticalPoint annotate(const MorseSpec& morse, const MetricField& metric,
                       const DistributionField& dist, ChartPoint g, double residual) {
    CriticalPoint cp{std::move(g), residual, Eigen::VectorXd(), 0, 0, 0, false};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        d_hessian(morse, metric, dist, cp.point), Eigen::EigenvaluesOnly);
    cp.hessian_eigs = es.eigenvalues();
    const double scale = std::max(1.0, cp.hessian_eigs.cwiseAbs().maxCoeff());
    for (int i = 0; i < cp.hessian_eigs.size(); ++i) {
        if (cp.hessian_eigs[i] > 1e-6 * scale) {
            ++cp.positive;
        } else if (cp.hessian_eigs[i] < -1e-6 * scale) {
            ++cp.negative;
        } else {
            ++cp.zero;
        }
    }
    cp.is_declared_minimum = cp.point.distance(morse.minimum()) < kDedupRadius;
    return cp;
}

} // namespace

CriticalSearchResult find_d_critical(const MorseSpec& morse, const MetricField& metric,
                                     const DistributionField& dist,
                                     const SamplingRegion& region,
                                     const TopologyVec& topology, double tol) {
    region.validate(topology);
    if (!(tol > 0.0)) {
        throw ParameterError("find_d_critical: tolerance must be positive");
    }
    const std::vector<int> counts = seed_counts(region);

    std::vector<ChartPoint> seeds;
    for_each_grid_point(region, topology, counts, [&](const Eigen::VectorXd& coords) {
        seeds.emplace_back(coords, topology);
    });
    seeds.push_back(morse.minimum());

    CriticalSearchResult result;
    result.seeds = static_cast<int>(seeds.size());
    const double h = morse.fd_step();

    std::vector<CriticalPoint> accepted;
    for (const ChartPoint& seed : seeds) {
        const auto refined = newton_refine(morse, metric, dist, seed, tol, h);
        if (!refined) {
            ++result.dropped;
            continue;
        }
        const double res = critical_residual(morse, metric, dist, *refined).norm();
        bool duplicate = false;
        for (auto& cp : accepted) {
            if (cp.point.distance(*refined) < kDedupRadius) {
                if (res < cp.residual) {
                    cp = annotate(morse, metric, dist, *refined, res);
                }
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            accepted.push_back(annotate(morse, metric, dist, *refined, res));
        }
    }

    std::sort(accepted.begin(), accepted.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        const auto& ca = a.point.coords();
        const auto& cb = b.point.coords();
        for (int i = 0; i < ca.size(); ++i) {
            if (ca[i] != cb[i]) return ca[i] < cb[i];
        }
        return false;
    });
    result.points = std::move(accepted);
    return result;
}

LambdaMu estimate_lambda_mu(const MorseSpec& morse, const MetricField& metric,
                            const DistributionField& dist, const SamplingRegion& region,
                            const TopologyVec& topology) {
    region.validate(topology);
    std::vector<int> counts = region.samples;
    if (counts.empty()) {
        counts.assign(static_cast<std::size_t>(region.dim()), kDefaultSeedsPerAxis);
    }

    LambdaMu out;
    for_each_grid_point(region, topology, counts, [&](const Eigen::VectorXd& coords) {
        const ChartPoint g(coords, topology);
        if (g.distance(morse.minimum()) <= 1e-6) return; // lambda quotient is 0/0 at e
        const double v = morse.value(g);
        if (v < -1e-12) {
            throw ParameterError("estimate_lambda_mu: Morse value is negative in region");
        }
        if (v <= 1e-14) return;

        const Eigen::MatrixXd b = dist.basis(g);
        const Eigen::MatrixXd m = metric(g);
        Eigen::MatrixXd gram = b.transpose() * m * b;
        gram = 0.5 * (gram + gram.transpose().eval());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);

        const Eigen::VectorXd bdv = b.transpose() * morse.differential(g).comps;
        // |P_D grad V|_I^2 = dV' B (B' I B)^{-1} B' dV, no metric inverse.
        const double grad_sq = bdv.dot(ldlt.solve(bdv));
        out.lambda = std::max(out.lambda, grad_sq / (2.0 * v));

        const Eigen::MatrixXd hess = d_hessian(morse, metric, dist, g);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(hess, gram,
                                                                      Eigen::EigenvaluesOnly);
        out.mu = std::max(out.mu, ges.eigenvalues().maxCoeff());
        ++out.sample_count;
    });

    if (out.sample_count == 0) {
        throw ParameterError("estimate_lambda_mu: region contains no usable samples");
    }
    return out;
}

} // namespace geopid
