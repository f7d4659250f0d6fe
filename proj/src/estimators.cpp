#include "chaosmeter/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chaosmeter/errors.hpp"
#include "chaosmeter/rng.hpp"

namespace chaosmeter {

namespace {

constexpr std::uint64_t kBootstrapStream = 4;

MarginalStats marginal_from_rows(const Eigen::MatrixXd& samples, int k,
                                 bool exchangeable_average) {
    const long M = samples.rows();
    const long n = samples.cols();
    if (k < 1 || k > n) throw std::invalid_argument("empirical_marginal: bad k");
    if (M < 2) throw InsufficientSamples("empirical_marginal: need at least 2 samples");

    MarginalStats stats;
    stats.k = k;
    stats.count = M;
    if (exchangeable_average) {
        const Eigen::VectorXd full_mean = samples.colwise().mean();
        const Eigen::MatrixXd centered = samples.rowwise() - full_mean.transpose();
        const Eigen::MatrixXd full_cov =
            centered.transpose() * centered / static_cast<double>(M - 1);
        const Eigen::MatrixXd averaged = exchangeable_projection(full_cov);
        stats.mean = Eigen::VectorXd::Constant(k, full_mean.mean());
        stats.cov = averaged.topLeftCorner(k, k);
    } else {
        const Eigen::MatrixXd block = samples.leftCols(k);
        const Eigen::VectorXd mean = block.colwise().mean();
        const Eigen::MatrixXd centered = block.rowwise() - mean.transpose();
        stats.mean = mean;
        stats.cov = centered.transpose() * centered / static_cast<double>(M - 1);
    }
    return stats;
}

}  // namespace

Eigen::MatrixXd samples_matrix(const ParticleEnsemble& ensemble) {
    Eigen::MatrixXd m(ensemble.replicas, ensemble.particles);
    for (int r = 0; r < ensemble.replicas; ++r) {
        const auto row = ensemble.replica(r);
        for (int i = 0; i < ensemble.particles; ++i) m(r, i) = row[i];
    }
    return m;
}

MarginalStats empirical_marginal(const Eigen::MatrixXd& samples, int k,
                                 bool exchangeable_average) {
    for (long r = 0; r < samples.rows(); ++r)
        for (long c = 0; c < samples.cols(); ++c)
            if (!std::isfinite(samples(r, c)))
                throw NonFinite("empirical_marginal: non-finite sample");
    return marginal_from_rows(samples, k, exchangeable_average);
}

Eigen::MatrixXd exchangeable_projection(const Eigen::MatrixXd& m) {
    const long n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("exchangeable_projection: not square");
    const double diag = m.diagonal().mean();
    const double off = n > 1 ? (m.sum() - m.diagonal().sum()) /
                                   (static_cast<double>(n) * (n - 1))
                             : 0.0;
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, n, off);
    out.diagonal().setConstant(diag);
    return out;
}

namespace {

// Point estimate shared by the main path and every bootstrap resample.
std::pair<double, double> divergence_point(const Eigen::MatrixXd& samples, int k,
                                           const GaussianLaw& reference,
                                           const PluginOptions& options) {
    MarginalStats stats = marginal_from_rows(samples, k, options.exchangeable_average);
    GaussianLaw empirical{stats.mean, options.project_exchangeable
                                          ? exchangeable_projection(stats.cov)
                                          : stats.cov};
    return {gaussian_kl(empirical, reference), gaussian_fisher(empirical, reference)};
}

}  // namespace

DivergenceEstimate plugin_divergences(const Eigen::MatrixXd& samples, int k,
                                      const GaussianLaw& reference,
                                      const PluginOptions& options) {
    const long M = samples.rows();
    if (M < 2) throw InsufficientSamples("plugin_divergences: need at least 2 samples");
    if (reference.dim() != k)
        throw std::invalid_argument("plugin_divergences: reference dimension mismatch");

    DivergenceEstimate est;
    std::tie(est.entropy, est.fisher) = divergence_point(samples, k, reference, options);

    const int R = options.bootstrap_resamples;
    if (R < 2) return est;
    std::vector<double> boot_h(R), boot_i(R);
    const std::uint64_t base = rng::substream(options.seed, kBootstrapStream);
#pragma omp parallel
    {
        Eigen::MatrixXd resampled(M, samples.cols());
#pragma omp for schedule(static)
        for (int r = 0; r < R; ++r) {
            const std::uint64_t key = rng::substream(base, static_cast<std::uint64_t>(r));
            for (long i = 0; i < M; ++i) {
                const auto pick = rng::uniform_below(key, static_cast<std::uint64_t>(i),
                                                     static_cast<std::uint64_t>(M));
                resampled.row(i) = samples.row(static_cast<long>(pick));
            }
            std::tie(boot_h[r], boot_i[r]) =
                divergence_point(resampled, k, reference, options);
        }
    }
    double mh = 0.0, mi = 0.0;
    for (int r = 0; r < R; ++r) {
        mh += boot_h[r];
        mi += boot_i[r];
    }
    mh /= R;
    mi /= R;
    double vh = 0.0, vi = 0.0;
    for (int r = 0; r < R; ++r) {
        vh += (boot_h[r] - mh) * (boot_h[r] - mh);
        vi += (boot_i[r] - mi) * (boot_i[r] - mi);
    }
    est.entropy_stderr = std::sqrt(vh / (R - 1.0));
    est.fisher_stderr = std::sqrt(vi / (R - 1.0));
    return est;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, int expected_sign) {
    const auto m = static_cast<long>(points.size());
    if (m < 3) throw DegenerateDesign("fit_rate: need at least 3 points");
    for (const auto& [x, y] : points)
        if (x <= 0.0 || y <= 0.0) throw NonPositiveData("fit_rate: nonpositive point");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double det = m * sxx - sx * sx;
    const double sxx_centered = sxx - sx * sx / m;
    if (sxx_centered <= 1e-14 * sxx || det <= 0.0)
        throw DegenerateDesign("fit_rate: all abscissae equal");

    RateFit fit;
    fit.exponent = (m * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.exponent * sx) / m;

    double ssr = 0.0;
    for (const auto& [x, y] : points) {
        const double resid = std::log(y) - fit.intercept - fit.exponent * std::log(x);
        ssr += resid * resid;
    }
    fit.residual_norm = std::sqrt(ssr);
    if (m > 2) {
        const double sigma2 = ssr / (m - 2.0);
        fit.ci_halfwidth = 1.96 * std::sqrt(sigma2 / sxx_centered);
    }
    fit.sign_consistent =
        expected_sign == 0 || fit.exponent * expected_sign > 0.0;
    return fit;
}

}  // namespace chaosmeter
