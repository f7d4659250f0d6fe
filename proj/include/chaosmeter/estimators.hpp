#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>

#include "chaosmeter/gaussian.hpp"
#include "chaosmeter/particle_sim.hpp"

// Turns ensembles into empirical k-marginal statistics and plug-in
// divergences against a Gaussian reference, plus log-log rate fitting.

namespace chaosmeter {

struct MarginalStats {
    int k = 0;
    long count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  ///< unbiased (divisor count - 1)
};

/// Sample matrix (replicas x particles) view of an ensemble's terminal states.
Eigen::MatrixXd samples_matrix(const ParticleEnsemble& ensemble);

/// Empirical k-marginal of the first k particles. With exchangeable_average
/// the full covariance is computed and its diagonal / off-diagonal entries
/// are averaged over all particle subsets before extracting the k-marginal,
/// which is exact in law for exchangeable systems and much less noisy.
/// Throws InsufficientSamples when fewer than 2 rows are available.
MarginalStats empirical_marginal(const Eigen::MatrixXd& samples, int k,
                                 bool exchangeable_average = false);

/// Orthogonal projection of a square matrix onto span{I, J}: diagonal
/// entries are replaced by their mean, off-diagonal entries likewise.
Eigen::MatrixXd exchangeable_projection(const Eigen::MatrixXd& m);

struct DivergenceEstimate {
    double entropy = 0.0;
    double fisher = 0.0;
    double entropy_stderr = 0.0;
    double fisher_stderr = 0.0;
};

struct PluginOptions {
    bool exchangeable_average = true;
    /// Project the empirical covariance onto v (I - c J) before evaluating
    /// the divergences; guarantees commutation with the reference.
    bool project_exchangeable = true;
    int bootstrap_resamples = 200;
    std::uint64_t seed = 0;
};

/// Plug-in entropy and Fisher estimates of the empirical k-marginal against
/// `reference`, with bootstrap standard errors over replica resamples.
DivergenceEstimate plugin_divergences(const Eigen::MatrixXd& samples, int k,
                                      const GaussianLaw& reference,
                                      const PluginOptions& options = {});

struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;       ///< in log space
    double residual_norm = 0.0;
    double ci_halfwidth = 0.0;    ///< 95% half-width from residual variance
    bool sign_consistent = true;  ///< exponent sign matches expected_sign
};

/// Least-squares power-law fit y ~ e^intercept x^exponent on log-log pairs.
/// Throws NonPositiveData for nonpositive inputs and DegenerateDesign for
/// fewer than 3 points or a constant abscissa.
RateFit fit_rate(std::span<const std::pair<double, double>> points,
                 int expected_sign = 0);

}  // namespace chaosmeter
