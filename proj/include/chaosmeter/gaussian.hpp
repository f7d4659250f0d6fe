#pragma once

#include <Eigen/Dense>

namespace chaosmeter {

/// A (multivariate) Gaussian law N(mean, cov).
struct GaussianLaw {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int dim() const { return static_cast<int>(mean.size()); }

    static GaussianLaw standard(int dim);
    /// Centered law with covariance scale * I.
    static GaussianLaw isotropic(int dim, double scale);
};

/// Relative symmetry tolerance accepted on covariance matrices.
inline constexpr double kSymmetryTol = 1e-12;
/// Smallest eigenvalue must exceed this fraction of the trace.
inline constexpr double kEigenvalueFloor = 1e-12;
/// Relative Frobenius tolerance on the covariance commutator in
/// gaussian_fisher.
inline constexpr double kCommutatorTol = 1e-9;

/// Throws NotPositiveDefinite unless cov is symmetric (within kSymmetryTol,
/// relative to the largest entry) with smallest eigenvalue above
/// floor * trace.
void require_positive_definite(const Eigen::MatrixXd& cov, double floor = kEigenvalueFloor);

/// Relative entropy H(p|q) between Gaussian laws,
///   1/2 (Tr(S2^-1 S1) - d + (m2-m1)' S2^-1 (m2-m1) + ln det S2 / det S1).
double gaussian_kl(const GaussianLaw& p, const GaussianLaw& q);

/// Fisher information I(p|q) for Gaussians with commuting covariances,
///   |S2^-1 (m1-m2)|^2 + Tr(S2^-2 (S2-S1)^2 S1^-1).
/// Throws NonCommuting if the commutator exceeds kCommutatorTol relatively.
double gaussian_fisher(const GaussianLaw& p, const GaussianLaw& q);

}  // namespace chaosmeter
