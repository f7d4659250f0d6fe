#include "chaosmeter/gaussian.hpp"

#include <cmath>

#include "chaosmeter/errors.hpp"

namespace chaosmeter {

GaussianLaw GaussianLaw::standard(int dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim)};
}

GaussianLaw GaussianLaw::isotropic(int dim, double scale) {
    return {Eigen::VectorXd::Zero(dim), scale * Eigen::MatrixXd::Identity(dim, dim)};
}

void require_positive_definite(const Eigen::MatrixXd& cov, double floor) {
    const double scale = cov.cwiseAbs().maxCoeff();
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > kSymmetryTol * scale)
        throw NotPositiveDefinite("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig <= floor * cov.trace())
        throw NotPositiveDefinite("covariance is not positive definite");
}

namespace {

void check_pair(const GaussianLaw& p, const GaussianLaw& q) {
    if (p.dim() != q.dim() || p.cov.rows() != p.dim() || q.cov.rows() != q.dim())
        throw NotPositiveDefinite("dimension mismatch between Gaussian laws");
    require_positive_definite(p.cov);
    require_positive_definite(q.cov);
}

}  // namespace

double gaussian_kl(const GaussianLaw& p, const GaussianLaw& q) {
    check_pair(p, q);
    const int d = p.dim();
    const Eigen::LLT<Eigen::MatrixXd> llt_p(p.cov);
    const Eigen::LLT<Eigen::MatrixXd> llt_q(q.cov);
    if (llt_p.info() != Eigen::Success || llt_q.info() != Eigen::Success)
        throw NotPositiveDefinite("Cholesky factorization failed");

    const double trace_term = llt_q.solve(p.cov).trace();
    const Eigen::VectorXd dm = q.mean - p.mean;
    const double mean_term = dm.dot(llt_q.solve(dm));
    const double logdet_q =
        2.0 * llt_q.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double logdet_p =
        2.0 * llt_p.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return 0.5 * (trace_term - d + mean_term + logdet_q - logdet_p);
}

double gaussian_fisher(const GaussianLaw& p, const GaussianLaw& q) {
    check_pair(p, q);
    const Eigen::MatrixXd commutator = p.cov * q.cov - q.cov * p.cov;
    if (commutator.norm() > kCommutatorTol * p.cov.norm() * q.cov.norm())
        throw NonCommuting("covariance matrices do not commute");

    const Eigen::LLT<Eigen::MatrixXd> llt_p(p.cov);
    const Eigen::LLT<Eigen::MatrixXd> llt_q(q.cov);
    if (llt_p.info() != Eigen::Success || llt_q.info() != Eigen::Success)
        throw NotPositiveDefinite("Cholesky factorization failed");

    const Eigen::VectorXd dm = llt_q.solve(p.mean - q.mean);
    const Eigen::MatrixXd diff = q.cov - p.cov;
    const Eigen::MatrixXd scaled = llt_q.solve(diff);  // S2^-1 (S2 - S1)
    const double trace_term = llt_p.solve(scaled * scaled).trace();
    return dm.squaredNorm() + trace_term;
}

}  // namespace chaosmeter
