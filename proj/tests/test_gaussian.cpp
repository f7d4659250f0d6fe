#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosmeter/errors.hpp"
#include "chaosmeter/gaussian.hpp"
#include "chaosmeter/rng.hpp"

using namespace chaosmeter;

namespace {

double normal_pdf(double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Quadrature oracle for the 1-d Fisher information I(p|q) with p = N(0, v1),
// q = N(0, v2): integral of q (f')^2 / f with f = p/q, by Simpson's rule.
double fisher_1d_quadrature(double v1, double v2) {
    const double lo = -14.0, hi = 14.0;
    const int intervals = 56000;
    const double h = (hi - lo) / intervals;
    const auto integrand = [&](double x) {
        const double f = normal_pdf(x, v1) / normal_pdf(x, v2);
        // d/dx log f = -x/v1 + x/v2, so f' = f * x (1/v2 - 1/v1).
        const double fp = f * x * (1.0 / v2 - 1.0 / v1);
        return normal_pdf(x, v2) * fp * fp / f;
    };
    double acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < intervals; ++i)
        acc += integrand(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Quadrature oracle for the 2-d relative entropy between centered Gaussians.
double kl_2d_quadrature(const Eigen::Matrix2d& cov_p, const Eigen::Matrix2d& cov_q) {
    const double lo = -9.0, hi = 9.0;
    const int cells = 900;
    const double h = (hi - lo) / cells;
    const Eigen::Matrix2d ip = cov_p.inverse(), iq = cov_q.inverse();
    const double norm_p =
        1.0 / (2.0 * std::numbers::pi * std::sqrt(cov_p.determinant()));
    const double norm_q =
        1.0 / (2.0 * std::numbers::pi * std::sqrt(cov_q.determinant()));
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double x = lo + (i + 0.5) * h;
        for (int j = 0; j < cells; ++j) {
            const double y = lo + (j + 0.5) * h;
            const Eigen::Vector2d v(x, y);
            const double p = norm_p * std::exp(-0.5 * v.dot(ip * v));
            const double q = norm_q * std::exp(-0.5 * v.dot(iq * v));
            if (p > 0.0) acc += p * std::log(p / q);
        }
    }
    return acc * h * h;
}

}  // namespace

TEST_CASE("gaussian_kl identity and mean shift") {
    const GaussianLaw std3 = GaussianLaw::standard(3);
    CHECK(gaussian_kl(std3, std3) == doctest::Approx(0.0).epsilon(1e-14));

    GaussianLaw shifted = GaussianLaw::standard(1);
    shifted.mean[0] = 1.0;
    CHECK(gaussian_kl(shifted, GaussianLaw::standard(1)) == doctest::Approx(0.5));
}

TEST_CASE("gaussian_kl matches 2-d quadrature for the exchangeable example") {
    Eigen::Matrix2d cov_p = Eigen::Matrix2d::Identity() - 0.25 * Eigen::Matrix2d::Ones();
    const GaussianLaw p{Eigen::Vector2d::Zero(), cov_p};
    const GaussianLaw q = GaussianLaw::standard(2);
    const double expected = 0.5 * (-0.5 - std::log(0.5));  // 0.0965735903...
    CHECK(gaussian_kl(p, q) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(gaussian_kl(p, q) ==
          doctest::Approx(kl_2d_quadrature(cov_p, Eigen::Matrix2d::Identity()))
              .epsilon(1e-5));
}

TEST_CASE("gaussian_fisher identity, mean shift, 1-d quadrature") {
    const GaussianLaw std4 = GaussianLaw::standard(4);
    CHECK(gaussian_fisher(std4, std4) == doctest::Approx(0.0).epsilon(1e-14));

    GaussianLaw shifted = GaussianLaw::standard(3);
    shifted.mean[0] = 1.0;
    CHECK(gaussian_fisher(shifted, GaussianLaw::standard(3)) == doctest::Approx(1.0));

    GaussianLaw wide = GaussianLaw::isotropic(1, 2.0);
    const GaussianLaw narrow = GaussianLaw::standard(1);
    CHECK(gaussian_fisher(wide, narrow) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gaussian_fisher(wide, narrow) ==
          doctest::Approx(fisher_1d_quadrature(2.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("nonnegativity over random commuting pairs") {
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint64_t key = rng::substream(99, trial);
        const int d = 1 + static_cast<int>(rng::uniform_below(key, 0, 4));
        GaussianLaw p{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
        GaussianLaw q{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
        for (int i = 0; i < d; ++i) {
            // Diagonal covariances commute; entries bounded away from zero.
            p.cov(i, i) = 0.2 + rng::uniform_half_open(rng::word_at(key, 10 + i));
            q.cov(i, i) = 0.2 + rng::uniform_half_open(rng::word_at(key, 20 + i));
            p.mean[i] = rng::normal_pair(key, 30 + i).first;
            q.mean[i] = rng::normal_pair(key, 40 + i).first;
        }
        CHECK(gaussian_kl(p, q) >= -1e-13);
        CHECK(gaussian_fisher(p, q) >= -1e-13);
        CHECK(gaussian_kl(p, p) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(gaussian_fisher(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("error surface") {
    GaussianLaw p = GaussianLaw::standard(2);
    GaussianLaw q = GaussianLaw::standard(2);

    SUBCASE("non-commuting covariances rejected by gaussian_fisher") {
        p.cov << 2.0, 0.0, 0.0, 1.0;
        const double theta = 0.5;
        Eigen::Matrix2d rot;
        rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        q.cov = rot * Eigen::Vector2d(3.0, 0.5).asDiagonal() * rot.transpose();
        CHECK_THROWS_AS(gaussian_fisher(p, q), NonCommuting);
        CHECK_NOTHROW(gaussian_kl(p, q));  // no commutation requirement
    }
    SUBCASE("singular covariance rejected") {
        q.cov << 1.0, 1.0, 1.0, 1.0;
        CHECK_THROWS_AS(gaussian_kl(p, q), NotPositiveDefinite);
        CHECK_THROWS_AS(gaussian_fisher(p, q), NotPositiveDefinite);
    }
    SUBCASE("asymmetric covariance rejected") {
        q.cov << 1.0, 0.5, 0.2, 1.0;
        CHECK_THROWS_AS(gaussian_kl(p, q), NotPositiveDefinite);
    }
    SUBCASE("dimension mismatch rejected") {
        CHECK_THROWS(gaussian_kl(GaussianLaw::standard(3), q));
    }
}
