#pragma once

#include <Eigen/Dense>
#include <utility>

#include "chaosmeter/gaussian.hpp"

// Exact quantities for the linear mean-field model: n scalar particles with
// confinement rate a and interaction strength b. The k-particle marginal at
// time t is a centered Gaussian with covariance v(t) (I_k - c_n(t) J_k),
// and the mean-field limit is a centered Gaussian with variance v(t).

namespace chaosmeter {

/// Sign/self-term convention for the drift matrix of the linear model.
enum class DriftConvention {
    /// A = -a I - b/(n-1) J  (interaction sum includes the self term).
    /// This is the convention under which v(I - c_n J) solves the Lyapunov
    /// equation exactly; see the note at drift_matrix().
    kClosedForm,
    /// A = -a I + b/(n-1) (J - I): attractive interaction over the other
    /// particles only, kept for comparison runs.
    kLiteral,
};

struct OUModelSpec {
    double a = 1.0;  ///< confinement rate
    double b = 0.0;  ///< interaction strength
    int n = 2;       ///< particle count, >= 2
    DriftConvention convention = DriftConvention::kClosedForm;

    /// Combined relaxation rate theta = a + b n / (n - 1).
    double theta() const { return a + b * n / (n - 1.0); }
};

/// Below this magnitude a rate is treated as a removable singularity and the
/// series branch of (1 - e^{-2rt}) / (2r) is used.
inline constexpr double kRateEpsilon = 1e-6;

/// (1 - e^{-2rt}) / (2r), continued through r = 0 with value t.
double decay_integral(double r, double t);

/// Mean-field variance v(t) = (1 - e^{-2at}) / (2a); v = t at a = 0.
double variance_v(double a, double t);

/// Correlation coefficient c_n(t) = (1/n)(1 - g(theta, t) / g(a, t)) with
/// g = decay_integral. Returns 0 at t <= 0. With limit_branch disabled,
/// throws DegenerateRate when |a| or |theta| falls below kRateEpsilon.
double coefficient_c(const OUModelSpec& model, double t, bool limit_branch = true);

/// The pair (alpha(t), beta(t)) with alpha = 1 - g(a+b, t)/g(a, t) and
/// beta = 1 - g(a+2b, t)/g(a, t), so that alpha/n <= c_n <= beta/n for b > 0.
std::pair<double, double> alpha_beta_bounds(double a, double b, double t,
                                            bool limit_branch = true);

/// Exchangeable covariance v (I_k - c J_k) in (v, c) form.
struct MarginalCovariance {
    int k = 0;
    double v = 0.0;
    double c = 0.0;

    Eigen::MatrixXd matrix() const;
    /// Positive definite iff v > 0 and 1 - c k > 0.
    bool positive_definite() const { return v > 0.0 && 1.0 - c * k > 0.0; }
};

/// Boundary tolerance: 1 - c k below this is treated as degenerate.
inline constexpr double kMarginalPdTol = 1e-10;

/// The exact k-particle marginal covariance at time t. Throws
/// NotPositiveDefinite when 1 - c_n(t) k <= kMarginalPdTol (t > 0 only;
/// at t = 0 the covariance is the zero matrix).
MarginalCovariance marginal_covariance(const OUModelSpec& model, int k, double t);

/// The k-particle marginal as a GaussianLaw (centered).
GaussianLaw marginal_law(const OUModelSpec& model, int k, double t);

/// The k-fold product of the mean-field law: centered, covariance v(t) I_k.
GaussianLaw mean_field_reference(const OUModelSpec& model, int k, double t);

/// Drift matrix of the n-particle linear system under the given convention.
Eigen::MatrixXd drift_matrix(const OUModelSpec& model);

/// Brute-force covariance: fixed-step RK4 on dS/dt = A S + S A' + I from
/// S(0) = 0, symmetrized each step. Independent of the closed form above.
/// Throws StepTooLarge when dt is outside the RK4 stability region of A.
Eigen::MatrixXd lyapunov_oracle(const OUModelSpec& model, double t, double dt = 1e-4);

/// Exact covariance of the Euler-Maruyama chain after `steps` steps of size
/// dt: S <- (I + dt A) S (I + dt A)' + dt I. Separates discretization bias
/// from Monte Carlo noise in validation runs.
Eigen::MatrixXd discrete_lyapunov(const OUModelSpec& model, double dt, int steps);

/// Variance of the scalar Euler-Maruyama mean-field chain:
/// s <- (1 - a dt)^2 s + dt.
double discrete_meanfield_variance(double a, double dt, int steps);

/// Fisher information I_t^k = c^2 k^2 / (v (1 - c k)) of the k-marginal
/// against the k-fold mean-field product law. Requires t > 0.
double fisher_closed_form(const OUModelSpec& model, int k, double t);

/// Relative entropy H_t^k = (-c k - ln(1 - c k)) / 2 of the k-marginal
/// against the k-fold mean-field product law. Requires t > 0.
double entropy_closed_form(const OUModelSpec& model, int k, double t);

}  // namespace chaosmeter
