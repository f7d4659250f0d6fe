#include "chaosmeter/ou_model.hpp"

#include <cmath>
#include <stdexcept>

#include "chaosmeter/errors.hpp"

namespace chaosmeter {

namespace {

void check_model(const OUModelSpec& model) {
    if (model.n < 2) throw std::invalid_argument("OUModelSpec: n must be >= 2");
    if (!std::isfinite(model.theta()))
        throw std::invalid_argument("OUModelSpec: theta is not finite");
}

void require_limit_branch(double rate, bool limit_branch, const char* what) {
    if (!limit_branch && std::abs(rate) < kRateEpsilon)
        throw DegenerateRate(std::string("degenerate rate: ") + what);
}

}  // namespace

double decay_integral(double r, double t) {
    if (t <= 0.0) return 0.0;
    if (std::abs(r) < kRateEpsilon) {
        // t (e^x - 1)/x with x = -2 r t, truncated; |x| <= 1e-4 on any
        // horizon used here, so the x^4 term is below double precision.
        const double x = -2.0 * r * t;
        return t * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
    }
    return -std::expm1(-2.0 * r * t) / (2.0 * r);
}

double variance_v(double a, double t) { return decay_integral(a, t); }

double coefficient_c(const OUModelSpec& model, double t, bool limit_branch) {
    check_model(model);
    if (t <= 0.0) return 0.0;
    require_limit_branch(model.a, limit_branch, "a ~ 0 in c_n");
    require_limit_branch(model.theta(), limit_branch, "theta ~ 0 in c_n");
    return (1.0 - decay_integral(model.theta(), t) / decay_integral(model.a, t)) / model.n;
}

std::pair<double, double> alpha_beta_bounds(double a, double b, double t,
                                            bool limit_branch) {
    if (t <= 0.0) return {0.0, 0.0};
    require_limit_branch(a, limit_branch, "a ~ 0 in alpha/beta");
    require_limit_branch(a + b, limit_branch, "a + b ~ 0 in alpha");
    require_limit_branch(a + 2 * b, limit_branch, "a + 2b ~ 0 in beta");
    const double base = decay_integral(a, t);
    return {1.0 - decay_integral(a + b, t) / base,
            1.0 - decay_integral(a + 2 * b, t) / base};
}

Eigen::MatrixXd MarginalCovariance::matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(k, k, -v * c);
    m.diagonal().setConstant(v * (1.0 - c));
    return m;
}

MarginalCovariance marginal_covariance(const OUModelSpec& model, int k, double t) {
    check_model(model);
    if (k < 1 || k > model.n) throw std::invalid_argument("marginal size k out of range");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    const double v = variance_v(model.a, t);
    const double c = coefficient_c(model, t);
    if (t > 0.0 && 1.0 - c * k <= kMarginalPdTol)
        throw NotPositiveDefinite("marginal covariance: 1 - c k at or below tolerance");
    return {k, v, c};
}

GaussianLaw marginal_law(const OUModelSpec& model, int k, double t) {
    return {Eigen::VectorXd::Zero(k), marginal_covariance(model, k, t).matrix()};
}

GaussianLaw mean_field_reference(const OUModelSpec& model, int k, double t) {
    return GaussianLaw::isotropic(k, variance_v(model.a, t));
}

Eigen::MatrixXd drift_matrix(const OUModelSpec& model) {
    check_model(model);
    const int n = model.n;
    const double coupling = model.b / (n - 1.0);
    // kClosedForm: A = -a I - coupling J. This is the matrix whose Lyapunov
    // solution is exactly v(t) (I - c_n(t) J): on the all-ones direction the
    // relaxation rate is a + b n/(n-1) = theta, and on the mean-zero
    // complement it is a, which is what v(t) requires. The literal
    // convention (-a I + coupling (J - I)) relaxes at a + coupling on the
    // complement instead, so its Lyapunov solution has a different diagonal.
    Eigen::MatrixXd A;
    if (model.convention == DriftConvention::kClosedForm) {
        A = Eigen::MatrixXd::Constant(n, n, -coupling);
        A.diagonal().array() -= model.a;
    } else {
        A = Eigen::MatrixXd::Constant(n, n, coupling);
        A.diagonal().setConstant(-model.a);
    }
    return A;
}

Eigen::MatrixXd lyapunov_oracle(const OUModelSpec& model, double t, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("lyapunov_oracle: dt must be > 0");
    if (t < 0.0) throw std::invalid_argument("lyapunov_oracle: t must be >= 0");
    const Eigen::MatrixXd A = drift_matrix(model);
    const int n = model.n;
    // Lyapunov operator spectrum is {lambda_i + lambda_j}; bound it by
    // 2 ||A||_inf and stay inside the RK4 real-axis stability interval.
    const double op_norm = 2.0 * A.cwiseAbs().rowwise().sum().maxCoeff();
    if (dt * op_norm > 2.5) throw StepTooLarge("lyapunov_oracle: dt outside stability region");

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    if (t == 0.0) return sigma;
    const auto steps = static_cast<long>(std::llround(t / dt));
    const double h = t / static_cast<double>(std::max<long>(steps, 1));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const auto rhs = [&](const Eigen::MatrixXd& s) -> Eigen::MatrixXd {
        return A * s + s * A.transpose() + id;
    };
    for (long m = 0; m < steps; ++m) {
        const Eigen::MatrixXd k1 = rhs(sigma);
        const Eigen::MatrixXd k2 = rhs(sigma + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = rhs(sigma + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = rhs(sigma + h * k3);
        sigma += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sigma = 0.5 * (sigma + sigma.transpose());
    }
    return sigma;
}

Eigen::MatrixXd discrete_lyapunov(const OUModelSpec& model, double dt, int steps) {
    if (dt <= 0.0) throw std::invalid_argument("discrete_lyapunov: dt must be > 0");
    if (steps < 0) throw std::invalid_argument("discrete_lyapunov: steps must be >= 0");
    const int n = model.n;
    const Eigen::MatrixXd step =
        Eigen::MatrixXd::Identity(n, n) + dt * drift_matrix(model);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < steps; ++m) {
        sigma = step * sigma * step.transpose();
        sigma.diagonal().array() += dt;
        sigma = 0.5 * (sigma + sigma.transpose());
    }
    return sigma;
}

double discrete_meanfield_variance(double a, double dt, int steps) {
    const double factor = (1.0 - a * dt) * (1.0 - a * dt);
    double s = 0.0;
    for (int m = 0; m < steps; ++m) s = factor * s + dt;
    return s;
}

namespace {

// Shared preamble of the two closed forms: returns (v, c, 1 - c k).
struct ClosedFormState {
    double v;
    double c;
    double gap;
};

ClosedFormState closed_form_state(const OUModelSpec& model, int k, double t) {
    check_model(model);
    if (k < 1 || k > model.n) throw std::invalid_argument("marginal size k out of range");
    if (t <= 0.0) throw std::invalid_argument("closed forms require t > 0");
    const double v = variance_v(model.a, t);
    const double c = coefficient_c(model, t);
    const double gap = 1.0 - c * k;
    if (gap <= kMarginalPdTol)
        throw NotPositiveDefinite("closed form: 1 - c k at or below tolerance");
    return {v, c, gap};
}

}  // namespace

double fisher_closed_form(const OUModelSpec& model, int k, double t) {
    const auto [v, c, gap] = closed_form_state(model, k, t);
    return c * c * k * k / (v * gap);
}

double entropy_closed_form(const OUModelSpec& model, int k, double t) {
    const auto [v, c, gap] = closed_form_state(model, k, t);
    (void)v;
    return 0.5 * (-c * k - std::log1p(-c * k));
}

}  // namespace chaosmeter
