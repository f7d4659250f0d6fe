#include "chaosmeter/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chaosmeter/errors.hpp"

namespace chaosmeter {

LadderSystem build_ladder(int levels, double C, double alpha, ClosureSpec closure,
                          const Eigen::VectorXd* entropy0,
                          const Eigen::VectorXd* fisher0) {
    if (levels < 1) throw InvalidClosure("build_ladder: levels must be >= 1");
    if (C < 0.0) throw InvalidClosure("build_ladder: C must be >= 0");
    if (!(alpha > C)) throw InvalidClosure("build_ladder: alpha must exceed C");
    if (closure.kind == ClosureSpec::Kind::kPinned &&
        (closure.pinned_entropy < 0.0 || closure.pinned_fisher < 0.0))
        throw InvalidClosure("build_ladder: pinned levels must be nonnegative");

    LadderSystem system{levels, C, alpha, closure, {}, {}};
    const auto default_profile = [levels] {
        Eigen::VectorXd p(levels);
        for (int k = 1; k <= levels; ++k)
            p[k - 1] = static_cast<double>(k) * k / (static_cast<double>(levels) * levels);
        return p;
    };
    system.entropy0 = entropy0 ? *entropy0 : default_profile();
    system.fisher0 = fisher0 ? *fisher0 : default_profile();
    if (system.entropy0.size() != levels || system.fisher0.size() != levels)
        throw InvalidClosure("build_ladder: initial profile length mismatch");
    return system;
}

namespace {

// State layout: y[0..N) = H^k, y[N..2N) = I^k.
void ladder_rhs(const LadderSystem& s, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const int N = s.levels;
    const double C = s.C;
    const double N2 = static_cast<double>(N) * N;
    for (int k = 1; k <= N; ++k) {
        const double H = y[k - 1];
        const double I = y[N + k - 1];
        double dH_next, dI_next;
        if (k < N) {
            dH_next = y[k] - H;
            dI_next = y[N + k] - I;
        } else if (s.closure.kind == ClosureSpec::Kind::kPinned) {
            dH_next = s.closure.pinned_entropy - H;
            dI_next = s.closure.pinned_fisher - I;
        } else {
            dH_next = 0.0;
            dI_next = 0.0;
        }
        const double source = C * k * k / N2;
        dy[k - 1] = -I + source + C * k * dH_next;
        dy[N + k - 1] = source + C * k * dH_next + C * k * dI_next + C * I;
    }
}

}  // namespace

LadderTrajectory integrate_ladder(const LadderSystem& system, double T, double dt) {
    if (T < 0.0 || dt <= 0.0) throw std::invalid_argument("integrate_ladder: bad T or dt");
    if (system.C > 0.0 && dt > 0.1 / (system.C * system.levels) * (1.0 + 1e-12))
        throw StepTooLarge("integrate_ladder: dt exceeds 0.1 / (C N)");

    const int N = system.levels;
    const auto steps = static_cast<long>(std::llround(T / dt));
    const double h = steps > 0 ? T / static_cast<double>(steps) : dt;

    LadderTrajectory traj;
    traj.levels = N;
    traj.C = system.C;
    traj.alpha = system.alpha;
    traj.times.resize(steps + 1);
    traj.entropy.resize(steps + 1, N);
    traj.fisher.resize(steps + 1, N);
    traj.z.resize(steps + 1, N);

    Eigen::VectorXd y(2 * N);
    y.head(N) = system.entropy0;
    y.tail(N) = system.fisher0;
    Eigen::VectorXd k1(2 * N), k2(2 * N), k3(2 * N), k4(2 * N), tmp(2 * N);

    const auto record = [&](long row, double t) {
        traj.times[row] = t;
        traj.entropy.row(row) = y.head(N);
        traj.fisher.row(row) = y.tail(N);
        traj.z.row(row) = y.tail(N) + system.alpha * y.head(N);
    };
    record(0, 0.0);
    for (long m = 0; m < steps; ++m) {
        ladder_rhs(system, y, k1);
        tmp = y + 0.5 * h * k1;
        ladder_rhs(system, tmp, k2);
        tmp = y + 0.5 * h * k2;
        ladder_rhs(system, tmp, k3);
        tmp = y + h * k3;
        ladder_rhs(system, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(m + 1, (m + 1) * h);
    }
    return traj;
}

namespace {

// z^k scaled by N^2/k^2, the quantity the envelope bounds by amp e^{growth t}.
double scaled_z(const LadderTrajectory& traj, long row, int col) {
    const double k = col + 1.0;
    const double N2 = static_cast<double>(traj.levels) * traj.levels;
    return traj.z(row, col) * N2 / (k * k);
}

}  // namespace

EnvelopeFit envelope_check(const LadderTrajectory& traj, double fit_horizon) {
    const long rows = static_cast<long>(traj.times.size());
    const int N = traj.levels;

    // Growth rate: linear regression of log sup_k (z N^2/k^2) on t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long count = 0;
    for (long r = 0; r < rows; ++r) {
        if (traj.times[r] > fit_horizon) break;
        double sup = 0.0;
        for (int c = 0; c < N; ++c) sup = std::max(sup, scaled_z(traj, r, c));
        if (sup <= 0.0) continue;
        const double x = traj.times[r];
        const double y = std::log(sup);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    EnvelopeFit fit;
    if (count >= 2) {
        const double det = count * sxx - sx * sx;
        if (det > 0.0) fit.growth = std::max(0.0, (count * sxy - sx * sy) / det);
    }
    fit.amplitude = envelope_amplitude(traj, fit.growth);
    fit.violation_ratio = envelope_violation(traj, 1.0, fit.growth);
    return fit;
}

double envelope_violation(const LadderTrajectory& traj, double amplitude, double growth) {
    double worst = 0.0;
    const long rows = static_cast<long>(traj.times.size());
    for (long r = 0; r < rows; ++r) {
        const double scale = amplitude * std::exp(growth * traj.times[r]);
        for (int c = 0; c < traj.levels; ++c)
            worst = std::max(worst, scaled_z(traj, r, c) / scale);
    }
    return worst;
}

double envelope_amplitude(const LadderTrajectory& traj, double growth) {
    return envelope_violation(traj, 1.0, growth);
}

double fit_k_exponent(const LadderTrajectory& traj, double t) {
    const long rows = static_cast<long>(traj.times.size());
    if (rows == 0 || traj.levels < 2)
        throw DegenerateDesign("fit_k_exponent: need >= 2 levels");
    long row = 0;
    for (long r = 1; r < rows; ++r)
        if (std::abs(traj.times[r] - t) < std::abs(traj.times[row] - t)) row = r;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long count = 0;
    for (int c = 0; c < traj.levels; ++c) {
        const double zv = traj.z(row, c);
        if (zv <= 0.0) continue;
        const double x = std::log(c + 1.0);
        const double y = std::log(zv);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    const double det = count * sxx - sx * sx;
    if (count < 2 || det <= 0.0)
        throw DegenerateDesign("fit_k_exponent: degenerate design");
    return (count * sxy - sx * sy) / det;
}

}  // namespace chaosmeter
