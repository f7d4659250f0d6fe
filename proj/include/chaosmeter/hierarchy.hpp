#pragma once

#include <Eigen/Dense>
#include <vector>

// Comparison ODE ladder for the coupled (entropy, Fisher) hierarchy: the
// differential inequalities
//   dI^k/dt <= C k^2/N^2 + C k (H^{k+1}-H^k) + C k (I^{k+1}-I^k) + C I^k
//   dH^k/dt <= -I^k + C k^2/N^2 + C k (H^{k+1}-H^k)
// are integrated as equalities; the solution dominates the inequality
// system and is checked against the envelope z^k <= C_amp e^{C_growth t}
// k^2/N^2 with z = I + alpha H.

namespace chaosmeter {

struct ClosureSpec {
    enum class Kind {
        /// At the top level the ladder difference terms vanish:
        /// dI^N = C + C I^N, dH^N = -I^N + C.
        kDecoupled,
        /// The level above the top is pinned at the given constants;
        /// used for truncated scaling studies with k_max < N.
        kPinned,
    };
    Kind kind = Kind::kDecoupled;
    double pinned_entropy = 0.0;
    double pinned_fisher = 0.0;
};

struct LadderSystem {
    int levels = 1;       ///< N: number of ladder levels
    double C = 1.0;       ///< hierarchy constant
    double alpha = 2.0;   ///< combination weight in z = I + alpha H; > C
    ClosureSpec closure;
    Eigen::VectorXd entropy0;  ///< H_0^k, k = 1..N
    Eigen::VectorXd fisher0;   ///< I_0^k, k = 1..N
};

/// Assembles a ladder system. Null initial profiles default to k^2/N^2.
/// Throws InvalidClosure if levels < 1, C < 0, alpha <= C, or profile
/// lengths mismatch.
LadderSystem build_ladder(int levels, double C, double alpha,
                          ClosureSpec closure = {},
                          const Eigen::VectorXd* entropy0 = nullptr,
                          const Eigen::VectorXd* fisher0 = nullptr);

struct LadderTrajectory {
    int levels = 0;
    double C = 0.0;
    double alpha = 0.0;
    std::vector<double> times;
    /// Rows index the time grid, columns index k = 1..N.
    Eigen::MatrixXd entropy;
    Eigen::MatrixXd fisher;
    Eigen::MatrixXd z;
};

/// Fixed-step RK4 over [0, T]. Throws StepTooLarge when dt > 0.1 / (C N)
/// (the ladder coupling grows linearly in k, so the stability budget does
/// too).
LadderTrajectory integrate_ladder(const LadderSystem& system, double T, double dt);

struct EnvelopeFit {
    double growth = 0.0;          ///< fitted exponential rate
    double amplitude = 0.0;       ///< smallest amplitude covering the grid
    double violation_ratio = 0.0; ///< max of z N^2 / (k^2 e^{growth t})
};

/// Fits the smallest (amplitude, growth) with
/// z_t^k <= amplitude * e^{growth t} k^2/N^2 on the grid, using data up to
/// fit_horizon for the growth regression.
EnvelopeFit envelope_check(const LadderTrajectory& traj, double fit_horizon);

/// Max over the grid of z N^2 / (k^2 amplitude e^{growth t}) for externally
/// supplied envelope constants; <= 1 means the envelope holds.
double envelope_violation(const LadderTrajectory& traj, double amplitude, double growth);

/// Smallest amplitude covering the grid at a fixed growth rate.
double envelope_amplitude(const LadderTrajectory& traj, double growth);

/// Least-squares exponent of z^k in k at the grid time nearest to t.
double fit_k_exponent(const LadderTrajectory& traj, double t);

}  // namespace chaosmeter
