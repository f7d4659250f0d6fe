#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chaosmeter/ou_model.hpp"

// Euler-Maruyama simulation of the interacting particle system
//   dX^i = [ F(X^i) + (1/N) sum_j Gamma(X^i - X^j) ] dt + dB^i
// together with the mean-field limit process and a synchronous coupling
// between them. All noise is counter-based (see rng.hpp), so ensembles are
// bit-identical for a given master seed regardless of thread count.
//
// The O(N^2) pairwise kernel exists in a serial reference version and an
// OpenMP version; tests assert they agree bitwise and the bench target
// compares their throughput.

namespace chaosmeter {

/// Linear drift of the Gaussian example; must agree with drift_matrix().
struct LinearDrift {
    double a = 1.0;
    double b = 0.0;
    DriftConvention convention = DriftConvention::kClosedForm;
};

/// General smooth confinement F and bounded interaction kernel Gamma,
/// scalar state per particle.
struct GeneralDrift {
    std::function<double(double)> confinement;
    std::function<double(double)> interaction;
    bool interaction_bounded = true;
};

struct DriftSpec {
    std::variant<LinearDrift, GeneralDrift> kind = LinearDrift{};
    int dim = 1;  ///< per-particle dimension; scalar only for now

    bool is_linear() const { return std::holds_alternative<LinearDrift>(kind); }
};

/// M independent replicas of an N-particle scalar state.
struct ParticleEnsemble {
    int replicas = 0;
    int particles = 0;
    int dim = 1;
    double time = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<double> states;  ///< replicas x particles, row-major

    std::span<double> replica(int r) {
        return {states.data() + static_cast<std::size_t>(r) * particles,
                static_cast<std::size_t>(particles)};
    }
    std::span<const double> replica(int r) const {
        return {states.data() + static_cast<std::size_t>(r) * particles,
                static_cast<std::size_t>(particles)};
    }
};

/// out[i] = (1/N) sum_j gamma(x[i] - x[j]), direct pairwise loop.
/// Serial reference implementation.
void pairwise_interaction_serial(std::span<const double> x,
                                 const std::function<double(double)>& gamma,
                                 std::span<double> out);

/// Same contract, OpenMP-parallel over targets. The inner summation order
/// per target is fixed, so the result is bit-identical to the serial kernel.
void pairwise_interaction_parallel(std::span<const double> x,
                                   const std::function<double(double)>& gamma,
                                   std::span<double> out);

/// One Euler-Maruyama step in place. `noise` holds the Brownian increments
/// (already scaled by sqrt(dt)). Throws NonFinite if a coordinate leaves
/// the finite range.
void em_step(std::span<double> states, const DriftSpec& drift, double dt,
             std::span<const double> noise);

/// Simulates M independent replicas from the origin to time T. T must be an
/// integer multiple of dt. Parallel over replicas; deterministic in
/// (drift, N, M, T, dt, master_seed).
ParticleEnsemble simulate_ensemble(const DriftSpec& drift, int N, int M, double T,
                                   double dt, std::uint64_t master_seed);

/// Columnar dump (replica, particle, coordinate, value) of terminal samples.
void write_samples_csv(const ParticleEnsemble& ensemble, const std::string& path);

/// Reads a dump produced by write_samples_csv.
ParticleEnsemble read_samples_csv(const std::string& path);

/// Synchronous coupling between the interacting system and mean-field
/// copies driven by the same Brownian increments.
struct CouplingRun {
    std::vector<double> times;
    /// E |X^i_t - Xbar^i_t|^2, averaged over replicas and particle indices.
    std::vector<double> mean_square_distance;
    /// Standard error (over replicas) of the terminal distance.
    double terminal_stderr = 0.0;
    int pool_size = 0;
    bool pool_warning = false;  ///< pool smaller than 10 N
};

struct CouplingOptions {
    /// Auxiliary pool size for the mean-field convolution; 0 selects
    /// max(10 N, 10000).
    int pool_size = 0;
    /// Evaluate the pool average through a per-step lookup table (grid
    /// resolution below) instead of a direct O(pool) sum per query.
    bool tabulated_convolution = true;
    int table_resolution = 513;
};

/// Runs the coupling diagnostic for a general drift. The mean-field
/// convolution Gamma * mu_t is approximated by the empirical mean over an
/// auxiliary pool of independent copies evolved with the same scheme
/// (self-consistent single pass).
CouplingRun coupled_chaos_run(const GeneralDrift& drift, int N, int M, double T,
                              double dt, std::uint64_t master_seed,
                              const CouplingOptions& options = {});

}  // namespace chaosmeter
