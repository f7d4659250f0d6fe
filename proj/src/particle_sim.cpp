#include "chaosmeter/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chaosmeter/errors.hpp"
#include "chaosmeter/rng.hpp"

namespace chaosmeter {

namespace {

// Stream ids hung off the master seed. Fixed forever: changing them changes
// every simulated ensemble.
constexpr std::uint64_t kEnsembleStream = 1;
constexpr std::uint64_t kPoolStream = 2;
constexpr std::uint64_t kCouplingStream = 3;

constexpr std::size_t kBlock = 512;

long checked_step_count(double T, double dt) {
    if (dt <= 0.0) throw InvalidConfig("dt must be > 0");
    if (T < 0.0) throw InvalidConfig("T must be >= 0");
    const auto steps = static_cast<long>(std::llround(T / dt));
    if (std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T))
        throw InvalidConfig("T must be an integer multiple of dt");
    return steps;
}

double linear_coupling(const LinearDrift& d, int N) {
    return N > 1 ? d.b / (N - 1.0) : 0.0;
}

}  // namespace

void pairwise_interaction_serial(std::span<const double> x,
                                 const std::function<double(double)>& gamma,
                                 std::span<double> out) {
    const std::size_t n = x.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t jb = 0; jb < n; jb += kBlock) {
        const std::size_t je = std::min(jb + kBlock, n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = jb; j < je; ++j) acc += gamma(x[i] - x[j]);
            out[i] += acc;
        }
    }
    const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
    for (std::size_t i = 0; i < n; ++i) out[i] *= inv_n;
}

void pairwise_interaction_parallel(std::span<const double> x,
                                   const std::function<double(double)>& gamma,
                                   std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::ptrdiff_t jb = 0; jb < n; jb += static_cast<std::ptrdiff_t>(kBlock)) {
            const std::ptrdiff_t je =
                std::min(jb + static_cast<std::ptrdiff_t>(kBlock), n);
            double acc = 0.0;
            for (std::ptrdiff_t j = jb; j < je; ++j) acc += gamma(x[i] - x[j]);
            total += acc;
        }
        out[i] = total * inv_n;
    }
}

void em_step(std::span<double> states, const DriftSpec& drift, double dt,
             std::span<const double> noise) {
    if (drift.dim != 1) throw InvalidConfig("em_step: only scalar particles supported");
    if (noise.size() != states.size())
        throw std::invalid_argument("em_step: noise size mismatch");
    const std::size_t n = states.size();

    if (const auto* linear = std::get_if<LinearDrift>(&drift.kind)) {
        const double coupling = linear_coupling(*linear, static_cast<int>(n));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += states[i];
        if (linear->convention == DriftConvention::kClosedForm) {
            for (std::size_t i = 0; i < n; ++i)
                states[i] += dt * (-linear->a * states[i] - coupling * sum) + noise[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                states[i] +=
                    dt * (-linear->a * states[i] + coupling * (sum - states[i])) + noise[i];
        }
    } else {
        const auto& general = std::get<GeneralDrift>(drift.kind);
        std::vector<double> interaction(n);
        pairwise_interaction_serial(states, general.interaction, interaction);
        for (std::size_t i = 0; i < n; ++i)
            states[i] +=
                dt * (general.confinement(states[i]) + interaction[i]) + noise[i];
    }

    for (const double x : states)
        if (!std::isfinite(x)) throw NonFinite("em_step: state left the finite range");
}

ParticleEnsemble simulate_ensemble(const DriftSpec& drift, int N, int M, double T,
                                   double dt, std::uint64_t master_seed) {
    if (N < 1) throw InvalidConfig("simulate_ensemble: N must be >= 1");
    if (M < 0) throw InvalidConfig("simulate_ensemble: M must be >= 0");
    const long steps = checked_step_count(T, dt);

    ParticleEnsemble ensemble;
    ensemble.replicas = M;
    ensemble.particles = N;
    ensemble.dim = drift.dim;
    ensemble.time = T;
    ensemble.master_seed = master_seed;
    ensemble.states.assign(static_cast<std::size_t>(M) * N, 0.0);
    if (M == 0) return ensemble;

    const std::uint64_t base = rng::substream(master_seed, kEnsembleStream);
    const std::uint64_t pairs_per_step = rng::pairs_for(static_cast<std::uint64_t>(N));
    const double root_dt = std::sqrt(dt);

    bool failed = false;
    long failed_replica = -1, failed_step = -1;
#pragma omp parallel
    {
        std::vector<double> noise(N);
#pragma omp for schedule(static)
        for (int r = 0; r < M; ++r) {
            if (failed) continue;
            const std::uint64_t key = rng::substream(base, static_cast<std::uint64_t>(r));
            auto states = ensemble.replica(r);
            for (long m = 0; m < steps; ++m) {
                rng::fill_normals(key, static_cast<std::uint64_t>(m) * pairs_per_step, noise);
                for (double& z : noise) z *= root_dt;
                try {
                    em_step(states, drift, dt, noise);
                } catch (const NonFinite&) {
#pragma omp critical
                    if (!failed) {
                        failed = true;
                        failed_replica = r;
                        failed_step = m;
                    }
                    break;
                }
            }
        }
    }
    if (failed) {
        std::ostringstream msg;
        msg << "simulate_ensemble: non-finite state in replica " << failed_replica
            << " at step " << failed_step;
        throw NonFinite(msg.str());
    }
    return ensemble;
}

void write_samples_csv(const ParticleEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("write_samples_csv: cannot open " + path);
    out << "replica,particle,coordinate,value\n";
    char buf[64];
    for (int r = 0; r < ensemble.replicas; ++r) {
        const auto row = ensemble.replica(r);
        for (int i = 0; i < ensemble.particles; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << r << ',' << i << ",0," << buf << '\n';
        }
    }
}

ParticleEnsemble read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("read_samples_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("replica,", 0) != 0)
        throw InvalidConfig("read_samples_csv: missing header in " + path);

    int max_replica = -1, max_particle = -1;
    std::vector<std::tuple<int, int, double>> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int r = 0, i = 0, coord = 0;
        double value = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lg", &r, &i, &coord, &value) != 4 ||
            coord != 0)
            throw InvalidConfig("read_samples_csv: malformed row: " + line);
        cells.emplace_back(r, i, value);
        max_replica = std::max(max_replica, r);
        max_particle = std::max(max_particle, i);
    }
    ParticleEnsemble ensemble;
    ensemble.replicas = max_replica + 1;
    ensemble.particles = max_particle + 1;
    ensemble.states.assign(
        static_cast<std::size_t>(ensemble.replicas) * ensemble.particles, 0.0);
    for (const auto& [r, i, value] : cells)
        ensemble.states[static_cast<std::size_t>(r) * ensemble.particles + i] = value;
    return ensemble;
}

namespace {

// Per-step lookup table for the pool average x -> (1/P) sum_j Gamma(x - y_j).
struct ConvolutionTable {
    double lo = 0.0;
    double step_inv = 0.0;
    std::vector<double> values;

    double operator()(double x) const {
        const double pos = (x - lo) * step_inv;
        if (pos <= 0.0) return values.front();
        const auto last = static_cast<double>(values.size() - 1);
        if (pos >= last) return values.back();
        const auto idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        return values[idx] + frac * (values[idx + 1] - values[idx]);
    }
};

ConvolutionTable build_table(std::span<const double> pool,
                             const std::function<double(double)>& gamma,
                             int resolution) {
    ConvolutionTable table;
    const auto [lo_it, hi_it] = std::minmax_element(pool.begin(), pool.end());
    // Mean-field partners follow the same dynamics as the pool; a fixed pad
    // keeps clamped queries rare enough to be statistically invisible.
    const double lo = *lo_it - 2.0, hi = *hi_it + 2.0;
    table.lo = lo;
    table.step_inv = (resolution - 1) / (hi - lo);
    table.values.resize(resolution);
    const double inv_p = 1.0 / static_cast<double>(pool.size());
    const double step = (hi - lo) / (resolution - 1);
#pragma omp parallel for schedule(static)
    for (int g = 0; g < resolution; ++g) {
        const double x = lo + g * step;
        double acc = 0.0;
        for (const double y : pool) acc += gamma(x - y);
        table.values[g] = acc * inv_p;
    }
    return table;
}

}  // namespace

CouplingRun coupled_chaos_run(const GeneralDrift& drift, int N, int M, double T,
                              double dt, std::uint64_t master_seed,
                              const CouplingOptions& options) {
    if (N < 1 || M < 1) throw InvalidConfig("coupled_chaos_run: N and M must be >= 1");
    if (!drift.interaction_bounded)
        throw InvalidConfig("coupled_chaos_run: interaction kernel must be bounded");
    const long steps = checked_step_count(T, dt);
    const double root_dt = std::sqrt(dt);

    CouplingRun run;
    run.pool_size = options.pool_size > 0 ? options.pool_size
                                          : std::max(10 * N, 10000);
    run.pool_warning = run.pool_size < 10 * N;
    const int P = run.pool_size;

    // Pass 1: evolve the auxiliary pool, recording the convolution proxy
    // for every step. The pool approximates the mean-field law; its own
    // update uses the same proxy (self-consistent single pass).
    std::vector<double> pool(P, 0.0);
    std::vector<ConvolutionTable> tables;
    std::vector<std::vector<double>> snapshots;
    if (options.tabulated_convolution)
        tables.reserve(steps);
    else
        snapshots.reserve(steps);
    {
        const std::uint64_t pool_key = rng::substream(master_seed, kPoolStream);
        const std::uint64_t pairs = rng::pairs_for(static_cast<std::uint64_t>(P));
        std::vector<double> noise(P), drift_term(P);
        for (long m = 0; m < steps; ++m) {
            const ConvolutionTable* table = nullptr;
            if (options.tabulated_convolution) {
                tables.push_back(build_table(pool, drift.interaction,
                                             options.table_resolution));
                table = &tables.back();
            } else {
                snapshots.push_back(pool);
            }
            const std::vector<double>& snap =
                options.tabulated_convolution ? pool : snapshots.back();
            rng::fill_normals(pool_key, static_cast<std::uint64_t>(m) * pairs, noise);
#pragma omp parallel for schedule(static)
            for (int j = 0; j < P; ++j) {
                double conv;
                if (table) {
                    conv = (*table)(pool[j]);
                } else {
                    double acc = 0.0;
                    for (const double y : snap) acc += drift.interaction(pool[j] - y);
                    conv = acc / static_cast<double>(P);
                }
                drift_term[j] = drift.confinement(pool[j]) + conv;
            }
            for (int j = 0; j < P; ++j) {
                pool[j] += dt * drift_term[j] + root_dt * noise[j];
                if (!std::isfinite(pool[j]))
                    throw NonFinite("coupled_chaos_run: pool state diverged");
            }
        }
    }
    const auto convolution_at = [&](long m, double x) -> double {
        if (options.tabulated_convolution) return tables[m](x);
        double acc = 0.0;
        for (const double y : snapshots[m]) acc += drift.interaction(x - y);
        return acc / static_cast<double>(P);
    };

    // Pass 2: replicas of the coupled pair, same Brownian increments per
    // particle index on both sides.
    run.times.resize(steps + 1);
    for (long m = 0; m <= steps; ++m) run.times[m] = m * dt;
    std::vector<std::vector<double>> traces(
        M, std::vector<double>(steps + 1, 0.0));

    const std::uint64_t base = rng::substream(master_seed, kCouplingStream);
    const std::uint64_t pairs = rng::pairs_for(static_cast<std::uint64_t>(N));
    bool failed = false;
#pragma omp parallel
    {
        std::vector<double> interacting(N), mean_field(N), noise(N), interaction(N);
#pragma omp for schedule(static)
        for (int r = 0; r < M; ++r) {
            if (failed) continue;
            const std::uint64_t key = rng::substream(base, static_cast<std::uint64_t>(r));
            std::fill(interacting.begin(), interacting.end(), 0.0);
            std::fill(mean_field.begin(), mean_field.end(), 0.0);
            for (long m = 0; m < steps; ++m) {
                rng::fill_normals(key, static_cast<std::uint64_t>(m) * pairs, noise);
                pairwise_interaction_serial(interacting, drift.interaction, interaction);
                bool finite = true;
                for (int i = 0; i < N; ++i) {
                    const double dB = root_dt * noise[i];
                    interacting[i] +=
                        dt * (drift.confinement(interacting[i]) + interaction[i]) + dB;
                    mean_field[i] +=
                        dt * (drift.confinement(mean_field[i]) +
                              convolution_at(m, mean_field[i])) +
                        dB;
                    finite = finite && std::isfinite(interacting[i]) &&
                             std::isfinite(mean_field[i]);
                }
                if (!finite) {
#pragma omp critical
                    failed = true;
                    break;
                }
                double dist = 0.0;
                for (int i = 0; i < N; ++i) {
                    const double d = interacting[i] - mean_field[i];
                    dist += d * d;
                }
                traces[r][m + 1] = dist / N;
            }
        }
    }
    if (failed) throw NonFinite("coupled_chaos_run: non-finite state in a replica");

    run.mean_square_distance.assign(steps + 1, 0.0);
    for (int r = 0; r < M; ++r)
        for (long m = 0; m <= steps; ++m) run.mean_square_distance[m] += traces[r][m];
    for (double& d : run.mean_square_distance) d /= M;

    double ss = 0.0;
    for (int r = 0; r < M; ++r) {
        const double dev = traces[r][steps] - run.mean_square_distance[steps];
        ss += dev * dev;
    }
    run.terminal_stderr = M > 1 ? std::sqrt(ss / (M - 1.0) / M) : 0.0;
    return run;
}

}  // namespace chaosmeter
