// Throughput comparison between the serial reference kernels and their
// OpenMP counterparts: the O(N^2) pairwise interaction loop and ensemble
// stepping. Also asserts bitwise agreement between the two paths.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chaosmeter/particle_sim.hpp"
#include "chaosmeter/rng.hpp"

using namespace chaosmeter;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

void bench_pairwise(int n, int repeats) {
    std::vector<double> x(n), serial_out(n), parallel_out(n);
    rng::fill_normals(12345, 0, x);
    const std::function<double(double)> gamma = [](double u) { return std::sin(u); };

    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) pairwise_interaction_serial(x, gamma, serial_out);
    const double t_serial = seconds_since(start) / repeats;

    start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r)
        pairwise_interaction_parallel(x, gamma, parallel_out);
    const double t_parallel = seconds_since(start) / repeats;

    bool identical = true;
    for (int i = 0; i < n; ++i) identical = identical && serial_out[i] == parallel_out[i];

    std::printf("pairwise  N=%5d  serial %9.3f ms  omp %9.3f ms  speedup %5.2fx  %s\n",
                n, 1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel,
                identical ? "bitwise-equal" : "MISMATCH");
}

void bench_ensemble(int n, int m, int steps) {
    const DriftSpec drift{LinearDrift{1.0, 0.5}, 1};
    const double dt = 1e-3;
    const double T = steps * dt;

#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    auto start = std::chrono::steady_clock::now();
    const ParticleEnsemble serial = simulate_ensemble(drift, n, m, T, dt, 7);
    const double t_serial = seconds_since(start);

#ifdef _OPENMP
    omp_set_num_threads(omp_get_num_procs());
#endif
    start = std::chrono::steady_clock::now();
    const ParticleEnsemble parallel = simulate_ensemble(drift, n, m, T, dt, 7);
    const double t_parallel = seconds_since(start);

    const bool identical = serial.states == parallel.states;
    std::printf("ensemble  N=%5d M=%5d steps=%d  serial %7.3f s  omp %7.3f s  "
                "speedup %5.2fx  %s\n",
                n, m, steps, t_serial, t_parallel, t_serial / t_parallel,
                identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads available: %d\n", omp_get_num_procs());
#else
    std::printf("built without OpenMP\n");
#endif
    for (const int n : {256, 1024, 4096}) bench_pairwise(n, n <= 1024 ? 50 : 5);
    bench_ensemble(16, 5000, 200);
    bench_ensemble(256, 200, 200);
    return 0;
}
