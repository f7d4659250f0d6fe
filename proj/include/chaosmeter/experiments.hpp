#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chaosmeter/estimators.hpp"
#include "chaosmeter/hierarchy.hpp"
#include "chaosmeter/ou_model.hpp"
#include "chaosmeter/particle_sim.hpp"

// Config-driven experiment runners behind the CLI. Every runner validates
// its config before touching the output directory, then writes results.csv,
// optional fits.csv and plot-*.svg, and manifest.json. Outputs are
// byte-deterministic in (config, seed) and independent of thread count.
// The runners only orchestrate: every number they emit comes from a module
// operation, tagged through the CSV source column.

namespace chaosmeter::experiments {

struct OracleCheckConfig {
    std::vector<std::pair<double, double>> ab_grid = {{1.0, 0.5}, {1.0, -0.25}, {0.5, 1.0}};
    std::vector<int> n_list = {4, 16};
    std::vector<double> t_list = {0.1, 1.0, 5.0};
    double lyapunov_dt = 1e-4;
    double cov_tol = 1e-8;
    double formula_tol = 1e-10;
};

struct OracleCheckResult {
    bool all_pass = false;
    double max_cov_error = 0.0;
    double max_formula_error = 0.0;
    int sandwich_violations = 0;
    int monotonicity_violations = 0;
    double uniform_in_time_rel_diff = 0.0;
};

struct RatesConfig {
    double a = 1.0;
    double b = 0.5;
    double t = 1.0;
    std::vector<int> n_list = {64, 128, 256, 512, 1024};
    int k_fixed = 2;
    int n_fixed = 1024;
    int k_max = 8;
};

struct RatesResult {
    RateFit fisher_vs_n;
    RateFit fisher_vs_k;
    RateFit entropy_vs_n;
    RateFit entropy_vs_k;
};

struct McValidateConfig {
    double a = 1.0;
    double b = 0.5;
    int n = 16;
    int k = 2;
    int replicas = 200000;
    double dt = 1e-3;
    double T = 1.0;
    std::uint64_t seed = 42;
    int bootstrap_resamples = 200;
    bool dump_samples = false;
};

struct McValidateResult {
    DivergenceEstimate estimate;
    double fisher_discrete = 0.0;
    double entropy_discrete = 0.0;
    double fisher_continuous = 0.0;
    double entropy_continuous = 0.0;
};

struct LadderConfig {
    std::vector<int> n_list = {16, 32, 64};
    double C = 1.0;
    double alpha = 2.0;
    double T = 1.0;
    double fit_horizon = 1.0;
};

struct LadderResult {
    double common_growth = 0.0;
    std::map<int, double> amplitude;      ///< per N, at the common growth
    std::map<int, double> z1_terminal;    ///< z^1 at T per N
};

struct CouplingConfig {
    std::vector<int> n_list = {50, 100};
    int replicas = 10000;
    double T = 1.0;
    double dt = 0.02;
    std::uint64_t seed = 42;
    double confinement_rate = 1.0;  ///< F(x) = -rate * x
    std::string interaction = "sin";
    int pool_size = 0;  ///< 0: automatic
};

struct CouplingResult {
    std::map<int, double> terminal_distance;
    std::map<int, double> terminal_stderr;
};

OracleCheckResult run_oracle_check(const OracleCheckConfig& config,
                                   const std::filesystem::path& out_dir);
RatesResult run_rates(const RatesConfig& config, const std::filesystem::path& out_dir);
McValidateResult run_mc_validate(const McValidateConfig& config,
                                 const std::filesystem::path& out_dir);
LadderResult run_ladder(const LadderConfig& config, const std::filesystem::path& out_dir);
CouplingResult run_coupling(const CouplingConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace chaosmeter::experiments
