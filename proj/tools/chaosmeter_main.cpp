// chaosmeter: config-driven experiment runner for mean-field particle
// systems. Subcommands: oracle-check, rates, mc-validate, ladder, coupling.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chaosmeter/experiments.hpp"

namespace {

using namespace chaosmeter::experiments;

struct CommonOptions {
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->set_config("--config", "", "Configuration file (INI/TOML key-value)");
    cmd->add_option("--out", common.out_dir, "Output directory")
        ->envname("CHAOSMETER_OUT");
    cmd->add_option("--seed", common.seed, "Master seed")->envname("CHAOSMETER_SEED");
    cmd->add_option("--threads", common.threads, "Worker thread count (0: default)")
        ->envname("CHAOSMETER_THREADS");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int report_error(const std::exception& e) {
    nlohmann::json record;
    record["error"]["message"] = e.what();
    std::fprintf(stderr, "%s\n", record.dump().c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification of sharp mean-field convergence rates"};
    app.require_subcommand(1);

    CommonOptions common;

    OracleCheckConfig oracle_cfg;
    auto* oracle_cmd =
        app.add_subcommand("oracle-check", "Closed forms vs the Lyapunov ODE oracle");
    add_common(oracle_cmd, common);
    oracle_cmd->add_option("--n-list", oracle_cfg.n_list, "Particle counts")
        ->delimiter(',');
    oracle_cmd->add_option("--t-list", oracle_cfg.t_list, "Probe times")->delimiter(',');
    oracle_cmd->add_option("--lyapunov-dt", oracle_cfg.lyapunov_dt, "Oracle RK4 step");

    RatesConfig rates_cfg;
    auto* rates_cmd = app.add_subcommand("rates", "Closed-form rate sweeps in n and k");
    add_common(rates_cmd, common);
    rates_cmd->add_option("--a", rates_cfg.a, "Confinement rate");
    rates_cmd->add_option("--b", rates_cfg.b, "Interaction strength");
    rates_cmd->add_option("--t", rates_cfg.t, "Probe time");
    rates_cmd->add_option("--n-list", rates_cfg.n_list, "Particle counts")->delimiter(',');
    rates_cmd->add_option("--k-fixed", rates_cfg.k_fixed, "Marginal size for the n sweep");
    rates_cmd->add_option("--n-fixed", rates_cfg.n_fixed, "Particle count for the k sweep");
    rates_cmd->add_option("--k-max", rates_cfg.k_max, "Largest marginal in the k sweep");

    McValidateConfig mc_cfg;
    auto* mc_cmd =
        app.add_subcommand("mc-validate", "Monte Carlo plug-in estimates vs exact laws");
    add_common(mc_cmd, common);
    mc_cmd->add_option("--a", mc_cfg.a, "Confinement rate");
    mc_cmd->add_option("--b", mc_cfg.b, "Interaction strength");
    mc_cmd->add_option("--n", mc_cfg.n, "Particle count");
    mc_cmd->add_option("--k", mc_cfg.k, "Marginal size");
    mc_cmd->add_option("--replicas", mc_cfg.replicas, "Monte Carlo replicas");
    mc_cmd->add_option("--dt", mc_cfg.dt, "Euler-Maruyama step");
    mc_cmd->add_option("--T", mc_cfg.T, "Horizon");
    mc_cmd->add_option("--bootstrap", mc_cfg.bootstrap_resamples, "Bootstrap resamples");
    mc_cmd->add_flag("--dump-samples", mc_cfg.dump_samples,
                     "Also write the raw terminal samples");

    LadderConfig ladder_cfg;
    auto* ladder_cmd =
        app.add_subcommand("ladder", "Comparison ODE ladder and envelope fit");
    add_common(ladder_cmd, common);
    ladder_cmd->add_option("--n-list", ladder_cfg.n_list, "Ladder heights")->delimiter(',');
    ladder_cmd->add_option("--C", ladder_cfg.C, "Hierarchy constant");
    ladder_cmd->add_option("--alpha", ladder_cfg.alpha, "Combination weight (> C)");
    ladder_cmd->add_option("--T", ladder_cfg.T, "Horizon");
    ladder_cmd->add_option("--fit-horizon", ladder_cfg.fit_horizon, "Growth-fit horizon");

    CouplingConfig coupling_cfg;
    auto* coupling_cmd =
        app.add_subcommand("coupling", "Synchronous coupling distance diagnostic");
    add_common(coupling_cmd, common);
    coupling_cmd->add_option("--n-list", coupling_cfg.n_list, "System sizes")
        ->delimiter(',');
    coupling_cmd->add_option("--replicas", coupling_cfg.replicas, "Monte Carlo replicas");
    coupling_cmd->add_option("--T", coupling_cfg.T, "Horizon");
    coupling_cmd->add_option("--dt", coupling_cfg.dt, "Euler-Maruyama step");
    coupling_cmd->add_option("--confinement-rate", coupling_cfg.confinement_rate,
                             "F(x) = -rate x");
    coupling_cmd->add_option("--interaction", coupling_cfg.interaction,
                             "Interaction kernel (sin | zero)");
    coupling_cmd->add_option("--pool-size", coupling_cfg.pool_size,
                             "Mean-field pool size (0: automatic)");

    CLI11_PARSE(app, argc, argv);
    apply_threads(common.threads);

    try {
        if (oracle_cmd->parsed()) {
            const OracleCheckResult result = run_oracle_check(oracle_cfg, common.out_dir);
            std::printf("oracle-check: %s (max cov err %.3g, max formula err %.3g)\n",
                        result.all_pass ? "PASS" : "FAIL", result.max_cov_error,
                        result.max_formula_error);
            return result.all_pass ? 0 : 1;
        }
        if (rates_cmd->parsed()) {
            const RatesResult result = run_rates(rates_cfg, common.out_dir);
            std::printf("rates: I exponent vs n = %.6f, vs k = %.6f\n",
                        result.fisher_vs_n.exponent, result.fisher_vs_k.exponent);
            return 0;
        }
        if (mc_cmd->parsed()) {
            mc_cfg.seed = common.seed;
            const McValidateResult result = run_mc_validate(mc_cfg, common.out_dir);
            std::printf("mc-validate: I = %.6g (se %.2g, discrete ref %.6g), "
                        "H = %.6g (se %.2g, discrete ref %.6g)\n",
                        result.estimate.fisher, result.estimate.fisher_stderr,
                        result.fisher_discrete, result.estimate.entropy,
                        result.estimate.entropy_stderr, result.entropy_discrete);
            return 0;
        }
        if (ladder_cmd->parsed()) {
            const LadderResult result = run_ladder(ladder_cfg, common.out_dir);
            std::printf("ladder: common growth %.4f\n", result.common_growth);
            for (const auto& [N, amp] : result.amplitude)
                std::printf("  N=%d amplitude %.6f z1(T) %.6g\n", N, amp,
                            result.z1_terminal.at(N));
            return 0;
        }
        if (coupling_cmd->parsed()) {
            coupling_cfg.seed = common.seed;
            const CouplingResult result = run_coupling(coupling_cfg, common.out_dir);
            for (const auto& [N, dist] : result.terminal_distance)
                std::printf("coupling: N=%d terminal E|X-Xbar|^2 = %.6g (se %.2g)\n", N,
                            dist, result.terminal_stderr.at(N));
            return 0;
        }
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return 1;
}
