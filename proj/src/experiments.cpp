#include "chaosmeter/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "chaosmeter/errors.hpp"
#include "chaosmeter/rate_table.hpp"
#include "chaosmeter/svg_plot.hpp"

namespace chaosmeter::experiments {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& experiment,
                    std::uint64_t seed, json config, json extra = json::object()) {
    json manifest;
    manifest["experiment"] = experiment;
    manifest["version"] = kVersion;
    manifest["seed"] = seed;
    manifest["config"] = std::move(config);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(manifest.dump())));
    manifest["config_hash"] = hash;
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    std::ofstream out(out_dir / "manifest.json");
    if (!out) throw InvalidConfig("cannot write manifest.json");
    out << manifest.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot write " + path.string());
    out << text;
}

struct FitRow {
    std::string label;
    double value = 0.0;
    double ci_halfwidth = 0.0;
};

void write_fits_csv(const std::filesystem::path& path, const std::vector<FitRow>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot write " + path.string());
    out << "label,value,ci_halfwidth\n";
    for (const FitRow& row : rows)
        out << row.label << ',' << format_double(row.value) << ','
            << format_double(row.ci_halfwidth) << '\n';
}

std::vector<int> marginal_sizes(int n) {
    std::vector<int> k_list = {1, 2, n};
    std::sort(k_list.begin(), k_list.end());
    k_list.erase(std::unique(k_list.begin(), k_list.end()), k_list.end());
    return k_list;
}

}  // namespace

OracleCheckResult run_oracle_check(const OracleCheckConfig& config,
                                   const std::filesystem::path& out_dir) {
    if (config.ab_grid.empty() || config.n_list.empty() || config.t_list.empty())
        throw InvalidConfig("oracle-check: empty sweep list");
    if (config.lyapunov_dt <= 0.0) throw InvalidConfig("oracle-check: bad lyapunov_dt");

    OracleCheckResult result;
    std::vector<RateRow> rows;
    for (const auto& [a, b] : config.ab_grid) {
        for (const int n : config.n_list) {
            const OUModelSpec model{a, b, n};
            const std::vector<int> k_list = marginal_sizes(n);
            for (const double t : config.t_list) {
                const Eigen::MatrixXd oracle = lyapunov_oracle(model, t, config.lyapunov_dt);
                for (const int k : k_list) {
                    const MarginalCovariance closed = marginal_covariance(model, k, t);
                    const double cov_err =
                        (closed.matrix() - oracle.topLeftCorner(k, k)).cwiseAbs().maxCoeff();
                    result.max_cov_error = std::max(result.max_cov_error, cov_err);

                    const GaussianLaw reference = mean_field_reference(model, k, t);
                    const double fisher_cf = fisher_closed_form(model, k, t);
                    const double entropy_cf = entropy_closed_form(model, k, t);
                    const double fisher_direct =
                        gaussian_fisher(marginal_law(model, k, t), reference);
                    const double entropy_direct =
                        gaussian_kl(marginal_law(model, k, t), reference);
                    result.max_formula_error =
                        std::max({result.max_formula_error,
                                  std::abs(fisher_cf - fisher_direct),
                                  std::abs(entropy_cf - entropy_direct)});

                    const GaussianLaw oracle_law{Eigen::VectorXd::Zero(k),
                                                 oracle.topLeftCorner(k, k)};
                    rows.push_back({"oracle-check", a, b, n, k, t, "I", fisher_cf, 0.0,
                                    "closed-form"});
                    rows.push_back({"oracle-check", a, b, n, k, t, "I",
                                    gaussian_fisher(oracle_law, reference), 0.0, "oracle"});
                    rows.push_back({"oracle-check", a, b, n, k, t, "H", entropy_cf, 0.0,
                                    "closed-form"});
                    rows.push_back({"oracle-check", a, b, n, k, t, "H",
                                    gaussian_kl(oracle_law, reference), 0.0, "oracle"});
                }
                for (int k = 1; k < n; ++k)
                    if (fisher_closed_form(model, k, t) >
                        fisher_closed_form(model, k + 1, t) * (1.0 + 1e-14))
                        ++result.monotonicity_violations;
            }
            // Sandwich bounds on a fine time grid; stated for attractive
            // interaction with confinement.
            if (a > 0.0 && b > 0.0) {
                for (int step = 1; step <= 50; ++step) {
                    const double t = 0.1 * step;
                    const auto [alpha, beta] = alpha_beta_bounds(a, b, t);
                    const double v = variance_v(a, t);
                    for (const int k : k_list) {
                        const double ratio =
                            static_cast<double>(k) * k / (static_cast<double>(n) * n);
                        const double lower = alpha * alpha / v * ratio;
                        const double upper = beta * beta / (v * (1.0 - beta)) * ratio;
                        const double fisher = fisher_closed_form(model, k, t);
                        const double slack = 1e-12 * std::max(1.0, upper);
                        if (fisher < lower - slack || fisher > upper + slack)
                            ++result.sandwich_violations;
                    }
                }
            }
        }
    }

    // Long-time stabilization of I * n^2 / k^2 for the confined attractive
    // probe model.
    {
        const OUModelSpec probe{1.0, 0.5, 64};
        const double scale = 64.0 * 64.0 / 4.0;
        const double s40 = fisher_closed_form(probe, 2, 40.0) * scale;
        const double s50 = fisher_closed_form(probe, 2, 50.0) * scale;
        result.uniform_in_time_rel_diff = std::abs(s50 - s40) / std::abs(s50);
    }

    result.all_pass = result.max_cov_error <= config.cov_tol &&
                      result.max_formula_error <= config.formula_tol &&
                      result.sandwich_violations == 0 &&
                      result.monotonicity_violations == 0 &&
                      result.uniform_in_time_rel_diff < 1e-6;

    std::filesystem::create_directories(out_dir);
    write_rate_csv((out_dir / "results.csv").string(), rows);
    json cfg;
    cfg["ab_grid"] = config.ab_grid;
    cfg["n_list"] = config.n_list;
    cfg["t_list"] = config.t_list;
    cfg["lyapunov_dt"] = config.lyapunov_dt;
    json extra;
    extra["checks"] = {{"all_pass", result.all_pass},
                       {"max_cov_error", result.max_cov_error},
                       {"max_formula_error", result.max_formula_error},
                       {"sandwich_violations", result.sandwich_violations},
                       {"monotonicity_violations", result.monotonicity_violations},
                       {"uniform_in_time_rel_diff", result.uniform_in_time_rel_diff}};
    write_manifest(out_dir, "oracle-check", 0, cfg, extra);
    return result;
}

RatesResult run_rates(const RatesConfig& config, const std::filesystem::path& out_dir) {
    if (config.n_list.empty()) throw InvalidConfig("rates: empty n list");
    if (config.k_max < 1 || config.k_fixed < 1 || config.n_fixed < 2)
        throw InvalidConfig("rates: bad k/n parameters");
    if (config.k_max > config.n_fixed) throw InvalidConfig("rates: k_max exceeds n_fixed");
    for (const int n : config.n_list)
        if (n < 2 || config.k_fixed > n) throw InvalidConfig("rates: bad n in sweep");

    std::vector<RateRow> rows;
    std::vector<std::pair<double, double>> fisher_n, entropy_n, fisher_k, entropy_k;
    for (const int n : config.n_list) {
        const OUModelSpec model{config.a, config.b, n};
        const double fisher = fisher_closed_form(model, config.k_fixed, config.t);
        const double entropy = entropy_closed_form(model, config.k_fixed, config.t);
        fisher_n.emplace_back(n, fisher);
        entropy_n.emplace_back(n, entropy);
        rows.push_back({"rates", config.a, config.b, n, config.k_fixed, config.t, "I",
                        fisher, 0.0, "closed-form"});
        rows.push_back({"rates", config.a, config.b, n, config.k_fixed, config.t, "H",
                        entropy, 0.0, "closed-form"});
    }
    const OUModelSpec fixed{config.a, config.b, config.n_fixed};
    for (int k = 1; k <= config.k_max; ++k) {
        const double fisher = fisher_closed_form(fixed, k, config.t);
        const double entropy = entropy_closed_form(fixed, k, config.t);
        fisher_k.emplace_back(k, fisher);
        entropy_k.emplace_back(k, entropy);
        rows.push_back({"rates", config.a, config.b, config.n_fixed, k, config.t, "I",
                        fisher, 0.0, "closed-form"});
        rows.push_back({"rates", config.a, config.b, config.n_fixed, k, config.t, "H",
                        entropy, 0.0, "closed-form"});
    }

    RatesResult result;
    result.fisher_vs_n = fit_rate(fisher_n, -1);
    result.entropy_vs_n = fit_rate(entropy_n, -1);
    result.fisher_vs_k = fit_rate(fisher_k, +1);
    result.entropy_vs_k = fit_rate(entropy_k, +1);

    std::filesystem::create_directories(out_dir);
    write_rate_csv((out_dir / "results.csv").string(), rows);
    write_fits_csv(out_dir / "fits.csv",
                   {{"I-exponent-vs-n", result.fisher_vs_n.exponent,
                     result.fisher_vs_n.ci_halfwidth},
                    {"I-exponent-vs-k", result.fisher_vs_k.exponent,
                     result.fisher_vs_k.ci_halfwidth},
                    {"H-exponent-vs-n", result.entropy_vs_n.exponent,
                     result.entropy_vs_n.ci_halfwidth},
                    {"H-exponent-vs-k", result.entropy_vs_k.exponent,
                     result.entropy_vs_k.ci_halfwidth}});
    write_text(out_dir / "plot-I-vs-n.svg",
               render_loglog(fisher_n, "n", "I", "Fisher information vs n"));
    write_text(out_dir / "plot-I-vs-k.svg",
               render_loglog(fisher_k, "k", "I", "Fisher information vs k"));
    json cfg;
    cfg["a"] = config.a;
    cfg["b"] = config.b;
    cfg["t"] = config.t;
    cfg["n_list"] = config.n_list;
    cfg["k_fixed"] = config.k_fixed;
    cfg["n_fixed"] = config.n_fixed;
    cfg["k_max"] = config.k_max;
    write_manifest(out_dir, "rates", 0, cfg);
    return result;
}

McValidateResult run_mc_validate(const McValidateConfig& config,
                                 const std::filesystem::path& out_dir) {
    if (config.n < 2 || config.k < 1 || config.k > config.n)
        throw InvalidConfig("mc-validate: bad n/k");
    if (config.replicas < 2) throw InvalidConfig("mc-validate: need at least 2 replicas");

    const OUModelSpec model{config.a, config.b, config.n};
    const DriftSpec drift{LinearDrift{config.a, config.b, model.convention}, 1};
    const ParticleEnsemble ensemble = simulate_ensemble(
        drift, config.n, config.replicas, config.T, config.dt, config.seed);
    const Eigen::MatrixXd samples = samples_matrix(ensemble);

    const auto steps = static_cast<int>(std::llround(config.T / config.dt));
    const double v_discrete = discrete_meanfield_variance(config.a, config.dt, steps);
    const GaussianLaw reference = GaussianLaw::isotropic(config.k, v_discrete);

    PluginOptions options;
    options.bootstrap_resamples = config.bootstrap_resamples;
    options.seed = config.seed;
    McValidateResult result;
    result.estimate = plugin_divergences(samples, config.k, reference, options);

    const Eigen::MatrixXd chain_cov = discrete_lyapunov(model, config.dt, steps);
    const GaussianLaw discrete_marginal{Eigen::VectorXd::Zero(config.k),
                                        chain_cov.topLeftCorner(config.k, config.k)};
    result.fisher_discrete = gaussian_fisher(discrete_marginal, reference);
    result.entropy_discrete = gaussian_kl(discrete_marginal, reference);
    result.fisher_continuous = fisher_closed_form(model, config.k, config.T);
    result.entropy_continuous = entropy_closed_form(model, config.k, config.T);

    std::filesystem::create_directories(out_dir);
    std::vector<RateRow> rows;
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "I",
                    result.estimate.fisher, result.estimate.fisher_stderr, "monte-carlo"});
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "H",
                    result.estimate.entropy, result.estimate.entropy_stderr, "monte-carlo"});
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "I",
                    result.fisher_discrete, 0.0, "oracle"});
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "H",
                    result.entropy_discrete, 0.0, "oracle"});
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "I",
                    result.fisher_continuous, 0.0, "closed-form"});
    rows.push_back({"mc-validate", config.a, config.b, config.n, config.k, config.T, "H",
                    result.entropy_continuous, 0.0, "closed-form"});
    write_rate_csv((out_dir / "results.csv").string(), rows);
    if (config.dump_samples)
        write_samples_csv(ensemble, (out_dir / "samples.csv").string());

    json cfg;
    cfg["a"] = config.a;
    cfg["b"] = config.b;
    cfg["n"] = config.n;
    cfg["k"] = config.k;
    cfg["replicas"] = config.replicas;
    cfg["dt"] = config.dt;
    cfg["T"] = config.T;
    cfg["bootstrap_resamples"] = config.bootstrap_resamples;
    write_manifest(out_dir, "mc-validate", config.seed, cfg);
    return result;
}

LadderResult run_ladder(const LadderConfig& config, const std::filesystem::path& out_dir) {
    if (config.n_list.empty()) throw InvalidConfig("ladder: empty N list");
    if (config.T <= 0.0 || config.fit_horizon <= 0.0)
        throw InvalidConfig("ladder: bad horizon");

    struct Entry {
        int N;
        LadderTrajectory traj;
    };
    std::vector<Entry> entries;
    for (const int N : config.n_list) {
        const LadderSystem system = build_ladder(N, config.C, config.alpha);
        const long steps = std::lround(std::ceil(
            std::max(10.0 * config.C * N * config.T, 10.0)));
        entries.push_back({N, integrate_ladder(system, config.T,
                                               config.T / static_cast<double>(steps))});
    }

    // Common growth rate: one regression over the pooled per-N suprema.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long count = 0;
    for (const Entry& entry : entries) {
        const long rows = static_cast<long>(entry.traj.times.size());
        for (long r = 0; r < rows; ++r) {
            if (entry.traj.times[r] > config.fit_horizon) break;
            double sup = 0.0;
            for (int c = 0; c < entry.traj.levels; ++c) {
                const double k = c + 1.0;
                sup = std::max(sup, entry.traj.z(r, c) * entry.N * entry.N / (k * k));
            }
            if (sup <= 0.0) continue;
            const double x = entry.traj.times[r], y = std::log(sup);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++count;
        }
    }
    LadderResult result;
    if (count >= 2) {
        const double det = count * sxx - sx * sx;
        if (det > 0.0) result.common_growth = std::max(0.0, (count * sxy - sx * sy) / det);
    }

    std::filesystem::create_directories(out_dir);
    std::vector<RateRow> rows;
    std::vector<FitRow> fits;
    fits.push_back({"envelope-growth-common", result.common_growth, 0.0});
    for (const Entry& entry : entries) {
        result.amplitude[entry.N] = envelope_amplitude(entry.traj, result.common_growth);
        const long last = static_cast<long>(entry.traj.times.size()) - 1;
        result.z1_terminal[entry.N] = entry.traj.z(last, 0);
        fits.push_back({"envelope-amp-N" + std::to_string(entry.N),
                        result.amplitude[entry.N], 0.0});

        std::ofstream traj_csv(out_dir / ("ladder-N" + std::to_string(entry.N) + ".csv"));
        if (!traj_csv) throw InvalidConfig("ladder: cannot write trajectory csv");
        traj_csv << "t,k,H,I,z\n";
        for (long r = 0; r <= last; ++r)
            for (int c = 0; c < entry.traj.levels; ++c)
                traj_csv << format_double(entry.traj.times[r]) << ',' << c + 1 << ','
                         << format_double(entry.traj.entropy(r, c)) << ','
                         << format_double(entry.traj.fisher(r, c)) << ','
                         << format_double(entry.traj.z(r, c)) << '\n';

        for (int c = 0; c < entry.traj.levels; ++c) {
            rows.push_back({"ladder", 0.0, 0.0, entry.N, c + 1, config.T, "z",
                            entry.traj.z(last, c), 0.0, "ladder"});
            rows.push_back({"ladder", 0.0, 0.0, entry.N, c + 1, config.T, "H",
                            entry.traj.entropy(last, c), 0.0, "ladder"});
            rows.push_back({"ladder", 0.0, 0.0, entry.N, c + 1, config.T, "I",
                            entry.traj.fisher(last, c), 0.0, "ladder"});
        }
    }
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
        if (entries[i + 1].N != 2 * entries[i].N) continue;
        const double ratio =
            result.z1_terminal[entries[i].N] / result.z1_terminal[entries[i + 1].N];
        fits.push_back({"z1-ratio-N" + std::to_string(entries[i].N) + "-vs-N" +
                            std::to_string(entries[i + 1].N),
                        ratio, 0.0});
    }
    write_rate_csv((out_dir / "results.csv").string(), rows);
    write_fits_csv(out_dir / "fits.csv", fits);

    json cfg;
    cfg["n_list"] = config.n_list;
    cfg["C"] = config.C;
    cfg["alpha"] = config.alpha;
    cfg["T"] = config.T;
    cfg["fit_horizon"] = config.fit_horizon;
    json extra;
    extra["closure"] = "top-level-decoupled";
    write_manifest(out_dir, "ladder", 0, cfg, extra);
    return result;
}

CouplingResult run_coupling(const CouplingConfig& config,
                            const std::filesystem::path& out_dir) {
    if (config.n_list.empty()) throw InvalidConfig("coupling: empty N list");
    if (config.replicas < 2) throw InvalidConfig("coupling: need at least 2 replicas");

    GeneralDrift drift;
    const double rate = config.confinement_rate;
    drift.confinement = [rate](double x) { return -rate * x; };
    if (config.interaction == "sin")
        drift.interaction = [](double u) { return std::sin(u); };
    else if (config.interaction == "zero")
        drift.interaction = [](double) { return 0.0; };
    else
        throw InvalidConfig("coupling: unknown interaction kernel '" +
                            config.interaction + "'");

    CouplingOptions options;
    options.pool_size = config.pool_size;

    CouplingResult result;
    std::vector<RateRow> rows;
    std::filesystem::create_directories(out_dir);
    for (const int N : config.n_list) {
        const CouplingRun run = coupled_chaos_run(drift, N, config.replicas, config.T,
                                                  config.dt, config.seed, options);
        result.terminal_distance[N] = run.mean_square_distance.back();
        result.terminal_stderr[N] = run.terminal_stderr;
        for (std::size_t m = 0; m < run.times.size(); ++m) {
            const bool terminal = m + 1 == run.times.size();
            rows.push_back({"coupling", 0.0, 0.0, N, 1, run.times[m], "coupling-dist",
                            run.mean_square_distance[m],
                            terminal ? run.terminal_stderr : 0.0, "monte-carlo"});
        }
    }
    write_rate_csv((out_dir / "results.csv").string(), rows);

    std::vector<FitRow> fits;
    for (std::size_t i = 0; i + 1 < config.n_list.size(); ++i) {
        const int n0 = config.n_list[i], n1 = config.n_list[i + 1];
        fits.push_back({"terminal-ratio-N" + std::to_string(n0) + "-vs-N" +
                            std::to_string(n1),
                        result.terminal_distance[n0] / result.terminal_distance[n1], 0.0});
    }
    write_fits_csv(out_dir / "fits.csv", fits);

    json cfg;
    cfg["n_list"] = config.n_list;
    cfg["replicas"] = config.replicas;
    cfg["T"] = config.T;
    cfg["dt"] = config.dt;
    cfg["confinement_rate"] = config.confinement_rate;
    cfg["interaction"] = config.interaction;
    cfg["pool_size"] = config.pool_size;
    write_manifest(out_dir, "coupling", config.seed, cfg);
    return result;
}

}  // namespace chaosmeter::experiments
