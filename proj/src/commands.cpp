#include "gppsrl/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "gppsrl/errors.hpp"
#include "gppsrl/log.hpp"
#include "gppsrl/parallel.hpp"

namespace gppsrl {

namespace {

std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

template <class Body>
int guarded(const CliOptions& options, Body&& body) {
    ExperimentConfig config;
    try {
        config = load_config(options.config, options.seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    try {
        return body(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

double reference_gain_exponent(const Kernel& k) {
    return k.family() == KernelFamily::SquaredExponential ? 0.0 : matern_gain_exponent(k.nu(), k.input_dim());
}

double reference_regret_exponent(const Kernel& k) {
    return k.family() == KernelFamily::SquaredExponential ? 0.5 : matern_regret_exponent(k.nu(), k.input_dim());
}

VerifyEntry entry(std::string tag, double lhs, double rhs, bool pass) {
    return VerifyEntry{std::move(tag), lhs, rhs, rhs - lhs, pass};
}

std::string seed_tag(const std::string& kernel, std::uint64_t seed) {
    return kernel + "/seed=" + std::to_string(seed);
}

}  // namespace

RateFit fit_regret_curve(const RegretCurve& curve) {
    const int n = static_cast<int>(curve.mean.size());
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = i + 1;
    return fit_loglog(xs, curve.mean, std::max(1, n / 10), n);
}

int cmd_run(const CliOptions& options) {
    return guarded(options, [&](const ExperimentConfig& config) {
        const std::string prov = provenance_line(config.hash, options.seed);
        std::vector<RunResult> all;
        std::vector<RateRow> rates;
        for (const Kernel& kernel : config.kernels) {
            std::vector<RunResult> runs = run_seeds(config.run_for(kernel), options.threads);
            const RegretCurve curve = bayesian_regret(runs);
            std::printf("%-9s final mean cumulative regret %.6g (std error %.3g, %zu seeds)\n", kernel.name().c_str(),
                        curve.mean.back(), curve.std_error.back(), runs.size());
            try {
                rates.push_back({"regret_vs_episode", kernel.name(), fit_regret_curve(curve),
                                 reference_regret_exponent(kernel)});
            } catch (const std::invalid_argument& e) {
                log::warn("no regret rate fit for ", kernel.name(), ": ", e.what());
            }
            for (auto& r : runs) all.push_back(std::move(r));
        }
        auto regret = open_output(options.out, "regret.csv");
        write_regret_csv(regret, prov, all);
        auto traj = open_output(options.out, "traj.csv");
        write_traj_csv(traj, prov, all);
        auto rate_file = open_output(options.out, "rates.csv");
        write_rates_csv(rate_file, prov, rates);
        return 0;
    });
}

int cmd_sweep_horizon(const CliOptions& options) {
    return guarded(options, [&](const ExperimentConfig& config) {
        const std::string prov = provenance_line(config.hash, options.seed);
        std::vector<RateRow> rates;
        auto points = open_output(options.out, "horizon.csv");
        points << prov << '\n' << "kernel,horizon,mean_final_regret,std_error\n";
        for (const Kernel& kernel : config.kernels) {
            std::vector<double> hs, finals;
            for (int H : config.horizons) {
                RunConfig run = config.run_for(kernel, H);
                run.track_exact_variance = false;
                const RegretCurve curve = bayesian_regret(run_seeds(run, options.threads));
                hs.push_back(H);
                finals.push_back(curve.mean.back());
                points << kernel.name() << ',' << H << ',' << format_number(curve.mean.back()) << ','
                       << format_number(curve.std_error.back()) << '\n';
                std::printf("%-9s H=%-4d final mean cumulative regret %.6g (std error %.3g)\n", kernel.name().c_str(),
                            H, curve.mean.back(), curve.std_error.back());
            }
            try {
                const RateFit fit = fit_loglog(hs, finals);
                rates.push_back({"regret_vs_horizon", kernel.name(), fit, 1.5});
                std::printf("%-9s slope vs H %.4f\n", kernel.name().c_str(), fit.slope);
            } catch (const std::invalid_argument& e) {
                log::warn("no horizon rate fit for ", kernel.name(), ": ", e.what());
            }
        }
        auto rate_file = open_output(options.out, "rates.csv");
        write_rates_csv(rate_file, prov, rates);
        return 0;
    });
}

int cmd_infogain(const CliOptions& options) {
    return guarded(options, [&](const ExperimentConfig& config) {
        const std::string prov = provenance_line(config.hash, options.seed);
        const InfoGainConfig& ig = config.infogain;
        const Eigen::MatrixXd domain = ball_lattice(ig.dim, ig.per_dim, ig.radius);
        int t_max = 0;
        for (int t : ig.Ts) t_max = std::max(t_max, t);
        std::vector<std::string> names;
        std::vector<InfoGainCurve> curves(ig.kernels.size());
        parallel_for(ig.kernels.size(), options.threads, [&](std::size_t i) {
            curves[i] = greedy_info_gain(ig.kernels[i], domain, t_max, ig.noise_variance);
        });
        std::vector<RateRow> rates;
        for (std::size_t i = 0; i < ig.kernels.size(); ++i) {
            const Kernel& k = ig.kernels[i];
            names.push_back(k.name());
            std::vector<double> xs, ys;
            for (int t : ig.Ts) {
                xs.push_back(t);
                ys.push_back(curves[i].cumulative[static_cast<std::size_t>(t - 1)]);
            }
            if (xs.size() >= 3) {
                const RateFit fit = fit_loglog(xs, ys);
                rates.push_back({"gain_vs_T", k.name(), fit, reference_gain_exponent(k)});
                std::printf("%-9s gamma_%d = %.6g, slope %.4f (reference exponent %.4f)\n", k.name().c_str(), t_max,
                            curves[i].cumulative.back(), fit.slope, reference_gain_exponent(k));
            }
        }
        std::printf("domain: %ld lattice points in the ball of radius %g (dimension %d)\n",
                    static_cast<long>(domain.rows()), ig.radius, ig.dim);
        auto gain_file = open_output(options.out, "infogain.csv");
        write_infogain_csv(gain_file, prov, names, curves);
        auto rate_file = open_output(options.out, "rates.csv");
        write_rates_csv(rate_file, prov, rates);
        return 0;
    });
}

RunConfig containment_run_config(const ExperimentConfig& config, std::uint64_t master_seed) {
    const ContainmentConfig& cc = config.verify.containment;
    RunConfig run = config.run_for(config.kernels.front());
    run.mdp.initial_state = InitialStateLaw::GaussianIso;
    run.mdp.episodes = cc.episodes;
    run.mdp.horizon = cc.horizon;
    run.grid.state_knots = cc.state_knots;
    run.grid.action_knots = cc.action_knots;
    run.num_features = cc.features;
    run.track_exact_variance = false;
    run.seeds.clear();
    for (int i = 0; i < cc.runs; ++i) run.seeds.push_back(split_seed(master_seed, 1000000 + static_cast<std::uint64_t>(i)));
    run.validate();
    return run;
}

ChiSquaredResult chi_squared_from_config(const ExperimentConfig& config, std::uint64_t master_seed) {
    Rng rng = make_stream(master_seed, 11);
    const MdpConfig& m = config.run.mdp;
    const Kernel& kernel = config.kernels.front();
    auto draw_inputs = [&](int n) {
        Eigen::MatrixXd x(n, m.state_dim + m.action_dim);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < x.cols(); ++d) x(i, d) = unit(rng) * (d < m.state_dim ? m.state_bound : m.action_bound);
        return x;
    };
    const ChiSquaredConfig& cc = config.verify.chi_squared;
    GpPosterior posterior(kernel, m.state_dim, config.run.effective_gp_noise());
    const Eigen::MatrixXd cond = draw_inputs(cc.conditioning_points);
    posterior.append(cond, standard_normal(cc.conditioning_points, m.state_dim, rng));
    const Eigen::MatrixXd probes = draw_inputs(cc.probes);
    return chi_squared_moment_check(posterior, probes, cc.samples, rng);
}

std::vector<VerifyEntry> run_verification(const ExperimentConfig& config, std::uint64_t master_seed, unsigned threads,
                                          std::vector<TailRow>& tails) {
    std::vector<VerifyEntry> entries;
    const double noise = config.run.effective_gp_noise();

    // Delayed elliptical potential on fresh runs of every configured kernel.
    for (const Kernel& kernel : config.kernels) {
        RunConfig run = config.run_for(kernel);
        run.track_exact_variance = true;
        for (const RunResult& r : run_seeds(run, threads)) {
            const EllipticalResult e =
                elliptical_potential_check(r.trajectories, kernel, noise, run.mdp.horizon, run.mdp.delta);
            entries.push_back({"elliptical_potential[" + seed_tag(r.kernel, r.seed) + "]", e.lhs, e.rhs, e.margin,
                               e.pass});
        }
    }
    if (!config.verify.traj_log.empty()) {
        std::ifstream in(config.verify.traj_log);
        if (!in) throw ConfigError("verify.traj_log: cannot read '" + config.verify.traj_log + "'");
        for (const TrajLog& log : read_traj_csv(in)) {
            const Kernel* kernel = nullptr;
            for (const Kernel& k : config.kernels)
                if (k.name() == log.kernel) kernel = &k;
            if (!kernel) throw ConfigError("verify.traj_log: kernel '" + log.kernel + "' is not configured");
            const int H = log.episodes.empty() ? config.run.mdp.horizon
                                               : static_cast<int>(log.episodes.front().steps.size());
            const EllipticalResult e = elliptical_potential_check(log.episodes, *kernel, noise, H, config.run.mdp.delta);
            if (!e.consistent)
                log::warn("logged posterior variances disagree with the replay (max gap ", e.max_mismatch, ")");
            entries.push_back({"elliptical_potential_log[" + seed_tag(log.kernel, log.seed) + "]", e.lhs, e.rhs,
                               e.margin, e.pass});
        }
    }

    // Tail bounds of the grid supremum.
    Rng tail_rng = make_stream(master_seed, 10);
    tails = btis_tail_check(config.verify.tail_kernel, config.verify.tails, tail_rng);
    for (const TailRow& t : tails) {
        char tag[64];
        std::snprintf(tag, sizeof tag, "btis_%s[u=%.4g]", t.check.c_str(), t.u);
        entries.push_back(entry(tag, t.empirical, t.bound + 3.0 * t.std, t.pass));
    }

    // Chi-squared exponential moment on a fixed conditioning set.
    {
        const ChiSquaredResult r = chi_squared_from_config(config, master_seed);
        entries.push_back(entry("chi_squared_moment", r.estimate, r.bound + 3.0 * r.std_error, r.pass));
    }

    // State-norm containment on the theory configuration.
    {
        const RunConfig run = containment_run_config(config, master_seed);
        const ContainmentResult c = containment_check(run, threads);
        std::printf("state containment: R = %.6g, max observed |s| = %.4g, %d/%d runs exceeded%s\n", c.radius,
                    c.max_observed_norm, c.exceeded, c.runs, c.T_condition ? "" : " (T below the admissible minimum)");
        entries.push_back(entry("state_containment", c.fraction, c.allowed, c.pass));
    }
    return entries;
}

int cmd_verify(const CliOptions& options) {
    return guarded(options, [&](const ExperimentConfig& config) {
        std::vector<TailRow> tails;
        const std::vector<VerifyEntry> entries = run_verification(config, options.seed, options.threads, tails);
        auto json_file = open_output(options.out, "verify.json");
        write_verify_json(json_file, entries);
        auto tail_file = open_output(options.out, "tails.csv");
        write_tails_csv(tail_file, provenance_line(config.hash, options.seed), tails);
        int failed = 0;
        for (const VerifyEntry& e : entries)
            if (!e.pass) {
                std::fprintf(stderr, "FAILED %s (lhs %.6g, rhs %.6g)\n", e.lemma_tag.c_str(), e.lhs, e.rhs);
                ++failed;
            }
        std::printf("%zu checks, %d failed\n", entries.size(), failed);
        return failed ? 1 : 0;
    });
}

}  // namespace gppsrl
