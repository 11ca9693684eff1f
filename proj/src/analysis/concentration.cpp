#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gppsrl/analysis.hpp"
#include "gppsrl/log.hpp"

namespace gppsrl {

namespace {

struct Suprema {
    Eigen::VectorXd scalar;  // sup_x f_1(x)
    Eigen::VectorXd norm;    // sup_x |f(x)|_2
};

Suprema draw_suprema(const FiniteGaussian& law, int output_dim, int samples, Rng& rng) {
    Suprema out{Eigen::VectorXd(samples), Eigen::VectorXd(samples)};
    for (int i = 0; i < samples; ++i) {
        const Eigen::MatrixXd f = law.sample(output_dim, rng);  // points x output_dim
        out.scalar[i] = f.col(0).maxCoeff();
        out.norm[i] = f.rowwise().norm().maxCoeff();
    }
    return out;
}

double binomial_std(double p, int n) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / n); }

std::vector<TailRow> tail_rows(const Kernel& kernel, const FiniteGaussian& law, const TailCheckConfig& cfg,
                               int samples, Rng& rng) {
    const double C = kernel.variance();
    // Independent batch for the centering means.
    const Suprema centre = draw_suprema(law, cfg.output_dim, samples, rng);
    const Suprema draws = draw_suprema(law, cfg.output_dim, samples, rng);
    const double mean_scalar = centre.scalar.mean();
    const double mean_norm = centre.norm.mean();

    auto row = [&](const std::string& name, double u, const Eigen::VectorXd& values, double shift, double bound) {
        TailRow r;
        r.check = name;
        r.u = u;
        r.samples = samples;
        r.empirical = ((values.array() - shift) >= u).cast<double>().mean();
        r.bound = std::min(1.0, bound);
        r.std = binomial_std(r.bound, samples);
        r.pass = r.empirical <= r.bound + 3.0 * r.std;
        return r;
    };
    std::vector<TailRow> rows;
    for (double t : cfg.thresholds) {
        const double u = t * std::sqrt(C);
        rows.push_back(row("scalar", u, draws.scalar, mean_scalar, std::exp(-u * u / (2.0 * C))));
        rows.push_back(row("vector", u, draws.norm, mean_norm, std::exp(-u * u / (2.0 * C))));
    }
    const double u = large_deviation_threshold(kernel, cfg.radius);
    rows.push_back(row("vector_uncentered", u, draws.norm, 0.0, std::exp(-u * u / (8.0 * C))));
    return rows;
}

}  // namespace

double large_deviation_threshold(const Kernel& kernel, double radius) {
    const double C = kernel.variance();
    const double a = kernel.holder_exponent();
    const double L = kernel.holder_constant();
    return 84.0 / std::sqrt(a) *
           std::sqrt(C * kernel.input_dim() * std::log(5.0 + 5.0 * std::pow(radius, a) * L / C));
}

std::vector<TailRow> btis_tail_check(const Kernel& kernel, const TailCheckConfig& config, Rng& rng) {
    if (config.samples < 1000) throw std::invalid_argument("btis_tail_check: at least 1000 samples required");
    if (config.output_dim < 1) throw std::invalid_argument("btis_tail_check: output_dim must be >= 1");
    const Eigen::MatrixXd grid = ball_lattice(kernel.input_dim(), config.resolution, config.radius);
    const FiniteGaussian law(Eigen::VectorXd::Zero(grid.rows()), kernel.gram(grid));
    std::vector<TailRow> rows = tail_rows(kernel, law, config, config.samples, rng);
    const bool failed = std::any_of(rows.begin(), rows.end(), [](const TailRow& r) { return !r.pass; });
    if (failed) {
        log::warn("tail check failed at ", config.samples, " samples; rerunning with ", 4 * config.samples);
        rows = tail_rows(kernel, law, config, 4 * config.samples, rng);
    }
    return rows;
}

ChiSquaredResult chi_squared_moment_check(const GpPosterior& posterior, const Eigen::MatrixXd& probes, int samples,
                                          Rng& rng) {
    if (probes.rows() == 0) throw std::invalid_argument("chi_squared_moment_check: empty probe set");
    if (samples < 2) throw std::invalid_argument("chi_squared_moment_check: need at least 2 samples");
    const int ds = posterior.dataset().output_dim();
    const Eigen::VectorXd var = posterior.variances(probes);
    const FiniteGaussian centred(Eigen::VectorXd::Zero(probes.rows()), posterior.covariance(probes));

    auto run = [&](int n) {
        Eigen::VectorXd values(n);
        for (int i = 0; i < n; ++i) {
            // f^(n) and f* are independent posterior draws sharing the mean,
            // so only their centred parts enter the difference.
            const Eigen::MatrixXd diff = centred.sample(ds, rng) - centred.sample(ds, rng);
            values[i] = (diff.rowwise().squaredNorm().array() / (8.0 * var.array())).maxCoeff();
        }
        ChiSquaredResult r;
        r.samples = n;
        r.estimate = values.mean();
        r.std_error = std::sqrt((values.array() - r.estimate).square().sum() / (n - 1.0) / n);
        r.bound = std::log(static_cast<double>(probes.rows())) + ds * std::log(std::sqrt(2.0));
        r.pass = r.estimate <= r.bound + 3.0 * r.std_error;
        return r;
    };
    ChiSquaredResult r = run(samples);
    if (!r.pass) {
        log::warn("chi-squared moment check failed at ", samples, " samples; rerunning with ", 4 * samples);
        r = run(4 * samples);
    }
    return r;
}

double state_norm_D(const RadiusInputs& in) {
    if (!(in.C > 0.0) || !(in.noise_variance > 0.0) || !(in.L > 0.0) || !(in.alpha > 0.0) || in.T < 1 ||
        in.action_radius < 0.0 || in.state_dim < 1 || in.action_dim < 1)
        throw std::invalid_argument("state_norm_radius: parameters must be positive");
    return 168.0 / std::sqrt(in.alpha) * std::sqrt(std::max(in.C, in.noise_variance) * (in.state_dim + in.action_dim));
}

double state_norm_radius(const RadiusInputs& in) {
    const double D = state_norm_D(in);
    if (static_cast<double>(in.T) < state_norm_min_T(in))
        log::warn("T = ", in.T, " is below the admissible minimum ", state_norm_min_T(in), "; computing R anyway");
    return D * std::sqrt(std::log(10.0 * (static_cast<double>(in.T) + in.action_radius) * std::max(1.0, in.L / in.C)));
}

double state_norm_min_T(const RadiusInputs& in) {
    const double D = state_norm_D(in);
    return D * std::sqrt(2.0 * std::log(10.0 * D * std::max(1.0, in.L / in.C) * (in.action_radius + 1.0)));
}

ContainmentResult containment_verdict(double radius, long T, const std::vector<double>& max_norms, bool T_condition) {
    ContainmentResult r;
    r.radius = radius;
    r.runs = static_cast<int>(max_norms.size());
    r.T_condition = T_condition;
    for (double m : max_norms) {
        r.max_observed_norm = std::max(r.max_observed_norm, m);
        if (m > radius) ++r.exceeded;
    }
    const double p = 2.0 / static_cast<double>(T);
    r.fraction = r.runs ? static_cast<double>(r.exceeded) / r.runs : 0.0;
    r.allowed = p + 3.0 * (r.runs ? binomial_std(std::min(p, 1.0), r.runs) : 0.0);
    r.pass = r.fraction <= r.allowed;
    return r;
}

ContainmentResult containment_check(const RunConfig& config, unsigned threads) {
    RadiusInputs in;
    in.T = config.mdp.total_steps();
    in.action_radius = config.mdp.action_radius();
    in.C = config.kernel.variance();
    in.noise_variance = config.mdp.sigma * config.mdp.sigma;
    in.L = config.kernel.holder_constant();
    in.alpha = config.kernel.holder_exponent();
    in.state_dim = config.mdp.state_dim;
    in.action_dim = config.mdp.action_dim;
    const double radius = state_norm_radius(in);
    std::vector<double> norms;
    for (const RunResult& r : run_seeds(config, threads)) norms.push_back(r.max_state_norm);
    return containment_verdict(radius, in.T, norms, static_cast<double>(in.T) >= state_norm_min_T(in));
}

}  // namespace gppsrl
