#include "gppsrl/psrl.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <stdexcept>

#include "gppsrl/errors.hpp"
#include "gppsrl/gp.hpp"
#include "gppsrl/log.hpp"
#include "gppsrl/parallel.hpp"
#include "gppsrl/rff.hpp"

namespace gppsrl {

namespace {

enum Stream : std::uint64_t { kFeatures = 1, kTruth = 2, kAgent = 3, kEnvironment = 4 };

// Next-state means s + delta * f(s, a) on the grid, one matrix per state dim.
std::vector<Eigen::MatrixXd> grid_next_means(const GridFeatureCache& cache, const Grid& grid,
                                             const Eigen::MatrixXd& weights, double delta) {
    std::vector<Eigen::MatrixXd> next = cache.evaluate(weights);
    for (int d = 0; d < grid.state_dim(); ++d) {
        Eigen::MatrixXd& m = next[static_cast<std::size_t>(d)];
        m *= delta;
        m.colwise() += grid.cell_points().col(d);
    }
    return next;
}

}  // namespace

void RunConfig::validate() {
    mdp.validate();
    if (kernel.input_dim() != mdp.state_dim + mdp.action_dim)
        throw ConfigError("kernel input dimension must equal state_dim + action_dim");
    if (num_features < 1) throw ConfigError("features must be >= 1");
    if (grid.state_knots < 1 || grid.action_knots < 1) throw ConfigError("grid resolution must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ConfigError("seeds must be distinct");
}

double RunConfig::effective_gp_noise() const {
    if (gp_noise_variance > 0.0) return gp_noise_variance;
    const double s = mdp.sigma / mdp.delta;
    return s * s;
}

Grid RunConfig::make_grid() const {
    return Grid::uniform(mdp.state_dim, mdp.state_bound, grid.state_knots, mdp.action_dim, mdp.action_bound,
                         grid.action_knots);
}

Eigen::VectorXd initial_cell_weights(const Grid& grid, const MdpConfig& mdp) {
    if (mdp.initial_state == InitialStateLaw::GaussianIso)
        return gaussian_cell_weights(grid, mdp.effective_initial_std());
    return uniform_cell_weights(grid, -mdp.state_bound, mdp.state_bound);
}

RunResult run_psrl(const RunConfig& config, std::uint64_t seed, Agent agent) {
    const MdpConfig& mdp_cfg = config.mdp;
    const int H = mdp_cfg.horizon;
    const double noise = config.effective_gp_noise();

    Rng feature_rng = make_stream(seed, kFeatures);
    Rng truth_rng = make_stream(seed, kTruth);
    Rng agent_rng = make_stream(seed, kAgent);
    Rng env_rng = make_stream(seed, kEnvironment);

    auto map = std::make_shared<const FeatureMap>(
        FeatureMap::sample(config.kernel, config.num_features, feature_rng));
    const MdpInstance truth = sample_ground_truth(mdp_cfg, map, truth_rng);

    const Grid grid = config.make_grid();
    const GridFeatureCache cache(map, grid.cell_points(), grid.actions());
    const Eigen::MatrixXd reward =
        tabulate_reward(grid, [&](const Eigen::VectorXd& s, const Eigen::VectorXd& a) { return truth.reward(s, a); });
    const Eigen::VectorXd init_w = initial_cell_weights(grid, mdp_cfg);

    const TransitionTable true_table = tabulate(grid, grid_next_means(cache, grid, truth.dynamics.weights(), mdp_cfg.delta),
                                                config.grid.transition, mdp_cfg.sigma);
    const GridPolicy optimal = value_iteration(true_table, reward, H);
    const Eigen::VectorXd v_star = optimal.value.row(0).transpose();
    const double optimal_value = init_w.dot(v_star);

    RffModel model(map, mdp_cfg.state_dim, noise);
    std::unique_ptr<GpPosterior> exact;
    if (config.track_exact_variance)
        exact = std::make_unique<GpPosterior>(config.kernel, mdp_cfg.state_dim, noise);

    RunResult result;
    result.seed = seed;
    result.kernel = config.kernel.name();
    double cumulative = 0.0;
    for (int n = 1; n <= mdp_cfg.episodes; ++n) {
        GridPolicy sampled;
        const GridPolicy* plan = &optimal;
        if (agent == Agent::PosteriorSampling) {
            const Eigen::MatrixXd w = model.sample_weights(agent_rng);
            const TransitionTable table =
                tabulate(grid, grid_next_means(cache, grid, w, mdp_cfg.delta), config.grid.transition, mdp_cfg.sigma);
            sampled = value_iteration(table, reward, H);
            plan = &sampled;
        }

        // Regret on the tabulated true MDP; summing the cellwise gaps keeps it
        // nonnegative exactly, since V^{pi}_1 <= V*_1 in every cell.
        const Eigen::MatrixXd v_pi = evaluate_policy(plan->action, true_table, reward);
        const Eigen::VectorXd gap = v_star - v_pi.row(0).transpose();
        EpisodeRecord rec;
        rec.episode = n;
        rec.optimal_value = optimal_value;
        rec.achieved_value = init_w.dot(v_pi.row(0).transpose());
        rec.inst_regret = init_w.dot(gap);
        cumulative += rec.inst_regret;
        rec.cum_regret = cumulative;
        result.episodes.push_back(rec);

        const Policy policy = [&](const Eigen::VectorXd& s, int h) {
            return grid.action(plan->act(h, grid.nearest_cell(s)));
        };
        Trajectory traj = rollout(truth, policy, env_rng);
        traj.episode = n;

        Eigen::MatrixXd inputs, targets;
        traj.training_rows(mdp_cfg.delta, inputs, targets);
        if (exact) {
            Eigen::MatrixXd all(H, mdp_cfg.state_dim + mdp_cfg.action_dim);
            for (int h = 0; h < H; ++h)
                all.row(h) << traj.steps[static_cast<std::size_t>(h)].state.transpose(),
                    traj.steps[static_cast<std::size_t>(h)].action.transpose();
            const Eigen::VectorXd var = exact->variances(all);
            for (int h = 0; h < H; ++h) traj.steps[static_cast<std::size_t>(h)].post_var = var[h];
            exact->append(inputs, targets);
        } else {
            for (auto& t : traj.steps) t.post_var = std::numeric_limits<double>::quiet_NaN();
        }
        model.append(inputs, targets);
        for (const auto& t : traj.steps)
            result.max_state_norm = std::max({result.max_state_norm, t.state.norm(), t.next_state.norm()});
        result.trajectories.push_back(std::move(traj));
    }
    result.dataset_rows = model.size();
    log::debug("seed ", seed, " kernel ", result.kernel, " cumulative regret ", cumulative);
    return result;
}

std::vector<RunResult> run_seeds(const RunConfig& config, unsigned threads, Agent agent) {
    std::vector<RunResult> results(config.seeds.size());
    parallel_for(config.seeds.size(), threads,
                 [&](std::size_t i) { results[i] = run_psrl(config, config.seeds[i], agent); });
    return results;
}

RegretCurve bayesian_regret(const std::vector<RunResult>& runs) {
    RegretCurve curve;
    if (runs.empty()) return curve;
    const std::size_t n = runs[0].episodes.size();
    for (const auto& r : runs)
        if (r.episodes.size() != n) throw std::invalid_argument("bayesian_regret: runs differ in length");
    curve.mean.assign(n, 0.0);
    curve.std_error.assign(n, 0.0);
    const double k = static_cast<double>(runs.size());
    for (std::size_t e = 0; e < n; ++e) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.episodes[e].cum_regret;
        const double mean = sum / k;
        double ss = 0.0;
        for (const auto& r : runs) ss += (r.episodes[e].cum_regret - mean) * (r.episodes[e].cum_regret - mean);
        curve.mean[e] = mean;
        curve.std_error[e] = runs.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    }
    return curve;
}

}  // namespace gppsrl
