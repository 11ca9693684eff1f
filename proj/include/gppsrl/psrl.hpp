#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gppsrl/kernels.hpp"
#include "gppsrl/mdp.hpp"
#include "gppsrl/planner.hpp"

namespace gppsrl {

struct GridConfig {
    int state_knots = 41;
    int action_knots = 9;
    TransitionMode transition = TransitionMode::NearestCell;
};

struct RunConfig {
    MdpConfig mdp;
    Kernel kernel = Kernel::squared_exponential(1.0, 0.5, 4);
    int num_features = 1000;
    GridConfig grid;
    /// Noise variance of the agent's model of the velocity targets
    /// (s' - s) / delta. Nonpositive means (sigma / delta)^2, the exact
    /// variance of those targets.
    double gp_noise_variance = 0.0;
    /// Replay the exact GP alongside the feature model and log sigma_{n-1}^2
    /// at every visited input (traj.csv post_var); NaN when disabled.
    bool track_exact_variance = true;
    std::vector<std::uint64_t> seeds;

    void validate();
    double effective_gp_noise() const;
    Grid make_grid() const;
};

enum class Agent { PosteriorSampling, Oracle };

struct EpisodeRecord {
    int episode = 0;  // 1-based
    double optimal_value = 0.0;   // V*_1 averaged over the initial-state cell law
    double achieved_value = 0.0;  // V^{pi_n}_1 under the true tabulated dynamics
    double inst_regret = 0.0;
    double cum_regret = 0.0;
};

struct RunResult {
    std::uint64_t seed = 0;
    std::string kernel;
    std::vector<EpisodeRecord> episodes;
    std::vector<Trajectory> trajectories;
    Eigen::Index dataset_rows = 0;
    double max_state_norm = 0.0;
};

/// Initial-state law of the config projected onto the grid cells.
Eigen::VectorXd initial_cell_weights(const Grid& grid, const MdpConfig& mdp);

/// One seed of GP-PSRL. The seed's random streams are: 1 feature map, 2 the
/// true dynamics f*, 3 the agent's posterior draws, 4 the environment
/// (initial states and transition noise). f* and the agent share the feature
/// map, so the agent's feature-space prior is exactly the law of f*.
RunResult run_psrl(const RunConfig& config, std::uint64_t seed, Agent agent = Agent::PosteriorSampling);

/// Runs every configured seed, in parallel across seeds; results are in
/// seed order regardless of scheduling.
std::vector<RunResult> run_seeds(const RunConfig& config, unsigned threads,
                                 Agent agent = Agent::PosteriorSampling);

struct RegretCurve {
    std::vector<double> mean;       // mean cumulative regret per episode
    std::vector<double> std_error;  // standard error over seeds
};

/// Pointwise mean and standard error of cumulative regret over runs.
RegretCurve bayesian_regret(const std::vector<RunResult>& runs);

}  // namespace gppsrl
