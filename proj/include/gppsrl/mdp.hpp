#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "gppsrl/kernels.hpp"
#include "gppsrl/random.hpp"
#include "gppsrl/rff.hpp"

namespace gppsrl {

enum class InitialStateLaw { Uniform, GaussianIso };

/// Navigation reward
///   r(s) = -w_g |s - goal|^2 - w_o exp(-|s - obs|^2 / (2 rho^2))
///          - w_b sum_d softplus(k (|s_d| - B)),
/// clamped to [-r_max, 0]. Empty goal/obstacle vectors mean the defaults
/// (1.5, ..., 1.5) and the origin.
struct RewardConfig {
    Eigen::VectorXd goal;
    double goal_weight = 0.25;
    Eigen::VectorXd obstacle;
    double obstacle_radius = 0.5;
    double obstacle_weight = 2.0;
    double barrier_weight = 1.0;
    double barrier_stiffness = 10.0;
    double r_max = 10.0;
};

struct MdpConfig {
    int state_dim = 2;
    int action_dim = 2;
    double sigma = 0.01;        // transition noise std
    int horizon = 20;           // H
    int episodes = 100;         // N
    double action_bound = 1.0;  // actions lie in the box [-b, b]^{d_a}
    double state_bound = 2.0;   // arena [-B, B]^{d_s}
    double delta = 0.1;         // Euler step
    RewardConfig reward;
    InitialStateLaw initial_state = InitialStateLaw::Uniform;
    double initial_std = 0.0;  // GaussianIso std; 0 means sigma

    /// Throws ConfigError on invalid values; fills reward defaults.
    void validate();
    long total_steps() const { return static_cast<long>(episodes) * horizon; }
    /// Radius of the smallest ball containing the action box.
    double action_radius() const;
    double effective_initial_std() const { return initial_std > 0.0 ? initial_std : sigma; }
};

double reward(const MdpConfig& config, const Eigen::Ref<const Eigen::VectorXd>& s,
              const Eigen::Ref<const Eigen::VectorXd>& a);

/// Ground-truth MDP: s' = s + delta * f(s, a) + eps, eps ~ N(0, sigma^2 I),
/// where f is one explicit draw of the velocity field.
struct MdpInstance {
    MdpConfig config;
    RffSample dynamics;

    Eigen::VectorXd drift(const Eigen::Ref<const Eigen::VectorXd>& s, const Eigen::Ref<const Eigen::VectorXd>& a) const;
    double reward(const Eigen::Ref<const Eigen::VectorXd>& s, const Eigen::Ref<const Eigen::VectorXd>& a) const {
        return gppsrl::reward(config, s, a);
    }
};

/// Draws f* from the prior over the given feature map.
MdpInstance sample_ground_truth(const MdpConfig& config, std::shared_ptr<const FeatureMap> map, Rng& rng);
/// Draws a fresh feature map for the kernel, then f*.
MdpInstance sample_ground_truth(const MdpConfig& config, const Kernel& kernel, int num_features, Rng& rng);

/// Throws std::invalid_argument when the action leaves the action box.
Eigen::VectorXd step(const MdpInstance& mdp, const Eigen::Ref<const Eigen::VectorXd>& s,
                     const Eigen::Ref<const Eigen::VectorXd>& a, Rng& rng);

Eigen::VectorXd sample_initial_state(const MdpConfig& config, Rng& rng);

struct Transition {
    int h = 0;  // 1-based step index
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    double post_var = 0.0;  // posterior variance at (state, action) before this episode
};

struct Trajectory {
    int episode = 0;  // 1-based
    std::vector<Transition> steps;

    /// Inputs (s, a) and velocity targets (s' - s) / delta of the first H-1 steps.
    void training_rows(double delta, Eigen::MatrixXd& inputs, Eigen::MatrixXd& targets) const;
};

using Policy = std::function<Eigen::VectorXd(const Eigen::VectorXd& state, int h)>;

/// H steps from s_1 drawn from the initial-state law.
Trajectory rollout(const MdpInstance& mdp, const Policy& policy, Rng& rng);
Trajectory rollout_from(const MdpInstance& mdp, const Policy& policy, Eigen::VectorXd initial, Rng& rng);

}  // namespace gppsrl
