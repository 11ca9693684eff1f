#include "gppsrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gppsrl/errors.hpp"

namespace gppsrl {

namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

void MdpConfig::validate() {
    if (state_dim < 1 || action_dim < 1) throw ConfigError("mdp: state_dim and action_dim must be >= 1");
    if (horizon < 1) throw ConfigError("mdp: horizon must be >= 1");
    if (episodes < 1) throw ConfigError("mdp: episodes must be >= 1");
    if (!(sigma > 0.0)) throw ConfigError("mdp: sigma must be positive");
    if (!(action_bound > 0.0)) throw ConfigError("mdp: action_bound must be positive");
    if (!(state_bound > 0.0)) throw ConfigError("mdp: state_bound must be positive");
    if (!(delta > 0.0)) throw ConfigError("mdp: delta must be positive");
    if (initial_std < 0.0) throw ConfigError("mdp: initial_std must be nonnegative");
    if (reward.goal.size() == 0) reward.goal = Eigen::VectorXd::Constant(state_dim, 1.5);
    if (reward.obstacle.size() == 0) reward.obstacle = Eigen::VectorXd::Zero(state_dim);
    if (reward.goal.size() != state_dim || reward.obstacle.size() != state_dim)
        throw ConfigError("mdp.reward: goal and obstacle must have state_dim entries");
    if (!(reward.obstacle_radius > 0.0)) throw ConfigError("mdp.reward: obstacle_radius must be positive");
    if (!(reward.r_max > 0.0)) throw ConfigError("mdp.reward: r_max must be positive");
    if (reward.goal_weight < 0.0 || reward.obstacle_weight < 0.0 || reward.barrier_weight < 0.0 ||
        reward.barrier_stiffness <= 0.0)
        throw ConfigError("mdp.reward: weights must be nonnegative and stiffness positive");
}

double MdpConfig::action_radius() const { return action_bound * std::sqrt(static_cast<double>(action_dim)); }

double reward(const MdpConfig& config, const Eigen::Ref<const Eigen::VectorXd>& s,
              const Eigen::Ref<const Eigen::VectorXd>& /*a*/) {
    const RewardConfig& rc = config.reward;
    const double rho2 = rc.obstacle_radius * rc.obstacle_radius;
    double r = -rc.goal_weight * (s - rc.goal).squaredNorm();
    r -= rc.obstacle_weight * std::exp(-(s - rc.obstacle).squaredNorm() / (2.0 * rho2));
    double barrier = 0.0;
    for (Eigen::Index d = 0; d < s.size(); ++d)
        barrier += softplus(rc.barrier_stiffness * (std::abs(s[d]) - config.state_bound));
    r -= rc.barrier_weight * barrier;
    return std::clamp(r, -rc.r_max, 0.0);
}

Eigen::VectorXd MdpInstance::drift(const Eigen::Ref<const Eigen::VectorXd>& s,
                                   const Eigen::Ref<const Eigen::VectorXd>& a) const {
    Eigen::VectorXd x(s.size() + a.size());
    x << s, a;
    return dynamics(x);
}

MdpInstance sample_ground_truth(const MdpConfig& config, std::shared_ptr<const FeatureMap> map, Rng& rng) {
    if (map->input_dim() != config.state_dim + config.action_dim)
        throw std::invalid_argument("sample_ground_truth: feature map dimension != d_s + d_a");
    // The prior weight law is N(0, I), so a prior draw of f* is a standard normal weight matrix.
    RffModel prior(map, config.state_dim, 1.0);
    return MdpInstance{config, prior.sample_function(rng)};
}

MdpInstance sample_ground_truth(const MdpConfig& config, const Kernel& kernel, int num_features, Rng& rng) {
    auto map = std::make_shared<const FeatureMap>(FeatureMap::sample(kernel, num_features, rng));
    return sample_ground_truth(config, std::move(map), rng);
}

Eigen::VectorXd step(const MdpInstance& mdp, const Eigen::Ref<const Eigen::VectorXd>& s,
                     const Eigen::Ref<const Eigen::VectorXd>& a, Rng& rng) {
    const MdpConfig& c = mdp.config;
    if (s.size() != c.state_dim || a.size() != c.action_dim) throw std::invalid_argument("step: dimension mismatch");
    if (a.cwiseAbs().maxCoeff() > c.action_bound * (1.0 + 1e-12))
        throw std::invalid_argument("step: action outside the action set");
    return s + c.delta * mdp.drift(s, a) + c.sigma * standard_normal(c.state_dim, rng);
}

Eigen::VectorXd sample_initial_state(const MdpConfig& config, Rng& rng) {
    if (config.initial_state == InitialStateLaw::GaussianIso)
        return config.effective_initial_std() * standard_normal(config.state_dim, rng);
    std::uniform_real_distribution<double> uniform(-config.state_bound, config.state_bound);
    Eigen::VectorXd s(config.state_dim);
    for (int d = 0; d < config.state_dim; ++d) s[d] = uniform(rng);
    return s;
}

void Trajectory::training_rows(double delta, Eigen::MatrixXd& inputs, Eigen::MatrixXd& targets) const {
    const Eigen::Index rows = steps.empty() ? 0 : static_cast<Eigen::Index>(steps.size()) - 1;
    if (rows == 0) {
        inputs.resize(0, 0);
        targets.resize(0, 0);
        return;
    }
    const Eigen::Index ds = steps[0].state.size();
    const Eigen::Index da = steps[0].action.size();
    inputs.resize(rows, ds + da);
    targets.resize(rows, ds);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Transition& t = steps[static_cast<std::size_t>(i)];
        inputs.row(i) << t.state.transpose(), t.action.transpose();
        targets.row(i) = ((t.next_state - t.state) / delta).transpose();
    }
}

Trajectory rollout_from(const MdpInstance& mdp, const Policy& policy, Eigen::VectorXd initial, Rng& rng) {
    Trajectory traj;
    Eigen::VectorXd s = std::move(initial);
    for (int h = 1; h <= mdp.config.horizon; ++h) {
        Transition t;
        t.h = h;
        t.state = s;
        t.action = policy(s, h);
        t.reward = mdp.reward(s, t.action);
        t.next_state = step(mdp, s, t.action, rng);
        s = t.next_state;
        traj.steps.push_back(std::move(t));
    }
    return traj;
}

Trajectory rollout(const MdpInstance& mdp, const Policy& policy, Rng& rng) {
    Eigen::VectorXd s1 = sample_initial_state(mdp.config, rng);
    return rollout_from(mdp, policy, std::move(s1), rng);
}

}  // namespace gppsrl
