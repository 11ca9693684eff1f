#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace gppsrl {

/// Product grid of state knots (one strictly increasing vector per state
/// dimension) plus a finite action set. Cells are enumerated with the first
/// state dimension varying slowest.
class Grid {
public:
    Grid(std::vector<Eigen::VectorXd> knots, Eigen::MatrixXd actions);

    /// n knots per dimension uniformly over [-state_bound, state_bound], and
    /// action_knots per action dimension uniformly over [-action_bound, action_bound].
    static Grid uniform(int state_dim, double state_bound, int state_knots, int action_dim, double action_bound,
                        int action_knots);

    int state_dim() const { return static_cast<int>(knots_.size()); }
    int action_dim() const { return static_cast<int>(actions_.cols()); }
    int num_cells() const { return num_cells_; }
    int num_actions() const { return static_cast<int>(actions_.rows()); }
    const Eigen::VectorXd& knots(int dim) const { return knots_[static_cast<std::size_t>(dim)]; }
    const Eigen::MatrixXd& actions() const { return actions_; }
    Eigen::VectorXd action(int index) const { return actions_.row(index).transpose(); }

    /// Knot coordinates of every cell, one row per cell.
    const Eigen::MatrixXd& cell_points() const { return points_; }
    Eigen::VectorXd cell_point(int cell) const { return points_.row(cell).transpose(); }

    /// Nearest knot along one dimension; values outside the knot range clamp
    /// to the boundary knot, exact midpoints go to the lower knot.
    int nearest_index(int dim, double x) const;
    int nearest_cell(const Eigen::Ref<const Eigen::VectorXd>& s) const;
    int cell_index(const std::vector<int>& idx) const;

    /// Voronoi interval of knot k along dim: [lower, upper], with the
    /// boundary knots extending to -inf / +inf.
    std::pair<double, double> cell_interval(int dim, int k) const;

private:
    std::vector<Eigen::VectorXd> knots_;
    Eigen::MatrixXd actions_;
    Eigen::MatrixXd points_;
    std::vector<int> strides_;
    int num_cells_ = 0;
};

enum class TransitionMode { NearestCell, NoiseSmoothed };

/// Sparse transition kernel P(s' | s, a) over grid cells, stored row-wise per
/// (state, action) pair with index state * num_actions + action.
struct TransitionTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<int> offsets;  // size num_states * num_actions + 1
    std::vector<int> next;
    std::vector<double> prob;

    /// Deterministic table from next-state indices (num_states x num_actions).
    static TransitionTable deterministic(const Eigen::MatrixXi& next_state);
    /// Dense table from probs[s][a] = distribution over next states.
    static TransitionTable dense(const std::vector<std::vector<Eigen::VectorXd>>& probs);

    void validate() const;
};

/// Builds the transition table from next-state means (one matrix per state
/// dimension, cells x actions). NearestCell moves to the nearest cell of the
/// mean; NoiseSmoothed integrates N(mean, sigma^2 I) over the cells, per
/// dimension, truncated at 3 sigma and renormalized.
TransitionTable tabulate(const Grid& grid, const std::vector<Eigen::MatrixXd>& next_mean, TransitionMode mode,
                         double sigma);

/// Same, calling next_mean(s, a) at every cell and action.
using NextStateFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& s, const Eigen::VectorXd& a)>;
TransitionTable tabulate(const Grid& grid, const NextStateFn& next_mean, TransitionMode mode, double sigma);

/// Reward table r(cell, action).
using RewardFn = std::function<double(const Eigen::VectorXd& s, const Eigen::VectorXd& a)>;
Eigen::MatrixXd tabulate_reward(const Grid& grid, const RewardFn& reward);

/// Time-indexed greedy policy with its value table. Row h - 1 holds step h
/// (h = 1..H); value has H + 1 rows with the last row identically zero.
struct GridPolicy {
    Eigen::MatrixXi action;  // H x states
    Eigen::MatrixXd value;   // (H + 1) x states

    int horizon() const { return static_cast<int>(action.rows()); }
    int act(int h, int state) const { return action(h - 1, state); }

    void write_csv(std::ostream& out) const;
};

/// Finite-horizon backward induction with argmax ties broken toward the
/// lowest action index. Cells within one step are processed in parallel.
GridPolicy value_iteration(const TransitionTable& table, const Eigen::MatrixXd& reward, int horizon,
                           unsigned threads = 1);

/// Value of a fixed policy (H x states action table), (H + 1) x states.
Eigen::MatrixXd evaluate_policy(const Eigen::MatrixXi& policy, const TransitionTable& table,
                                const Eigen::MatrixXd& reward, unsigned threads = 1);

/// Q_h(s, a) = r(s, a) + sum_s' P(s' | s, a) V_{h+1}(s'). Shared by value
/// iteration and policy evaluation so both sum in the same order.
double backup(const TransitionTable& table, const Eigen::MatrixXd& reward, const Eigen::Ref<const Eigen::VectorXd>& next_value,
              int state, int action);

/// Probability mass of each grid cell under the uniform law on
/// [lo, hi]^{d_s} and under N(0, std^2 I).
Eigen::VectorXd uniform_cell_weights(const Grid& grid, double lo, double hi);
Eigen::VectorXd gaussian_cell_weights(const Grid& grid, double std);

}  // namespace gppsrl
