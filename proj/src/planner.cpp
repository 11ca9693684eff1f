#include "gppsrl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gppsrl/parallel.hpp"

namespace gppsrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Per-dimension (index, weight) lists for N(mean, sigma^2) over the Voronoi
// cells of the knots, truncated at 3 sigma and renormalized.
void smoothed_weights(const Grid& grid, int dim, double mean, double sigma, std::vector<int>& idx,
                      std::vector<double>& w) {
    idx.clear();
    w.clear();
    const int lo = grid.nearest_index(dim, mean - 3.0 * sigma);
    const int hi = grid.nearest_index(dim, mean + 3.0 * sigma);
    double total = 0.0;
    for (int k = lo; k <= hi; ++k) {
        auto [a, b] = grid.cell_interval(dim, k);
        a = std::max(a, mean - 3.0 * sigma);
        b = std::min(b, mean + 3.0 * sigma);
        const double p = normal_cdf((b - mean) / sigma) - normal_cdf((a - mean) / sigma);
        if (p > 0.0) {
            idx.push_back(k);
            w.push_back(p);
            total += p;
        }
    }
    if (total <= 0.0) {
        idx.assign(1, grid.nearest_index(dim, mean));
        w.assign(1, 1.0);
        return;
    }
    for (double& p : w) p /= total;
}

void check_reward(const TransitionTable& table, const Eigen::MatrixXd& reward) {
    if (reward.rows() != table.num_states || reward.cols() != table.num_actions)
        throw std::invalid_argument("reward table shape does not match the transition table");
}

}  // namespace

Grid::Grid(std::vector<Eigen::VectorXd> knots, Eigen::MatrixXd actions)
    : knots_(std::move(knots)), actions_(std::move(actions)) {
    if (knots_.empty()) throw std::invalid_argument("grid: no state dimensions");
    if (actions_.rows() == 0 || actions_.cols() == 0) throw std::invalid_argument("grid: empty action set");
    num_cells_ = 1;
    strides_.assign(knots_.size(), 1);
    for (std::size_t d = knots_.size(); d-- > 0;) {
        const Eigen::VectorXd& k = knots_[d];
        if (k.size() == 0) throw std::invalid_argument("grid: empty knot vector");
        for (Eigen::Index i = 1; i < k.size(); ++i)
            if (!(k[i] > k[i - 1])) throw std::invalid_argument("grid: knots must be strictly increasing");
        strides_[d] = num_cells_;
        num_cells_ *= static_cast<int>(k.size());
    }
    points_.resize(num_cells_, state_dim());
    for (int c = 0; c < num_cells_; ++c)
        for (int d = 0; d < state_dim(); ++d)
            points_(c, d) = knots_[static_cast<std::size_t>(d)][(c / strides_[static_cast<std::size_t>(d)]) %
                                                                knots_[static_cast<std::size_t>(d)].size()];
}

Grid Grid::uniform(int state_dim, double state_bound, int state_knots, int action_dim, double action_bound,
                   int action_knots) {
    if (state_knots < 1 || action_knots < 1) throw std::invalid_argument("grid: resolution must be >= 1");
    auto axis = [](int n, double bound) {
        return n == 1 ? Eigen::VectorXd::Zero(1).eval() : Eigen::VectorXd::LinSpaced(n, -bound, bound).eval();
    };
    std::vector<Eigen::VectorXd> knots(static_cast<std::size_t>(state_dim), axis(state_knots, state_bound));
    const Eigen::VectorXd a_axis = axis(action_knots, action_bound);
    long count = 1;
    for (int d = 0; d < action_dim; ++d) count *= action_knots;
    Eigen::MatrixXd actions(count, action_dim);
    for (long i = 0; i < count; ++i) {
        long rem = i;
        for (int d = action_dim; d-- > 0;) {
            actions(i, d) = a_axis[rem % action_knots];
            rem /= action_knots;
        }
    }
    return Grid(std::move(knots), std::move(actions));
}

int Grid::nearest_index(int dim, double x) const {
    const Eigen::VectorXd& k = knots(dim);
    // count of midpoints strictly below x
    int lo = 0, hi = static_cast<int>(k.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (0.5 * (k[mid] + k[mid + 1]) < x)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

int Grid::cell_index(const std::vector<int>& idx) const {
    int c = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) c += idx[d] * strides_[d];
    return c;
}

int Grid::nearest_cell(const Eigen::Ref<const Eigen::VectorXd>& s) const {
    if (s.size() != state_dim()) throw std::invalid_argument("grid: state dimension mismatch");
    int c = 0;
    for (int d = 0; d < state_dim(); ++d) c += nearest_index(d, s[d]) * strides_[static_cast<std::size_t>(d)];
    return c;
}

std::pair<double, double> Grid::cell_interval(int dim, int k) const {
    const Eigen::VectorXd& kn = knots(dim);
    const double lower = k == 0 ? -kInf : 0.5 * (kn[k - 1] + kn[k]);
    const double upper = k + 1 == kn.size() ? kInf : 0.5 * (kn[k] + kn[k + 1]);
    return {lower, upper};
}

TransitionTable TransitionTable::deterministic(const Eigen::MatrixXi& next_state) {
    TransitionTable t;
    t.num_states = static_cast<int>(next_state.rows());
    t.num_actions = static_cast<int>(next_state.cols());
    t.offsets.reserve(static_cast<std::size_t>(t.num_states * t.num_actions) + 1);
    t.offsets.push_back(0);
    for (int s = 0; s < t.num_states; ++s)
        for (int a = 0; a < t.num_actions; ++a) {
            t.next.push_back(next_state(s, a));
            t.prob.push_back(1.0);
            t.offsets.push_back(static_cast<int>(t.next.size()));
        }
    t.validate();
    return t;
}

TransitionTable TransitionTable::dense(const std::vector<std::vector<Eigen::VectorXd>>& probs) {
    TransitionTable t;
    t.num_states = static_cast<int>(probs.size());
    t.num_actions = probs.empty() ? 0 : static_cast<int>(probs[0].size());
    t.offsets.push_back(0);
    for (const auto& row : probs) {
        if (static_cast<int>(row.size()) != t.num_actions) throw std::invalid_argument("dense table: ragged rows");
        for (const Eigen::VectorXd& p : row) {
            for (Eigen::Index j = 0; j < p.size(); ++j)
                if (p[j] > 0.0) {
                    t.next.push_back(static_cast<int>(j));
                    t.prob.push_back(p[j]);
                }
            t.offsets.push_back(static_cast<int>(t.next.size()));
        }
    }
    t.validate();
    return t;
}

void TransitionTable::validate() const {
    if (num_states <= 0 || num_actions <= 0) throw std::invalid_argument("transition table: empty");
    if (offsets.size() != static_cast<std::size_t>(num_states) * num_actions + 1)
        throw std::invalid_argument("transition table: bad offsets");
    for (int n : next)
        if (n < 0 || n >= num_states) throw std::invalid_argument("transition table: next state out of range");
}

TransitionTable tabulate(const Grid& grid, const std::vector<Eigen::MatrixXd>& next_mean, TransitionMode mode,
                         double sigma) {
    const int S = grid.num_cells();
    const int A = grid.num_actions();
    const int ds = grid.state_dim();
    if (static_cast<int>(next_mean.size()) != ds) throw std::invalid_argument("tabulate: one matrix per state dim");
    for (const auto& m : next_mean)
        if (m.rows() != S || m.cols() != A) throw std::invalid_argument("tabulate: next-mean shape mismatch");
    const bool smooth = mode == TransitionMode::NoiseSmoothed && sigma > 0.0;

    TransitionTable t;
    t.num_states = S;
    t.num_actions = A;
    t.offsets.reserve(static_cast<std::size_t>(S) * A + 1);
    t.offsets.push_back(0);
    t.next.reserve(static_cast<std::size_t>(S) * A);
    t.prob.reserve(static_cast<std::size_t>(S) * A);

    std::vector<std::vector<int>> idx(static_cast<std::size_t>(ds));
    std::vector<std::vector<double>> w(static_cast<std::size_t>(ds));
    std::vector<int> pos(static_cast<std::size_t>(ds));
    std::vector<int> cell(static_cast<std::size_t>(ds));
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            if (!smooth) {
                for (int d = 0; d < ds; ++d)
                    cell[static_cast<std::size_t>(d)] = grid.nearest_index(d, next_mean[static_cast<std::size_t>(d)](s, a));
                t.next.push_back(grid.cell_index(cell));
                t.prob.push_back(1.0);
            } else {
                for (int d = 0; d < ds; ++d)
                    smoothed_weights(grid, d, next_mean[static_cast<std::size_t>(d)](s, a), sigma,
                                     idx[static_cast<std::size_t>(d)], w[static_cast<std::size_t>(d)]);
                // odometer over the per-dimension supports
                std::fill(pos.begin(), pos.end(), 0);
                for (;;) {
                    double p = 1.0;
                    for (std::size_t d = 0; d < pos.size(); ++d) {
                        cell[d] = idx[d][static_cast<std::size_t>(pos[d])];
                        p *= w[d][static_cast<std::size_t>(pos[d])];
                    }
                    t.next.push_back(grid.cell_index(cell));
                    t.prob.push_back(p);
                    std::size_t d = pos.size();
                    while (d-- > 0) {
                        if (++pos[d] < static_cast<int>(idx[d].size())) break;
                        pos[d] = 0;
                    }
                    if (d == static_cast<std::size_t>(-1)) break;
                }
            }
            t.offsets.push_back(static_cast<int>(t.next.size()));
        }
    }
    return t;
}

TransitionTable tabulate(const Grid& grid, const NextStateFn& next_mean, TransitionMode mode, double sigma) {
    std::vector<Eigen::MatrixXd> mean(static_cast<std::size_t>(grid.state_dim()),
                                      Eigen::MatrixXd(grid.num_cells(), grid.num_actions()));
    for (int s = 0; s < grid.num_cells(); ++s) {
        const Eigen::VectorXd sp = grid.cell_point(s);
        for (int a = 0; a < grid.num_actions(); ++a) {
            const Eigen::VectorXd next = next_mean(sp, grid.action(a));
            if (next.size() != grid.state_dim()) throw std::invalid_argument("tabulate: dynamics output dimension");
            for (int d = 0; d < grid.state_dim(); ++d) mean[static_cast<std::size_t>(d)](s, a) = next[d];
        }
    }
    return tabulate(grid, mean, mode, sigma);
}

Eigen::MatrixXd tabulate_reward(const Grid& grid, const RewardFn& reward) {
    Eigen::MatrixXd r(grid.num_cells(), grid.num_actions());
    for (int s = 0; s < grid.num_cells(); ++s) {
        const Eigen::VectorXd sp = grid.cell_point(s);
        for (int a = 0; a < grid.num_actions(); ++a) r(s, a) = reward(sp, grid.action(a));
    }
    return r;
}

double backup(const TransitionTable& table, const Eigen::MatrixXd& reward,
              const Eigen::Ref<const Eigen::VectorXd>& next_value, int state, int action) {
    const std::size_t row = static_cast<std::size_t>(state) * table.num_actions + action;
    double ev = 0.0;
    for (int k = table.offsets[row]; k < table.offsets[row + 1]; ++k)
        ev += table.prob[static_cast<std::size_t>(k)] * next_value[table.next[static_cast<std::size_t>(k)]];
    return reward(state, action) + ev;
}

GridPolicy value_iteration(const TransitionTable& table, const Eigen::MatrixXd& reward, int horizon,
                           unsigned threads) {
    table.validate();
    check_reward(table, reward);
    if (horizon < 1) throw std::invalid_argument("value_iteration: horizon must be >= 1");
    const int S = table.num_states;
    GridPolicy policy;
    policy.action.resize(horizon, S);
    policy.value = Eigen::MatrixXd::Zero(horizon + 1, S);
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (static_cast<std::size_t>(S) + kChunk - 1) / kChunk;
    for (int h = horizon; h >= 1; --h) {
        const Eigen::VectorXd next = policy.value.row(h).transpose();
        parallel_for(chunks, threads, [&](std::size_t chunk) {
            const int end = static_cast<int>(std::min<std::size_t>(S, (chunk + 1) * kChunk));
            for (int s = static_cast<int>(chunk * kChunk); s < end; ++s) {
                int best_a = 0;
                double best = backup(table, reward, next, s, 0);
                for (int a = 1; a < table.num_actions; ++a) {
                    const double q = backup(table, reward, next, s, a);
                    if (q > best) {
                        best = q;
                        best_a = a;
                    }
                }
                policy.action(h - 1, s) = best_a;
                policy.value(h - 1, s) = best;
            }
        });
    }
    return policy;
}

Eigen::MatrixXd evaluate_policy(const Eigen::MatrixXi& policy, const TransitionTable& table,
                                const Eigen::MatrixXd& reward, unsigned threads) {
    table.validate();
    check_reward(table, reward);
    const int S = table.num_states;
    const int horizon = static_cast<int>(policy.rows());
    if (policy.cols() != S) throw std::invalid_argument("evaluate_policy: policy does not cover all states");
    if ((policy.array() < 0).any() || (policy.array() >= table.num_actions).any())
        throw std::invalid_argument("evaluate_policy: action index out of range");
    Eigen::MatrixXd value = Eigen::MatrixXd::Zero(horizon + 1, S);
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (static_cast<std::size_t>(S) + kChunk - 1) / kChunk;
    for (int h = horizon; h >= 1; --h) {
        const Eigen::VectorXd next = value.row(h).transpose();
        parallel_for(chunks, threads, [&](std::size_t chunk) {
            const int end = static_cast<int>(std::min<std::size_t>(S, (chunk + 1) * kChunk));
            for (int s = static_cast<int>(chunk * kChunk); s < end; ++s)
                value(h - 1, s) = backup(table, reward, next, s, policy(h - 1, s));
        });
    }
    return value;
}

void GridPolicy::write_csv(std::ostream& out) const {
    out << "h,cell,action,value\n";
    out.precision(12);
    for (int h = 1; h <= horizon(); ++h)
        for (Eigen::Index s = 0; s < action.cols(); ++s)
            out << h << ',' << s << ',' << action(h - 1, s) << ',' << value(h - 1, s) << '\n';
}

Eigen::VectorXd uniform_cell_weights(const Grid& grid, double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("uniform_cell_weights: empty interval");
    Eigen::VectorXd w = Eigen::VectorXd::Ones(grid.num_cells());
    const Eigen::MatrixXd& pts = grid.cell_points();
    for (int d = 0; d < grid.state_dim(); ++d) {
        const Eigen::VectorXd& kn = grid.knots(d);
        Eigen::VectorXd mass(kn.size());
        for (Eigen::Index k = 0; k < kn.size(); ++k) {
            auto [a, b] = grid.cell_interval(d, static_cast<int>(k));
            mass[k] = std::max(0.0, std::min(b, hi) - std::max(a, lo)) / (hi - lo);
        }
        for (int c = 0; c < grid.num_cells(); ++c) w[c] *= mass[grid.nearest_index(d, pts(c, d))];
    }
    return w;
}

Eigen::VectorXd gaussian_cell_weights(const Grid& grid, double std) {
    if (!(std > 0.0)) throw std::invalid_argument("gaussian_cell_weights: std must be positive");
    Eigen::VectorXd w = Eigen::VectorXd::Ones(grid.num_cells());
    const Eigen::MatrixXd& pts = grid.cell_points();
    for (int d = 0; d < grid.state_dim(); ++d) {
        const Eigen::VectorXd& kn = grid.knots(d);
        Eigen::VectorXd mass(kn.size());
        for (Eigen::Index k = 0; k < kn.size(); ++k) {
            auto [a, b] = grid.cell_interval(d, static_cast<int>(k));
            mass[k] = normal_cdf(b / std) - normal_cdf(a / std);
        }
        for (int c = 0; c < grid.num_cells(); ++c) w[c] *= mass[grid.nearest_index(d, pts(c, d))];
    }
    return w;
}

}  // namespace gppsrl
