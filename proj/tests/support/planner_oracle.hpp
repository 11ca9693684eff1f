#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "gppsrl/planner.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl::testing {

// Value of one Markov policy by forward propagation of the state
// distribution, independent of backward induction.
inline double forward_value(const TransitionTable& t, const Eigen::MatrixXd& r, const Eigen::MatrixXi& policy, int start) {
    Eigen::VectorXd dist = Eigen::VectorXd::Zero(t.num_states);
    dist[start] = 1.0;
    double total = 0.0;
    for (int h = 0; h < policy.rows(); ++h) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(t.num_states);
        for (int s = 0; s < t.num_states; ++s) {
            if (dist[s] == 0.0) continue;
            const int a = policy(h, s);
            total += dist[s] * r(s, a);
            const int row = s * t.num_actions + a;
            for (int k = t.offsets[row]; k < t.offsets[row + 1]; ++k) next[t.next[k]] += dist[s] * t.prob[k];
        }
        dist = next;
    }
    return total;
}

// Best value over every Markov policy (A^{S H} of them).
inline Eigen::VectorXd brute_force(const TransitionTable& t, const Eigen::MatrixXd& r, int H) {
    const int S = t.num_states, A = t.num_actions;
    long count = 1;
    for (int i = 0; i < S * H; ++i) count *= A;
    Eigen::VectorXd best = Eigen::VectorXd::Constant(S, -std::numeric_limits<double>::infinity());
    Eigen::MatrixXi policy(H, S);
    for (long code = 0; code < count; ++code) {
        long c = code;
        for (int h = 0; h < H; ++h)
            for (int s = 0; s < S; ++s) {
                policy(h, s) = static_cast<int>(c % A);
                c /= A;
            }
        for (int s = 0; s < S; ++s) best[s] = std::max(best[s], forward_value(t, r, policy, s));
    }
    return best;
}

// Deterministic instances: the best open-loop action sequence from each
// start state is optimal, so A^H sequences suffice.
inline Eigen::VectorXd brute_force_open_loop(const Eigen::MatrixXi& next, const Eigen::MatrixXd& r, int H) {
    const int S = static_cast<int>(next.rows()), A = static_cast<int>(next.cols());
    long count = 1;
    for (int i = 0; i < H; ++i) count *= A;
    Eigen::VectorXd best = Eigen::VectorXd::Constant(S, -std::numeric_limits<double>::infinity());
    for (int start = 0; start < S; ++start)
        for (long code = 0; code < count; ++code) {
            long c = code;
            int s = start;
            double total = 0.0;
            for (int h = 0; h < H; ++h) {
                const int a = static_cast<int>(c % A);
                c /= A;
                total += r(s, a);
                s = next(s, a);
            }
            best[start] = std::max(best[start], total);
        }
    return best;
}

// Random instance with dyadic probabilities and integer rewards, so every
// sum is exact in floating point.
inline void random_instance(Rng& rng, int S, int A, bool stochastic, TransitionTable& table, Eigen::MatrixXd& reward,
                     Eigen::MatrixXi* next_out = nullptr) {
    std::uniform_int_distribution<int> rew(-8, 8), st(0, S - 1), quarter(0, 4);
    reward.resize(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) reward(s, a) = rew(rng);
    if (!stochastic) {
        Eigen::MatrixXi next(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) next(s, a) = st(rng);
        table = TransitionTable::deterministic(next);
        if (next_out) *next_out = next;
        return;
    }
    std::vector<std::vector<Eigen::VectorXd>> probs(S, std::vector<Eigen::VectorXd>(A));
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            Eigen::VectorXd p = Eigen::VectorXd::Zero(S);
            int left = 4;
            for (int j = 0; j + 1 < S && left > 0; ++j) {
                const int q = std::min(left, quarter(rng));
                p[st(rng)] += q;
                left -= q;
            }
            p[st(rng)] += left;
            probs[s][a] = p / 4.0;
        }
    table = TransitionTable::dense(probs);
}

}  // namespace gppsrl::testing
