#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace gppsrl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the i-th worker under master seed `master` (seed_i = master xor i).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t i) { return master ^ i; }

/// Named sub-stream of one run seed (features, truth, agent, environment, ...).
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix_seed(mix_seed(seed) + stream));
}

inline Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    return z;
}

inline Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(rows, cols);
    // column-major fill order is part of the reproducibility contract
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal(rng);
    return z;
}

}  // namespace gppsrl
