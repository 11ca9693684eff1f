#pragma once

#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gppsrl/gp.hpp"
#include "gppsrl/kernels.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl {

/// Random Fourier feature map phi_j(x) = sqrt(2 C / m) cos(omega_j^T x + b_j)
/// with omega_j from the kernel's spectral density and b_j ~ U[0, 2 pi].
struct FeatureMap {
    Eigen::MatrixXd omega;  // m x input_dim
    Eigen::VectorXd phase;  // m
    double scale = 0.0;     // sqrt(2 C / m)

    static FeatureMap sample(const Kernel& kernel, int num_features, Rng& rng);

    int size() const { return static_cast<int>(omega.rows()); }
    int input_dim() const { return static_cast<int>(omega.cols()); }

    /// Feature matrix, one row per input row.
    Eigen::MatrixXd features(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
    /// Induced kernel phi(x)^T phi(y).
    double approx_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

/// One explicit function draw f(x) = W^T phi(x), W of size m x output_dim.
/// Deterministic once drawn.
class RffSample {
public:
    RffSample(std::shared_ptr<const FeatureMap> map, Eigen::MatrixXd weights);

    int input_dim() const { return map_->input_dim(); }
    int output_dim() const { return static_cast<int>(weights_.cols()); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    const FeatureMap& feature_map() const { return *map_; }

    Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Batched evaluation, one row per point.
    Eigen::MatrixXd evaluate(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

private:
    std::shared_ptr<const FeatureMap> map_;
    Eigen::MatrixXd weights_;
};

/// Bayesian linear regression in feature space: prior w_i ~ N(0, I) per
/// output dimension, Gaussian likelihood with the given noise variance. All
/// output dimensions share the feature map and the weight precision
///   A = I + Phi^T Phi / s^2,
/// whose Cholesky factor is rank-one updated as rows arrive.
class RffModel {
public:
    RffModel(std::shared_ptr<const FeatureMap> map, int output_dim, double noise_variance);

    const FeatureMap& feature_map() const { return *map_; }
    std::shared_ptr<const FeatureMap> shared_map() const { return map_; }
    int output_dim() const { return static_cast<int>(rhs_.cols()); }
    double noise_variance() const { return noise_variance_; }
    Eigen::Index size() const { return count_; }

    void append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y);

    /// Posterior weight mean, m x output_dim.
    const Eigen::MatrixXd& weight_mean() const { return mean_; }

    Eigen::MatrixXd predictive_mean(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
    /// Latent (noise-free) predictive variance phi^T A^{-1} phi.
    Eigen::VectorXd predictive_variance(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

    /// W = mean + L^{-T} Z with A = L L^T, one standard normal column per output.
    Eigen::MatrixXd sample_weights(Rng& rng) const;
    RffSample sample_function(Rng& rng) const;

private:
    std::shared_ptr<const FeatureMap> map_;
    double noise_variance_;
    Eigen::Index count_ = 0;
    Eigen::LLT<Eigen::MatrixXd> precision_;
    Eigen::MatrixXd rhs_;   // Phi^T Y / s^2
    Eigen::MatrixXd mean_;  // A^{-1} rhs
};

/// Draws a feature map for the kernel and conditions on the dataset.
RffModel fit_rff(const Dataset& data, const Kernel& kernel, int num_features, Rng& rng);

/// Precomputed trigonometric tables for evaluating feature-space functions on
/// a product grid of states x actions, with inputs ordered (s, a). Uses
///   cos(w_s s + w_a a + b) = cos(w_s s) cos(w_a a + b) - sin(w_s s) sin(w_a a + b)
/// so each evaluation is a single matrix product.
class GridFeatureCache {
public:
    GridFeatureCache(std::shared_ptr<const FeatureMap> map, const Eigen::Ref<const Eigen::MatrixXd>& states,
                     const Eigen::Ref<const Eigen::MatrixXd>& actions);

    Eigen::Index num_states() const { return state_trig_.rows(); }
    Eigen::Index num_actions() const { return action_cos_.rows(); }

    /// Output dimension i evaluated at every (state, action) pair:
    /// element i of the result is num_states x num_actions.
    std::vector<Eigen::MatrixXd> evaluate(const Eigen::MatrixXd& weights) const;

private:
    std::shared_ptr<const FeatureMap> map_;
    Eigen::MatrixXd state_trig_;  // [cos | sin](S Omega_s^T), states x 2m
    Eigen::MatrixXd action_cos_;  // cos(A Omega_a^T + b), actions x m
    Eigen::MatrixXd action_sin_;
};

}  // namespace gppsrl
