#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "gppsrl/kernels.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl {

/// Observed state-action inputs (one per row) and their targets, one column
/// per output dimension.
struct Dataset {
    Eigen::MatrixXd inputs;   // n x input_dim
    Eigen::MatrixXd targets;  // n x output_dim
    double noise_variance = 1e-6;

    Dataset() = default;
    Dataset(int input_dim, int output_dim, double noise_variance);

    Eigen::Index size() const { return inputs.rows(); }
    int input_dim() const { return static_cast<int>(inputs.cols()); }
    int output_dim() const { return static_cast<int>(targets.cols()); }

    void append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y);

    /// CSV with header x1..xd,y1..yk; the noise variance goes in a leading comment.
    void write_csv(std::ostream& out) const;
    static Dataset read_csv(std::istream& in);
};

/// Exact GP posterior, independently per output dimension, under a shared
/// kernel and noise variance:
///   mu_i(x)   = c_n(x)^T (C_n + s^2 I)^{-1} y_i
///   var(x)    = c(x,x) - c_n(x)^T (C_n + s^2 I)^{-1} c_n(x)
/// The Cholesky factor of C_n + s^2 I is extended blockwise on append.
class GpPosterior {
public:
    GpPosterior(Kernel kernel, int output_dim, double noise_variance);
    GpPosterior(Kernel kernel, Dataset data);

    const Kernel& kernel() const { return kernel_; }
    const Dataset& dataset() const { return data_; }
    Eigen::Index size() const { return data_.size(); }

    Eigen::VectorXd mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double variance(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Batched versions over the rows of `points`.
    Eigen::MatrixXd means(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
    Eigen::VectorXd variances(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
    /// Posterior covariance c_n over a finite point set.
    Eigen::MatrixXd covariance(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

    void append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y);
    GpPosterior appended(const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::MatrixXd>& y) const;

private:
    void refresh_weights();
    Eigen::MatrixXd solve_lower(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const;

    Kernel kernel_;
    Dataset data_;
    Eigen::MatrixXd chol_;     // lower factor of C_n + s^2 I
    Eigen::MatrixXd weights_;  // (C_n + s^2 I)^{-1} Y
};

/// Clamp for tiny negative variances produced by cancellation; throws
/// NumericalError below -1e-10.
double clamp_variance(double v);

/// Exact joint Gaussian sampler on a finite point set (mean and covariance
/// fixed at construction). Used wherever the concentration checks need
/// exact GP draws rather than feature approximations.
class FiniteGaussian {
public:
    FiniteGaussian(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    /// One draw per column.
    Eigen::MatrixXd sample(Eigen::Index count, Rng& rng) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
};

}  // namespace gppsrl
