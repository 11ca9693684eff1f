#pragma once

#include <string>

#include <Eigen/Core>

#include "gppsrl/errors.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl {

enum class KernelFamily { SquaredExponential, Matern12, Matern32, Matern52 };

/// Stationary isotropic covariance c(x, y) = variance * k(|x - y| / lengthscale).
///
/// Points are passed as vectors of length input_dim; batched routines take
/// one point per matrix row.
class Kernel {
public:
    Kernel(KernelFamily family, double variance, double lengthscale, int input_dim);

    static Kernel squared_exponential(double variance, double lengthscale, int input_dim);
    /// nu must be one of 0.5, 1.5, 2.5.
    static Kernel matern(double nu, double variance, double lengthscale, int input_dim);

    KernelFamily family() const { return family_; }
    double variance() const { return variance_; }
    double lengthscale() const { return lengthscale_; }
    int input_dim() const { return input_dim_; }
    /// Smoothness parameter; +infinity for the squared exponential.
    double nu() const;
    /// Short identifier used in output files: se, matern12, matern32, matern52.
    std::string name() const;

    /// Covariance as a function of the Euclidean lag r >= 0.
    double profile(double r) const;

    double eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// Gram matrix of the rows of `points`.
    Eigen::MatrixXd gram(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

    /// Cross-covariance K(a_i, b_j) between the rows of a and b.
    Eigen::MatrixXd cross(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::MatrixXd>& b) const;

    /// d_c(x, y) = sqrt(c(x,x) - 2 c(x,y) + c(y,y)).
    double natural_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// Draws num_features frequencies (one per row) from the normalized
    /// spectral density: N(0, I / l^2) for SE, multivariate Student-t with
    /// 2 nu degrees of freedom and scale 1 / l for Matern nu.
    Eigen::MatrixXd spectral_sample(int num_features, Rng& rng) const;

    /// Constants (L, alpha) with |c(x,y) - c(x,z)| <= L |y - z|^alpha.
    /// SE, Matern 3/2 and 5/2 use alpha = 1 with L = max |k'|. Matern 1/2
    /// uses the conservative alpha = 1/2, L = variance / sqrt(lengthscale).
    double holder_constant() const;
    double holder_exponent() const;

private:
    void check_dim(Eigen::Index n) const;

    KernelFamily family_;
    double variance_;
    double lengthscale_;
    int input_dim_;
};

KernelFamily parse_kernel_family(const std::string& family, double nu);

}  // namespace gppsrl
