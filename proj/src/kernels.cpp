#include "gppsrl/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gppsrl {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

}  // namespace

Kernel::Kernel(KernelFamily family, double variance, double lengthscale, int input_dim)
    : family_(family), variance_(variance), lengthscale_(lengthscale), input_dim_(input_dim) {
    if (!(variance > 0.0)) throw std::invalid_argument("kernel variance must be positive");
    if (!(lengthscale > 0.0)) throw std::invalid_argument("kernel lengthscale must be positive");
    if (input_dim < 1) throw std::invalid_argument("kernel input_dim must be >= 1");
}

Kernel Kernel::squared_exponential(double variance, double lengthscale, int input_dim) {
    return Kernel(KernelFamily::SquaredExponential, variance, lengthscale, input_dim);
}

Kernel Kernel::matern(double nu, double variance, double lengthscale, int input_dim) {
    return Kernel(parse_kernel_family("matern", nu), variance, lengthscale, input_dim);
}

KernelFamily parse_kernel_family(const std::string& family, double nu) {
    if (family == "se" || family == "squared_exponential" || family == "rbf")
        return KernelFamily::SquaredExponential;
    if (family == "matern") {
        if (nu == 0.5) return KernelFamily::Matern12;
        if (nu == 1.5) return KernelFamily::Matern32;
        if (nu == 2.5) return KernelFamily::Matern52;
        throw std::invalid_argument("matern nu must be 0.5, 1.5 or 2.5");
    }
    if (family == "matern12") return KernelFamily::Matern12;
    if (family == "matern32") return KernelFamily::Matern32;
    if (family == "matern52") return KernelFamily::Matern52;
    throw std::invalid_argument("unknown kernel family '" + family + "'");
}

double Kernel::nu() const {
    switch (family_) {
        case KernelFamily::Matern12: return 0.5;
        case KernelFamily::Matern32: return 1.5;
        case KernelFamily::Matern52: return 2.5;
        case KernelFamily::SquaredExponential: break;
    }
    return std::numeric_limits<double>::infinity();
}

std::string Kernel::name() const {
    switch (family_) {
        case KernelFamily::Matern12: return "matern12";
        case KernelFamily::Matern32: return "matern32";
        case KernelFamily::Matern52: return "matern52";
        case KernelFamily::SquaredExponential: break;
    }
    return "se";
}

double Kernel::profile(double r) const {
    const double s = r / lengthscale_;
    switch (family_) {
        case KernelFamily::SquaredExponential: return variance_ * std::exp(-0.5 * s * s);
        case KernelFamily::Matern12: return variance_ * std::exp(-s);
        case KernelFamily::Matern32: return variance_ * (1.0 + kSqrt3 * s) * std::exp(-kSqrt3 * s);
        case KernelFamily::Matern52:
            return variance_ * (1.0 + kSqrt5 * s + 5.0 * s * s / 3.0) * std::exp(-kSqrt5 * s);
    }
    return 0.0;
}

void Kernel::check_dim(Eigen::Index n) const {
    if (n != input_dim_)
        throw std::invalid_argument("kernel input dimension mismatch: expected " +
                                    std::to_string(input_dim_) + ", got " + std::to_string(n));
}

double Kernel::eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    check_dim(x.size());
    check_dim(y.size());
    return profile((x - y).norm());
}

Eigen::MatrixXd Kernel::gram(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    check_dim(points.cols());
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = variance_;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = profile((points.row(i) - points.row(j)).norm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::MatrixXd Kernel::cross(const Eigen::Ref<const Eigen::MatrixXd>& a,
                              const Eigen::Ref<const Eigen::MatrixXd>& b) const {
    check_dim(a.cols());
    check_dim(b.cols());
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = profile((a.row(i) - b.row(j)).norm());
    return k;
}

double Kernel::natural_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& y) const {
    const double radicand = eval(x, x) - 2.0 * eval(x, y) + eval(y, y);
    if (radicand < -1e-12) throw NumericalError("natural distance: negative radicand");
    return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

Eigen::MatrixXd Kernel::spectral_sample(int num_features, Rng& rng) const {
    if (num_features < 1) throw std::invalid_argument("num_features must be >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd omega(num_features, input_dim_);
    const bool student = family_ != KernelFamily::SquaredExponential;
    // chi^2 with 2 nu degrees of freedom is Gamma(nu, 2)
    std::gamma_distribution<double> chi2(student ? nu() : 1.0, 2.0);
    for (int j = 0; j < num_features; ++j) {
        for (int d = 0; d < input_dim_; ++d) omega(j, d) = normal(rng);
        double scale = 1.0 / lengthscale_;
        if (student) scale *= std::sqrt(2.0 * nu() / chi2(rng));
        omega.row(j) *= scale;
    }
    return omega;
}

double Kernel::holder_exponent() const {
    return family_ == KernelFamily::Matern12 ? 0.5 : 1.0;
}

double Kernel::holder_constant() const {
    switch (family_) {
        case KernelFamily::SquaredExponential:
            return variance_ * std::exp(-0.5) / lengthscale_;
        case KernelFamily::Matern12:
            // |c(x,y) - c(x,z)| <= min(C t / l, C) <= C sqrt(t / l)
            return variance_ / std::sqrt(lengthscale_);
        case KernelFamily::Matern32:
            return variance_ * kSqrt3 * std::exp(-1.0) / lengthscale_;
        case KernelFamily::Matern52: {
            // max_s (5/3) s (1 + sqrt5 s) exp(-sqrt5 s), attained at s = (sqrt5 + 5) / 10
            const double s = (kSqrt5 + 5.0) / 10.0;
            return variance_ * (5.0 / 3.0) * s * (1.0 + kSqrt5 * s) * std::exp(-kSqrt5 * s) /
                   lengthscale_;
        }
    }
    return 0.0;
}

}  // namespace gppsrl
