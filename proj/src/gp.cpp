#include "gppsrl/gp.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gppsrl/errors.hpp"
#include "gppsrl/log.hpp"

namespace gppsrl {

Dataset::Dataset(int input_dim, int output_dim, double noise_variance)
    : inputs(0, input_dim), targets(0, output_dim), noise_variance(noise_variance) {
    if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
}

void Dataset::append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("dataset append: row count mismatch");
    if (x.rows() == 0) return;
    if (x.cols() != inputs.cols() || y.cols() != targets.cols())
        throw std::invalid_argument("dataset append: dimension mismatch");
    const Eigen::Index n = inputs.rows();
    inputs.conservativeResize(n + x.rows(), Eigen::NoChange);
    targets.conservativeResize(n + y.rows(), Eigen::NoChange);
    inputs.bottomRows(x.rows()) = x;
    targets.bottomRows(y.rows()) = y;
}

void Dataset::write_csv(std::ostream& out) const {
    out.precision(17);
    out << "# noise_variance=" << noise_variance << '\n';
    for (int j = 0; j < input_dim(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
    for (int j = 0; j < output_dim(); ++j) out << ",y" << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < size(); ++i) {
        for (int j = 0; j < input_dim(); ++j) out << (j ? "," : "") << inputs(i, j);
        for (int j = 0; j < output_dim(); ++j) out << ',' << targets(i, j);
        out << '\n';
    }
}

Dataset Dataset::read_csv(std::istream& in) {
    std::string line;
    double noise = 1e-6;
    int dx = 0, dy = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("noise_variance=");
            if (pos != std::string::npos) noise = std::stod(line.substr(pos + 15));
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (dx == 0 && dy == 0) {
            while (std::getline(ss, cell, ',')) (cell[0] == 'x' ? dx : dy)++;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != dx + dy) throw std::runtime_error("dataset csv: ragged row");
        rows.push_back(std::move(row));
    }
    Dataset data(dx, dy, noise);
    data.inputs.resize(static_cast<Eigen::Index>(rows.size()), dx);
    data.targets.resize(static_cast<Eigen::Index>(rows.size()), dy);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < dx; ++j) data.inputs(i, j) = rows[i][j];
        for (int j = 0; j < dy; ++j) data.targets(i, j) = rows[i][dx + j];
    }
    return data;
}

double clamp_variance(double v) {
    if (v > 0.0) return v;
    if (v >= -1e-10) {
        log::debug("clamping posterior variance ", v, " to 1e-12");
        return 1e-12;
    }
    throw NumericalError("posterior variance is negative: " + std::to_string(v));
}

GpPosterior::GpPosterior(Kernel kernel, int output_dim, double noise_variance)
    : kernel_(std::move(kernel)),
      data_(kernel_.input_dim(), output_dim, noise_variance),
      chol_(0, 0),
      weights_(0, output_dim) {}

GpPosterior::GpPosterior(Kernel kernel, Dataset data)
    : GpPosterior(std::move(kernel), data.output_dim(), data.noise_variance) {
    append(data.inputs, data.targets);
}

Eigen::MatrixXd GpPosterior::solve_lower(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const {
    return chol_.triangularView<Eigen::Lower>().solve(rhs);
}

void GpPosterior::append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("gp append: row count mismatch");
    if (x.rows() == 0) return;
    if (x.cols() != kernel_.input_dim() || y.cols() != data_.output_dim())
        throw std::invalid_argument("gp append: dimension mismatch");

    const Eigen::Index n = data_.size();
    const Eigen::Index k = x.rows();
    Eigen::MatrixXd k22 = kernel_.gram(x);
    k22.diagonal().array() += data_.noise_variance;

    Eigen::MatrixXd l21t(n, k);  // L11^{-1} K12
    if (n > 0) {
        l21t = solve_lower(kernel_.cross(data_.inputs, x));
        k22.noalias() -= l21t.transpose() * l21t;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(k22);
    if (llt.info() != Eigen::Success) throw NumericalError("gp append: Schur complement not positive definite");

    chol_.conservativeResize(n + k, n + k);
    chol_.topRightCorner(n, k).setZero();
    chol_.bottomLeftCorner(k, n) = l21t.transpose();
    chol_.bottomRightCorner(k, k) = llt.matrixL();

    data_.append(x, y);
    refresh_weights();
}

GpPosterior GpPosterior::appended(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const Eigen::Ref<const Eigen::MatrixXd>& y) const {
    GpPosterior next = *this;
    next.append(x, y);
    return next;
}

void GpPosterior::refresh_weights() {
    weights_ = chol_.triangularView<Eigen::Lower>().transpose().solve(solve_lower(data_.targets));
}

Eigen::VectorXd GpPosterior::mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return means(x.transpose()).transpose();
}

double GpPosterior::variance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return variances(x.transpose())[0];
}

Eigen::MatrixXd GpPosterior::means(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    if (points.cols() != kernel_.input_dim()) throw std::invalid_argument("gp query: dimension mismatch");
    if (size() == 0) return Eigen::MatrixXd::Zero(points.rows(), data_.output_dim());
    return kernel_.cross(points, data_.inputs) * weights_;
}

Eigen::VectorXd GpPosterior::variances(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    if (points.cols() != kernel_.input_dim()) throw std::invalid_argument("gp query: dimension mismatch");
    Eigen::VectorXd var = Eigen::VectorXd::Constant(points.rows(), kernel_.variance());
    if (size() == 0) return var;
    const Eigen::MatrixXd v = solve_lower(kernel_.cross(data_.inputs, points));
    var -= v.colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < var.size(); ++i) var[i] = clamp_variance(var[i]);
    return var;
}

Eigen::MatrixXd GpPosterior::covariance(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    Eigen::MatrixXd cov = kernel_.gram(points);
    if (size() == 0) return cov;
    const Eigen::MatrixXd v = solve_lower(kernel_.cross(data_.inputs, points));
    cov.noalias() -= v.transpose() * v;
    return cov;
}

FiniteGaussian::FiniteGaussian(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance)
    : mean_(std::move(mean)) {
    if (covariance.rows() != mean_.size() || covariance.cols() != mean_.size())
        throw std::invalid_argument("finite gaussian: covariance shape mismatch");
    // Grid Gram matrices are often numerically singular, so factor through the
    // eigendecomposition and drop the (rounding-level) negative spectrum.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
    if (eig.info() != Eigen::Success) throw NumericalError("finite gaussian: eigendecomposition failed");
    const double floor = -1e-8 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < floor) throw NumericalError("finite gaussian: covariance not PSD");
    factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::MatrixXd FiniteGaussian::sample(Eigen::Index count, Rng& rng) const {
    Eigen::MatrixXd draws = factor_ * standard_normal(factor_.cols(), count, rng);
    draws.colwise() += mean_;
    return draws;
}

}  // namespace gppsrl
