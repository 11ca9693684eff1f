#include "gppsrl/rff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gppsrl/errors.hpp"

namespace gppsrl {

FeatureMap FeatureMap::sample(const Kernel& kernel, int num_features, Rng& rng) {
    FeatureMap map;
    map.omega = kernel.spectral_sample(num_features, rng);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    map.phase.resize(num_features);
    for (int j = 0; j < num_features; ++j) map.phase[j] = uniform(rng);
    map.scale = std::sqrt(2.0 * kernel.variance() / num_features);
    return map;
}

Eigen::MatrixXd FeatureMap::features(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    if (points.cols() != input_dim()) throw std::invalid_argument("features: dimension mismatch");
    Eigen::MatrixXd arg = points * omega.transpose();
    arg.rowwise() += phase.transpose();
    return scale * arg.array().cos().matrix();
}

double FeatureMap::approx_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& y) const {
    return features(x.transpose()).row(0).dot(features(y.transpose()).row(0));
}

RffSample::RffSample(std::shared_ptr<const FeatureMap> map, Eigen::MatrixXd weights)
    : map_(std::move(map)), weights_(std::move(weights)) {
    if (weights_.rows() != map_->size()) throw std::invalid_argument("rff sample: weight rows != feature count");
}

Eigen::VectorXd RffSample::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return evaluate(x.transpose()).row(0).transpose();
}

Eigen::MatrixXd RffSample::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    return map_->features(points) * weights_;
}

RffModel::RffModel(std::shared_ptr<const FeatureMap> map, int output_dim, double noise_variance)
    : map_(std::move(map)), noise_variance_(noise_variance) {
    if (!(noise_variance > 0.0)) throw std::invalid_argument("rff model: noise variance must be positive");
    if (output_dim < 1) throw std::invalid_argument("rff model: output_dim must be >= 1");
    const int m = map_->size();
    precision_.compute(Eigen::MatrixXd::Identity(m, m));
    rhs_ = Eigen::MatrixXd::Zero(m, output_dim);
    mean_ = Eigen::MatrixXd::Zero(m, output_dim);
}

void RffModel::append(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("rff append: row count mismatch");
    if (x.rows() == 0) return;
    if (y.cols() != output_dim()) throw std::invalid_argument("rff append: output dimension mismatch");
    const Eigen::MatrixXd phi = map_->features(x);
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        precision_.rankUpdate(phi.row(i).transpose(), 1.0 / noise_variance_);
        if (precision_.info() != Eigen::Success) throw NumericalError("rff append: precision update failed");
    }
    rhs_.noalias() += phi.transpose() * y / noise_variance_;
    mean_ = precision_.solve(rhs_);
    count_ += x.rows();
}

Eigen::MatrixXd RffModel::predictive_mean(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    return map_->features(points) * mean_;
}

Eigen::VectorXd RffModel::predictive_variance(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    const Eigen::MatrixXd phi_t = map_->features(points).transpose();
    const Eigen::MatrixXd v = precision_.matrixL().solve(phi_t);
    return v.colwise().squaredNorm().transpose();
}

Eigen::MatrixXd RffModel::sample_weights(Rng& rng) const {
    const Eigen::MatrixXd z = standard_normal(map_->size(), output_dim(), rng);
    return mean_ + precision_.matrixU().solve(z);
}

RffSample RffModel::sample_function(Rng& rng) const { return RffSample(map_, sample_weights(rng)); }

RffModel fit_rff(const Dataset& data, const Kernel& kernel, int num_features, Rng& rng) {
    if (num_features < 1) throw std::invalid_argument("fit_rff: num_features must be >= 1");
    if (data.size() > 0 && data.input_dim() != kernel.input_dim())
        throw std::invalid_argument("fit_rff: dataset and kernel dimensions differ");
    auto map = std::make_shared<const FeatureMap>(FeatureMap::sample(kernel, num_features, rng));
    RffModel model(map, std::max(1, data.output_dim()), data.noise_variance);
    model.append(data.inputs, data.targets);
    return model;
}

GridFeatureCache::GridFeatureCache(std::shared_ptr<const FeatureMap> map,
                                   const Eigen::Ref<const Eigen::MatrixXd>& states,
                                   const Eigen::Ref<const Eigen::MatrixXd>& actions)
    : map_(std::move(map)) {
    const Eigen::Index ds = states.cols();
    const Eigen::Index da = actions.cols();
    if (ds + da != map_->input_dim()) throw std::invalid_argument("grid feature cache: dimension mismatch");
    const Eigen::Index m = map_->size();

    const Eigen::MatrixXd s_arg = states * map_->omega.leftCols(ds).transpose();
    state_trig_.resize(states.rows(), 2 * m);
    state_trig_.leftCols(m) = s_arg.array().cos().matrix();
    state_trig_.rightCols(m) = s_arg.array().sin().matrix();

    Eigen::MatrixXd a_arg = actions * map_->omega.rightCols(da).transpose();
    a_arg.rowwise() += map_->phase.transpose();
    action_cos_ = map_->scale * a_arg.array().cos().matrix();
    action_sin_ = map_->scale * a_arg.array().sin().matrix();
}

std::vector<Eigen::MatrixXd> GridFeatureCache::evaluate(const Eigen::MatrixXd& weights) const {
    const Eigen::Index m = map_->size();
    if (weights.rows() != m) throw std::invalid_argument("grid feature cache: weight rows != feature count");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(weights.cols());
    Eigen::MatrixXd right(2 * m, num_actions());
    for (Eigen::Index i = 0; i < weights.cols(); ++i) {
        right.topRows(m) = weights.col(i).asDiagonal() * action_cos_.transpose();
        right.bottomRows(m) = -(weights.col(i).asDiagonal() * action_sin_.transpose());
        out.emplace_back(state_trig_ * right);
    }
    return out;
}

}  // namespace gppsrl
