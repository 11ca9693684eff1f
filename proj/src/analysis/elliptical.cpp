#include <cmath>
#include <limits>
#include <stdexcept>

#include "gppsrl/analysis.hpp"

namespace gppsrl {

EllipticalResult elliptical_potential_check(const std::vector<Trajectory>& episodes, const Kernel& kernel,
                                            double noise_variance, int horizon, double delta) {
    if (!(noise_variance > 0.0)) throw std::invalid_argument("elliptical check: noise variance must be positive");
    EllipticalResult r;
    const double C = kernel.variance();
    if (episodes.empty()) {
        r.inequality = r.pass = true;
        return r;
    }
    const int dx = kernel.input_dim();
    const int ds = static_cast<int>(episodes.front().steps.front().state.size());
    if (ds + static_cast<int>(episodes.front().steps.front().action.size()) != dx)
        throw std::invalid_argument("elliptical check: log and kernel dimensions differ");

    GpPosterior posterior(kernel, ds, noise_variance);
    Eigen::MatrixXd maxima(0, dx);
    const double tol = 1e-6;
    for (const Trajectory& traj : episodes) {
        if (static_cast<int>(traj.steps.size()) != horizon)
            throw std::invalid_argument("elliptical check: episode length differs from the horizon");
        Eigen::MatrixXd x(horizon, dx);
        for (int h = 0; h < horizon; ++h)
            x.row(h) << traj.steps[static_cast<std::size_t>(h)].state.transpose(),
                traj.steps[static_cast<std::size_t>(h)].action.transpose();
        const Eigen::VectorXd var = posterior.variances(x);
        for (int h = 0; h < horizon; ++h) {
            const double logged = traj.steps[static_cast<std::size_t>(h)].post_var;
            if (std::isnan(logged)) continue;
            const double gap = std::abs(logged - var[h]);
            r.max_mismatch = std::max(r.max_mismatch, gap);
            if (gap > tol * std::max(1.0, std::abs(var[h]))) r.consistent = false;
        }
        if (horizon >= 2) {
            Eigen::Index best = 0;
            for (Eigen::Index h = 1; h < horizon - 1; ++h)
                if (var[h] > var[best]) best = h;
            r.lhs += var.head(horizon - 1).sum();
            maxima.conservativeResize(maxima.rows() + 1, Eigen::NoChange);
            maxima.row(maxima.rows() - 1) = x.row(best);
        }
        Eigen::MatrixXd inputs, targets;
        traj.training_rows(delta, inputs, targets);
        posterior.append(inputs, targets);
    }
    const double gain = information_gain(kernel, maxima, noise_variance);
    r.rhs = 2.0 * C * horizon / std::log1p(C / noise_variance) * gain;
    r.margin = r.rhs - r.lhs;
    r.inequality = r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-12;
    r.pass = r.inequality && r.consistent;
    return r;
}

}  // namespace gppsrl
