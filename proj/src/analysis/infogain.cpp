#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "gppsrl/analysis.hpp"
#include "gppsrl/errors.hpp"

namespace gppsrl {

Eigen::MatrixXd ball_lattice(int dim, int per_dim, double radius) {
    if (dim < 1 || per_dim < 1 || !(radius > 0.0)) throw std::invalid_argument("ball_lattice: bad arguments");
    const Eigen::VectorXd axis = per_dim == 1 ? Eigen::VectorXd::Zero(1).eval()
                                              : Eigen::VectorXd::LinSpaced(per_dim, -radius, radius).eval();
    long total = 1;
    for (int d = 0; d < dim; ++d) total *= per_dim;
    std::vector<Eigen::VectorXd> kept;
    Eigen::VectorXd x(dim);
    for (long i = 0; i < total; ++i) {
        long rem = i;
        for (int d = dim; d-- > 0;) {
            x[d] = axis[rem % per_dim];
            rem /= per_dim;
        }
        if (x.norm() <= radius * (1.0 + 1e-12)) kept.push_back(x);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(kept.size()), dim);
    for (std::size_t i = 0; i < kept.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
    return out;
}

InfoGainCurve greedy_info_gain(const Kernel& kernel, const Eigen::MatrixXd& domain, int T, double noise_variance) {
    if (domain.rows() == 0) throw std::invalid_argument("greedy_info_gain: empty domain");
    if (T < 1) throw std::invalid_argument("greedy_info_gain: T must be >= 1");
    if (!(noise_variance > 0.0)) throw std::invalid_argument("greedy_info_gain: noise variance must be positive");
    const Eigen::Index G = domain.rows();
    InfoGainCurve curve;
    curve.noise_variance = noise_variance;
    Eigen::VectorXd var = Eigen::VectorXd::Constant(G, kernel.variance());
    // Column t holds the posterior covariance with the t-th selected point,
    // normalized by sqrt(var + s^2): c_t(x, x_t) / sqrt(sigma_t^2(x_t) + s^2).
    Eigen::MatrixXd U(G, T);
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < G; ++i)
            if (var[i] > var[best]) best = i;
        const double v = var[best];
        const double g = 0.5 * std::log1p(v / noise_variance);
        if (!(g > 0.0)) throw NumericalError("greedy_info_gain: nonpositive increment");
        total += g;
        curve.selected.push_back(static_cast<int>(best));
        curve.gain.push_back(g);
        curve.cumulative.push_back(total);

        Eigen::VectorXd col = kernel.cross(domain, domain.row(best)).col(0);
        if (t > 0) col.noalias() -= U.leftCols(t) * U.row(best).head(t).transpose();
        U.col(t) = col / std::sqrt(v + noise_variance);
        var -= U.col(t).cwiseAbs2();
        var = var.cwiseMax(0.0);
    }
    return curve;
}

double information_gain(const Kernel& kernel, const Eigen::MatrixXd& points, double noise_variance) {
    if (points.rows() == 0) return 0.0;
    Eigen::MatrixXd k = kernel.gram(points) / noise_variance;
    k.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericalError("information_gain: factorization failed");
    return llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace gppsrl
