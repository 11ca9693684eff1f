#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gppsrl/analysis.hpp"

namespace gppsrl {

RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys, double window_lo, double window_hi) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    const bool all = window_lo == 0.0 && window_hi == 0.0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!all && (xs[i] < window_lo || xs[i] > window_hi)) continue;
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    if (lx.size() < 3) throw std::invalid_argument("fit_loglog: need at least 3 points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog: x values are all equal");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - fit.intercept - fit.slope * lx[i];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = static_cast<int>(lx.size());
    fit.window_lo = all ? std::exp(*std::min_element(lx.begin(), lx.end())) : window_lo;
    fit.window_hi = all ? std::exp(*std::max_element(lx.begin(), lx.end())) : window_hi;
    return fit;
}

double matern_gain_exponent(double nu, int d) { return d / (2.0 * nu + d); }

double matern_regret_exponent(double nu, int d) { return (nu + d) / (2.0 * nu + d); }

RateFit matern_rate_check(const Kernel& kernel, const Eigen::MatrixXd& domain, const std::vector<int>& Ts,
                          double noise_variance) {
    if (Ts.size() < 4) throw std::invalid_argument("matern_rate_check: need at least 4 values of T");
    int t_max = 0;
    for (int t : Ts) t_max = std::max(t_max, t);
    const InfoGainCurve curve = greedy_info_gain(kernel, domain, t_max, noise_variance);
    std::vector<double> xs, ys;
    for (int t : Ts) {
        if (t < 1) throw std::invalid_argument("matern_rate_check: T must be >= 1");
        xs.push_back(t);
        ys.push_back(curve.cumulative[static_cast<std::size_t>(t - 1)]);
    }
    return fit_loglog(xs, ys);
}

}  // namespace gppsrl
