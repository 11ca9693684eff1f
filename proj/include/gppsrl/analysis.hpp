#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gppsrl/gp.hpp"
#include "gppsrl/kernels.hpp"
#include "gppsrl/mdp.hpp"
#include "gppsrl/psrl.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl {

// ---------------------------------------------------------------------------
// Information gain

/// Lattice with `per_dim` knots per axis over [-radius, radius]^dim,
/// restricted to the closed ball of the given radius.
Eigen::MatrixXd ball_lattice(int dim, int per_dim, double radius);

struct InfoGainCurve {
    std::vector<int> selected;       // domain row chosen at step t (0-based t)
    std::vector<double> gain;        // (1/2) log(1 + sigma_{t-1}^2(x_t) / s^2)
    std::vector<double> cumulative;  // running sum, the greedy estimate of gamma_t
    double noise_variance = 0.0;
};

/// Greedy posterior-variance maximization over the rows of `domain`, with
/// each selected point conditioned on with noise variance s^2 (points may
/// repeat). A lower bound on gamma_T restricted to the domain.
InfoGainCurve greedy_info_gain(const Kernel& kernel, const Eigen::MatrixXd& domain, int T, double noise_variance);

/// (1/2) log det(K / s^2 + I) of a point set (rows).
double information_gain(const Kernel& kernel, const Eigen::MatrixXd& points, double noise_variance);

// ---------------------------------------------------------------------------
// Rate fits

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square of the log-space residuals
    double window_lo = 0.0;
    double window_hi = 0.0;
    int points = 0;
};

/// Ordinary least squares of log y on log x over the pairs with
/// window_lo <= x <= window_hi (the whole range when both are zero).
/// Throws std::invalid_argument for fewer than 3 points or y <= 0 in the window.
RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys, double window_lo = 0.0,
                   double window_hi = 0.0);

/// gamma_T = O(T^{d / (2 nu + d)}) for Matern nu in dimension d.
double matern_gain_exponent(double nu, int d);
/// Regret exponent (nu + d) / (2 nu + d).
double matern_regret_exponent(double nu, int d);

/// Fits log gamma_T against log T from one greedy curve up to max(Ts).
RateFit matern_rate_check(const Kernel& kernel, const Eigen::MatrixXd& domain, const std::vector<int>& Ts,
                          double noise_variance);

// ---------------------------------------------------------------------------
// Concentration checks (Monte-Carlo, exact finite-dimensional sampling)

struct TailRow {
    std::string check;  // "scalar", "vector" or "vector_uncentered"
    double u = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
    double std = 0.0;  // binomial std of the frequency at p = bound
    int samples = 0;
    bool pass = false;
};

struct TailCheckConfig {
    double radius = 2.0;
    int resolution = 21;
    int samples = 2000;
    std::vector<double> thresholds{1.5, 2.0, 3.0};  // in units of sqrt(C)
    int output_dim = 2;                              // vector version
};

/// Centered tail of the grid supremum of f (scalar) and of |f|_2 (vector)
/// against exp(-u^2 / (2C)), plus the uncentered vector tail against
/// exp(-u^2 / (8C)) at the large-deviation threshold. The centering mean is
/// estimated from an independent batch. A failing row is rerun once with
/// four times the samples.
std::vector<TailRow> btis_tail_check(const Kernel& kernel, const TailCheckConfig& config, Rng& rng);

/// 84 alpha^{-1/2} sqrt(C d log(5 + 5 R^alpha L / C)), with d the input dimension.
double large_deviation_threshold(const Kernel& kernel, double radius);

struct ChiSquaredResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;  // log |Z| + d_s log sqrt 2
    int samples = 0;
    bool pass = false;
};

/// Monte-Carlo estimate of E[sup_{x in Z} |f^(n)(x) - f*(x)|^2 / (8 sigma_{n-1}^2(x))]
/// with f^(n), f* independent draws from the posterior on the probe set.
ChiSquaredResult chi_squared_moment_check(const GpPosterior& posterior, const Eigen::MatrixXd& probes, int samples,
                                          Rng& rng);

struct RadiusInputs {
    long T = 0;
    double action_radius = 0.0;  // R_a
    double C = 1.0;
    double noise_variance = 1.0;  // sigma^2
    double L = 1.0;
    double alpha = 1.0;
    int state_dim = 2;
    int action_dim = 2;
};

double state_norm_D(const RadiusInputs& in);
/// R = D sqrt(log(10 (T + R_a) max(1, L / C))).
double state_norm_radius(const RadiusInputs& in);
/// Smallest admissible T: D sqrt(2 log(10 D max(1, L / C) (R_a + 1))).
double state_norm_min_T(const RadiusInputs& in);

struct ContainmentResult {
    double radius = 0.0;
    int runs = 0;
    int exceeded = 0;
    double fraction = 0.0;
    double allowed = 0.0;  // 2/T + 3 binomial std
    double max_observed_norm = 0.0;
    bool T_condition = false;
    bool pass = false;
};

ContainmentResult containment_verdict(double radius, long T, const std::vector<double>& max_norms, bool T_condition);

/// Runs every seed of the config and compares the largest state norm of each
/// run with R, using sigma^2 of the transition noise and the kernel's
/// Holder constants.
ContainmentResult containment_check(const RunConfig& config, unsigned threads);

// ---------------------------------------------------------------------------
// Delayed elliptical potential

struct EllipticalResult {
    double lhs = 0.0;  // sum_n sum_{h <= H-1} sigma_{n-1}^2(x_{n,h})
    double rhs = 0.0;  // 2CH / log(1 + C / s^2) * (1/2) log det(K_Z / s^2 + I)
    double margin = 0.0;
    bool inequality = false;
    bool consistent = true;  // logged post_var agrees with the replay
    double max_mismatch = 0.0;
    bool pass = false;
};

/// Replays the exact posterior along the logged episodes (in order) and
/// evaluates both sides with Z the per-episode maximum-variance inputs.
EllipticalResult elliptical_potential_check(const std::vector<Trajectory>& episodes, const Kernel& kernel,
                                            double noise_variance, int horizon, double delta);

}  // namespace gppsrl
