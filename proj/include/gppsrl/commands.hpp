#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gppsrl/config.hpp"
#include "gppsrl/io.hpp"

namespace gppsrl {

struct CliOptions {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Exit codes: 0 success, 1 runtime failure or failed check, 2 bad config.
int cmd_run(const CliOptions& options);
int cmd_sweep_horizon(const CliOptions& options);
int cmd_infogain(const CliOptions& options);
int cmd_verify(const CliOptions& options);

/// Episode window used for regret-rate fits: the first 10% of episodes are
/// burn-in, so the window is [max(1, N / 10), N].
RateFit fit_regret_curve(const RegretCurve& curve);

/// Containment runs: the first configured kernel under a Gaussian initial
/// law, with the verify.containment sizes and seeds master ^ (1000000 + i).
RunConfig containment_run_config(const ExperimentConfig& config, std::uint64_t master_seed);
/// Exponential-moment check for the first kernel: exact posterior after
/// uniform conditioning points with standard-normal targets, probed on a
/// uniform set. Uses stream 11 of the master seed.
ChiSquaredResult chi_squared_from_config(const ExperimentConfig& config, std::uint64_t master_seed);

/// Every inequality check of `verify`, also returning the tail table.
std::vector<VerifyEntry> run_verification(const ExperimentConfig& config, std::uint64_t master_seed, unsigned threads,
                                          std::vector<TailRow>& tails);

}  // namespace gppsrl
