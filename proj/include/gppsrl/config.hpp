#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gppsrl/analysis.hpp"
#include "gppsrl/kernels.hpp"
#include "gppsrl/psrl.hpp"

namespace gppsrl {

struct InfoGainConfig {
    int dim = 4;
    int per_dim = 7;       // lattice knots per axis
    double radius = 1.0;   // lattice restricted to this ball
    double variance = 1.0;
    double lengthscale = 2.0;
    double noise_variance = 1e-3;
    std::vector<int> Ts{50, 100, 200, 400, 800};
    std::vector<Kernel> kernels;  // families of the experiment kernels, rebuilt with the fields above
};

struct ChiSquaredConfig {
    int probes = 25;
    int samples = 2000;
    int conditioning_points = 30;
};

struct ContainmentConfig {
    int runs = 200;
    int episodes = 75;
    int horizon = 20;
    int state_knots = 21;
    int action_knots = 5;
    int features = 200;
};

struct VerifyConfig {
    Kernel tail_kernel = Kernel::squared_exponential(1.0, 0.5, 2);
    TailCheckConfig tails;
    ChiSquaredConfig chi_squared;
    ContainmentConfig containment;
    std::string traj_log;  // optional traj.csv to check in addition to fresh runs
};

/// Everything one config file can hold. `run.kernel` is unset in meaning:
/// the commands iterate over `kernels`.
struct ExperimentConfig {
    RunConfig run;
    std::vector<Kernel> kernels;
    std::vector<int> horizons{20, 40, 80, 160};
    InfoGainConfig infogain;
    VerifyConfig verify;
    std::string hash;  // FNV-1a 64 of the canonical JSON, hex

    RunConfig run_for(const Kernel& kernel) const;
    RunConfig run_for(const Kernel& kernel, int horizon) const;
};

/// Parses the JSON text. Unknown keys, wrong types and invalid values throw
/// ConfigError. `seeds` given as a count n expands to master ^ i, i < n.
ExperimentConfig parse_config(const std::string& text, std::uint64_t master_seed);
ExperimentConfig load_config(const std::string& path, std::uint64_t master_seed);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace gppsrl
