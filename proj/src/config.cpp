#include "gppsrl/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gppsrl/errors.hpp"
#include "gppsrl/random.hpp"

namespace gppsrl {

namespace {

using json = nlohmann::json;

void allow(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    try {
        const json& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
        }
        out = v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

Eigen::VectorXd read_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(where + ": expected an array of numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

std::vector<int> read_int_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer() || x.get<long long>() < 1) throw ConfigError(where + ": expected positive integers");
        out.push_back(x.get<int>());
    }
    return out;
}

Kernel parse_kernel(const json& j, const std::string& where, int input_dim) {
    allow(j, where, {"family", "nu", "variance", "lengthscale"});
    std::string family;
    double nu = 0.0, variance = 1.0, lengthscale = 0.5;
    if (!j.contains("family")) throw ConfigError(where + ": missing 'family'");
    read(j, "family", where, family);
    read(j, "nu", where, nu);
    read(j, "variance", where, variance);
    read(j, "lengthscale", where, lengthscale);
    if (family == "matern" && !j.contains("nu")) throw ConfigError(where + ": matern kernels need 'nu'");
    try {
        return Kernel(parse_kernel_family(family, nu), variance, lengthscale, input_dim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

void parse_reward(const json& j, RewardConfig& r) {
    const std::string where = "mdp.reward";
    allow(j, where, {"goal", "goal_weight", "obstacle", "obstacle_radius", "obstacle_weight", "barrier_weight",
                     "barrier_stiffness", "r_max"});
    if (j.contains("goal")) r.goal = read_vector(j["goal"], where + ".goal");
    if (j.contains("obstacle")) r.obstacle = read_vector(j["obstacle"], where + ".obstacle");
    read(j, "goal_weight", where, r.goal_weight);
    read(j, "obstacle_radius", where, r.obstacle_radius);
    read(j, "obstacle_weight", where, r.obstacle_weight);
    read(j, "barrier_weight", where, r.barrier_weight);
    read(j, "barrier_stiffness", where, r.barrier_stiffness);
    read(j, "r_max", where, r.r_max);
}

InitialStateLaw parse_law(const std::string& s) {
    if (s == "uniform") return InitialStateLaw::Uniform;
    if (s == "gaussian") return InitialStateLaw::GaussianIso;
    throw ConfigError("mdp.initial_state: expected 'uniform' or 'gaussian'");
}

void parse_mdp(const json& j, MdpConfig& m) {
    const std::string where = "mdp";
    allow(j, where, {"state_dim", "action_dim", "sigma", "horizon", "episodes", "action_bound", "state_bound", "delta",
                     "initial_state", "initial_std", "reward"});
    read(j, "state_dim", where, m.state_dim);
    read(j, "action_dim", where, m.action_dim);
    read(j, "sigma", where, m.sigma);
    read(j, "horizon", where, m.horizon);
    read(j, "episodes", where, m.episodes);
    read(j, "action_bound", where, m.action_bound);
    read(j, "state_bound", where, m.state_bound);
    read(j, "delta", where, m.delta);
    read(j, "initial_std", where, m.initial_std);
    if (j.contains("initial_state")) {
        std::string law;
        read(j, "initial_state", where, law);
        m.initial_state = parse_law(law);
    }
    if (j.contains("reward")) parse_reward(j["reward"], m.reward);
}

void parse_grid(const json& j, GridConfig& g) {
    const std::string where = "grid";
    allow(j, where, {"state_knots", "action_knots", "transition"});
    read(j, "state_knots", where, g.state_knots);
    read(j, "action_knots", where, g.action_knots);
    if (j.contains("transition")) {
        std::string mode;
        read(j, "transition", where, mode);
        if (mode == "nearest")
            g.transition = TransitionMode::NearestCell;
        else if (mode == "smoothed")
            g.transition = TransitionMode::NoiseSmoothed;
        else
            throw ConfigError("grid.transition: expected 'nearest' or 'smoothed'");
    }
}

void parse_infogain(const json& j, InfoGainConfig& c) {
    const std::string where = "infogain";
    allow(j, where, {"dim", "per_dim", "radius", "variance", "lengthscale", "noise_variance", "T"});
    read(j, "dim", where, c.dim);
    read(j, "per_dim", where, c.per_dim);
    read(j, "radius", where, c.radius);
    read(j, "variance", where, c.variance);
    read(j, "lengthscale", where, c.lengthscale);
    read(j, "noise_variance", where, c.noise_variance);
    if (j.contains("T")) c.Ts = read_int_list(j["T"], where + ".T");
    if (c.dim < 1 || c.per_dim < 1 || !(c.radius > 0.0) || !(c.noise_variance > 0.0) || c.Ts.empty())
        throw ConfigError("infogain: invalid values");
}

void parse_verify(const json& j, VerifyConfig& v) {
    allow(j, "verify", {"tails", "chi_squared", "containment", "traj_log"});
    read(j, "traj_log", "verify", v.traj_log);
    if (j.contains("tails")) {
        const json& t = j["tails"];
        const std::string where = "verify.tails";
        allow(t, where, {"kernel", "radius", "resolution", "samples", "thresholds", "output_dim"});
        if (t.contains("kernel")) v.tail_kernel = parse_kernel(t["kernel"], where + ".kernel", 2);
        read(t, "radius", where, v.tails.radius);
        read(t, "resolution", where, v.tails.resolution);
        read(t, "samples", where, v.tails.samples);
        read(t, "output_dim", where, v.tails.output_dim);
        if (t.contains("thresholds")) {
            const Eigen::VectorXd u = read_vector(t["thresholds"], where + ".thresholds");
            v.tails.thresholds.assign(u.data(), u.data() + u.size());
        }
        if (v.tails.samples < 1000) throw ConfigError(where + ".samples: at least 1000 required");
    }
    if (j.contains("chi_squared")) {
        const json& c = j["chi_squared"];
        const std::string where = "verify.chi_squared";
        allow(c, where, {"probes", "samples", "conditioning_points"});
        read(c, "probes", where, v.chi_squared.probes);
        read(c, "samples", where, v.chi_squared.samples);
        read(c, "conditioning_points", where, v.chi_squared.conditioning_points);
    }
    if (j.contains("containment")) {
        const json& c = j["containment"];
        const std::string where = "verify.containment";
        allow(c, where, {"runs", "episodes", "horizon", "state_knots", "action_knots", "features"});
        read(c, "runs", where, v.containment.runs);
        read(c, "episodes", where, v.containment.episodes);
        read(c, "horizon", where, v.containment.horizon);
        read(c, "state_knots", where, v.containment.state_knots);
        read(c, "action_knots", where, v.containment.action_knots);
        read(c, "features", where, v.containment.features);
    }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig ExperimentConfig::run_for(const Kernel& kernel) const {
    RunConfig r = run;
    r.kernel = kernel;
    return r;
}

RunConfig ExperimentConfig::run_for(const Kernel& kernel, int horizon) const {
    RunConfig r = run_for(kernel);
    r.mdp.horizon = horizon;
    return r;
}

ExperimentConfig parse_config(const std::string& text, std::uint64_t master_seed) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    allow(j, "config", {"mdp", "kernel", "kernels", "features", "grid", "gp_noise_variance", "track_exact_variance",
                        "seeds", "horizons", "infogain", "verify"});
    ExperimentConfig c;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    c.hash = hex;

    if (j.contains("mdp")) parse_mdp(j["mdp"], c.run.mdp);
    const int input_dim = c.run.mdp.state_dim + c.run.mdp.action_dim;
    if (j.contains("kernel") == j.contains("kernels"))
        throw ConfigError("config: exactly one of 'kernel' or 'kernels' is required");
    if (j.contains("kernel")) {
        c.kernels.push_back(parse_kernel(j["kernel"], "kernel", input_dim));
    } else {
        if (!j["kernels"].is_array() || j["kernels"].empty()) throw ConfigError("kernels: expected a nonempty array");
        for (std::size_t i = 0; i < j["kernels"].size(); ++i)
            c.kernels.push_back(parse_kernel(j["kernels"][i], "kernels[" + std::to_string(i) + "]", input_dim));
    }
    c.run.kernel = c.kernels.front();

    read(j, "features", "config", c.run.num_features);
    if (j.contains("grid")) parse_grid(j["grid"], c.run.grid);
    if (j.contains("gp_noise_variance") && !j["gp_noise_variance"].is_null()) {
        read(j, "gp_noise_variance", "config", c.run.gp_noise_variance);
        if (!(c.run.gp_noise_variance > 0.0)) throw ConfigError("gp_noise_variance must be positive");
    }
    read(j, "track_exact_variance", "config", c.run.track_exact_variance);

    if (!j.contains("seeds")) {
        c.run.seeds = {split_seed(master_seed, 0)};
    } else if (j["seeds"].is_number_integer()) {
        const long long n = j["seeds"].get<long long>();
        if (n < 1) throw ConfigError("seeds: count must be >= 1");
        for (long long i = 0; i < n; ++i) c.run.seeds.push_back(split_seed(master_seed, static_cast<std::uint64_t>(i)));
    } else if (j["seeds"].is_array()) {
        for (const auto& s : j["seeds"]) {
            if (!s.is_number_unsigned()) throw ConfigError("seeds: expected nonnegative integers");
            c.run.seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        throw ConfigError("seeds: expected a count or a list");
    }
    if (j.contains("horizons")) c.horizons = read_int_list(j["horizons"], "horizons");
    if (j.contains("infogain")) parse_infogain(j["infogain"], c.infogain);
    for (const Kernel& k : c.kernels)
        c.infogain.kernels.emplace_back(k.family(), c.infogain.variance, c.infogain.lengthscale, c.infogain.dim);
    if (j.contains("verify")) parse_verify(j["verify"], c.verify);

    c.run.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, std::uint64_t master_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), master_seed);
}

}  // namespace gppsrl
