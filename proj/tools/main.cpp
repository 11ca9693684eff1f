#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gppsrl/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"GP posterior-sampling RL experiments and checks"};
    app.require_subcommand(1);
    gppsrl::CliOptions options;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", options.config, "JSON config file")->required();
        sub->add_option("--out", options.out, "output directory")->capture_default_str();
        sub->add_option("--seed", options.seed, "master seed; run seed i is master xor i")->capture_default_str();
        sub->add_option("--threads", options.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        return sub;
    };
    CLI::App* run = add("run", "Bayesian regret for every configured kernel (regret.csv, traj.csv, rates.csv)");
    CLI::App* sweep = add("sweep-horizon", "final regret across horizons (horizon.csv, rates.csv)");
    CLI::App* infogain = add("infogain", "greedy information gain curves (infogain.csv, rates.csv)");
    CLI::App* verify = add("verify", "inequality checks (verify.json, tails.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (run->parsed()) return gppsrl::cmd_run(options);
    if (sweep->parsed()) return gppsrl::cmd_sweep_horizon(options);
    if (infogain->parsed()) return gppsrl::cmd_infogain(options);
    if (verify->parsed()) return gppsrl::cmd_verify(options);
    return 2;
}
