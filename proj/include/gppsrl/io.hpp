#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gppsrl/analysis.hpp"
#include "gppsrl/mdp.hpp"
#include "gppsrl/psrl.hpp"

namespace gppsrl {

inline constexpr const char* kVersion = "0.1.0";

/// "# gppsrl <version> config=<hash> seed=<master>"
std::string provenance_line(const std::string& config_hash, std::uint64_t master_seed);

/// Number format of every output file: printf %.12g, NaN as "nan".
std::string format_number(double x);

/// seed,kernel,episode,inst_regret,cum_regret
void write_regret_csv(std::ostream& out, const std::string& provenance, const std::vector<RunResult>& runs);
/// seed,kernel,n,h,s1..,a1..,r,s'1..,post_var
void write_traj_csv(std::ostream& out, const std::string& provenance, const std::vector<RunResult>& runs);

struct TrajLog {
    std::uint64_t seed = 0;
    std::string kernel;
    std::vector<Trajectory> episodes;
};
/// Reads traj.csv back, grouped by (seed, kernel) in file order.
std::vector<TrajLog> read_traj_csv(std::istream& in);

/// kernel,t,selected,gain,gamma
void write_infogain_csv(std::ostream& out, const std::string& provenance, const std::vector<std::string>& kernels,
                        const std::vector<InfoGainCurve>& curves);

struct RateRow {
    std::string analysis;  // regret_vs_episode, regret_vs_horizon, gain_vs_T
    std::string kernel;
    RateFit fit;
    double reference = 0.0;  // exponent the fit is compared against
};
/// analysis,kernel,slope,intercept,residual,window_lo,window_hi,points,reference
void write_rates_csv(std::ostream& out, const std::string& provenance, const std::vector<RateRow>& rows);

/// check,u,empirical,bound,std,samples,pass
void write_tails_csv(std::ostream& out, const std::string& provenance, const std::vector<TailRow>& rows);

struct VerifyEntry {
    std::string lemma_tag;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};
/// JSON array of {lemma_tag, lhs, rhs, margin, pass}.
void write_verify_json(std::ostream& out, const std::vector<VerifyEntry>& entries);

}  // namespace gppsrl
