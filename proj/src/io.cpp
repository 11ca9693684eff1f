#include "gppsrl/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gppsrl {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_number(const std::string& s) {
    if (s == "nan") return std::nan("");
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("traj csv: bad number '" + s + "'");
    return v;
}

// JSON has no NaN/inf; non-finite numbers become null.
nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string provenance_line(const std::string& config_hash, std::uint64_t master_seed) {
    return std::string("# gppsrl ") + kVersion + " config=" + config_hash + " seed=" + std::to_string(master_seed);
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_regret_csv(std::ostream& out, const std::string& provenance, const std::vector<RunResult>& runs) {
    out << provenance << '\n' << "seed,kernel,episode,inst_regret,cum_regret\n";
    for (const RunResult& r : runs)
        for (const EpisodeRecord& e : r.episodes)
            out << r.seed << ',' << r.kernel << ',' << e.episode << ',' << format_number(e.inst_regret) << ','
                << format_number(e.cum_regret) << '\n';
}

void write_traj_csv(std::ostream& out, const std::string& provenance, const std::vector<RunResult>& runs) {
    out << provenance << '\n';
    int ds = 0, da = 0;
    for (const RunResult& r : runs)
        if (!r.trajectories.empty() && !r.trajectories[0].steps.empty()) {
            ds = static_cast<int>(r.trajectories[0].steps[0].state.size());
            da = static_cast<int>(r.trajectories[0].steps[0].action.size());
            break;
        }
    out << "seed,kernel,n,h";
    for (int i = 1; i <= ds; ++i) out << ",s" << i;
    for (int i = 1; i <= da; ++i) out << ",a" << i;
    out << ",r";
    for (int i = 1; i <= ds; ++i) out << ",s'" << i;
    out << ",post_var\n";
    for (const RunResult& r : runs)
        for (const Trajectory& t : r.trajectories)
            for (const Transition& s : t.steps) {
                out << r.seed << ',' << r.kernel << ',' << t.episode << ',' << s.h;
                for (Eigen::Index i = 0; i < s.state.size(); ++i) out << ',' << format_number(s.state[i]);
                for (Eigen::Index i = 0; i < s.action.size(); ++i) out << ',' << format_number(s.action[i]);
                out << ',' << format_number(s.reward);
                for (Eigen::Index i = 0; i < s.next_state.size(); ++i) out << ',' << format_number(s.next_state[i]);
                out << ',' << format_number(s.post_var) << '\n';
            }
}

std::vector<TrajLog> read_traj_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = split(line);
        break;
    }
    if (header.size() < 6 || header[0] != "seed" || header[1] != "kernel" || header[2] != "n" || header[3] != "h" ||
        header.back() != "post_var")
        throw std::runtime_error("traj csv: unexpected header");
    int ds = 0, da = 0;
    for (const auto& h : header) {
        if (h.size() > 1 && h[0] == 's' && std::isdigit(static_cast<unsigned char>(h[1]))) ++ds;
        if (h.size() > 1 && h[0] == 'a' && std::isdigit(static_cast<unsigned char>(h[1]))) ++da;
    }
    if (header.size() != static_cast<std::size_t>(4 + 2 * ds + da + 2)) throw std::runtime_error("traj csv: bad header");

    std::vector<TrajLog> logs;
    std::map<std::pair<std::uint64_t, std::string>, std::size_t> index;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw std::runtime_error("traj csv: ragged row");
        const std::uint64_t seed = std::stoull(cells[0]);
        const auto key = std::make_pair(seed, cells[1]);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, logs.size()).first;
            logs.push_back(TrajLog{seed, cells[1], {}});
        }
        TrajLog& log = logs[it->second];
        const int n = std::stoi(cells[2]);
        if (log.episodes.empty() || log.episodes.back().episode != n) {
            log.episodes.emplace_back();
            log.episodes.back().episode = n;
        }
        Transition t;
        t.h = std::stoi(cells[3]);
        std::size_t c = 4;
        t.state.resize(ds);
        t.action.resize(da);
        t.next_state.resize(ds);
        for (int i = 0; i < ds; ++i) t.state[i] = parse_number(cells[c++]);
        for (int i = 0; i < da; ++i) t.action[i] = parse_number(cells[c++]);
        t.reward = parse_number(cells[c++]);
        for (int i = 0; i < ds; ++i) t.next_state[i] = parse_number(cells[c++]);
        t.post_var = parse_number(cells[c]);
        log.episodes.back().steps.push_back(std::move(t));
    }
    return logs;
}

void write_infogain_csv(std::ostream& out, const std::string& provenance, const std::vector<std::string>& kernels,
                        const std::vector<InfoGainCurve>& curves) {
    out << provenance << '\n' << "kernel,t,selected,gain,gamma\n";
    for (std::size_t k = 0; k < curves.size(); ++k)
        for (std::size_t t = 0; t < curves[k].gain.size(); ++t)
            out << kernels[k] << ',' << t + 1 << ',' << curves[k].selected[t] << ',' << format_number(curves[k].gain[t])
                << ',' << format_number(curves[k].cumulative[t]) << '\n';
}

void write_rates_csv(std::ostream& out, const std::string& provenance, const std::vector<RateRow>& rows) {
    out << provenance << '\n' << "analysis,kernel,slope,intercept,residual,window_lo,window_hi,points,reference\n";
    for (const RateRow& r : rows)
        out << r.analysis << ',' << r.kernel << ',' << format_number(r.fit.slope) << ','
            << format_number(r.fit.intercept) << ',' << format_number(r.fit.residual) << ','
            << format_number(r.fit.window_lo) << ',' << format_number(r.fit.window_hi) << ',' << r.fit.points << ','
            << format_number(r.reference) << '\n';
}

void write_tails_csv(std::ostream& out, const std::string& provenance, const std::vector<TailRow>& rows) {
    out << provenance << '\n' << "check,u,empirical,bound,std,samples,pass\n";
    for (const TailRow& r : rows)
        out << r.check << ',' << format_number(r.u) << ',' << format_number(r.empirical) << ','
            << format_number(r.bound) << ',' << format_number(r.std) << ',' << r.samples << ','
            << (r.pass ? "true" : "false") << '\n';
}

void write_verify_json(std::ostream& out, const std::vector<VerifyEntry>& entries) {
    nlohmann::json arr = nlohmann::json::array();
    for (const VerifyEntry& e : entries)
        arr.push_back({{"lemma_tag", e.lemma_tag},
                       {"lhs", json_number(e.lhs)},
                       {"rhs", json_number(e.rhs)},
                       {"margin", json_number(e.margin)},
                       {"pass", e.pass}});
    out << arr.dump(2) << '\n';
}

}  // namespace gppsrl
