#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gppsrl/errors.hpp"
#include "gppsrl/psrl.hpp"

using namespace gppsrl;

namespace {

RunConfig small_config(int episodes = 6, int horizon = 5) {
    RunConfig c;
    c.mdp.episodes = episodes;
    c.mdp.horizon = horizon;
    c.kernel = Kernel::squared_exponential(1.0, 0.5, 4);
    c.num_features = 150;
    c.grid.state_knots = 11;
    c.grid.action_knots = 3;
    c.seeds = {3, 4, 5};
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig c = small_config();
    CHECK(c.effective_gp_noise() == doctest::Approx(0.01));
    c.gp_noise_variance = 0.5;
    CHECK(c.effective_gp_noise() == 0.5);
    RunConfig dup = small_config();
    dup.seeds = {1, 1};
    CHECK_THROWS_AS(dup.validate(), ConfigError);
    RunConfig none = small_config();
    none.seeds.clear();
    CHECK_THROWS_AS(none.validate(), ConfigError);
    RunConfig dim = small_config();
    dim.kernel = Kernel::squared_exponential(1.0, 0.5, 3);
    CHECK_THROWS_AS(dim.validate(), ConfigError);
}

TEST_CASE("single episode against a pure prior sample") {
    const RunConfig c = small_config(1, 5);
    const RunResult r = run_psrl(c, 7);
    REQUIRE(r.episodes.size() == 1);
    CHECK(r.episodes[0].episode == 1);
    CHECK(r.episodes[0].inst_regret >= -1e-9);
    CHECK(r.episodes[0].cum_regret == r.episodes[0].inst_regret);
    CHECK(r.trajectories.size() == 1);
    CHECK(r.dataset_rows == 4);
}

TEST_CASE("regret records: nonnegative, cumulative, data accounting") {
    const RunConfig c = small_config();
    const RunResult r = run_psrl(c, 11);
    REQUIRE(r.episodes.size() == 6);
    double cum = 0.0;
    for (const EpisodeRecord& e : r.episodes) {
        CHECK(e.inst_regret >= -1e-9);
        CHECK(e.inst_regret == doctest::Approx(e.optimal_value - e.achieved_value));
        cum += e.inst_regret;
        CHECK(e.cum_regret == doctest::Approx(cum));
    }
    CHECK(r.dataset_rows == 6 * (5 - 1));
    for (const Trajectory& t : r.trajectories) {
        CHECK(t.steps.size() == 5);
        for (const Transition& s : t.steps) CHECK(s.action.cwiseAbs().maxCoeff() <= c.mdp.action_bound);
    }
    // the first episode sees the prior: logged variance is the prior variance
    for (const Transition& s : r.trajectories[0].steps) CHECK(s.post_var == doctest::Approx(1.0));
}

TEST_CASE("oracle agent has zero regret") {
    const RunConfig c = small_config();
    const auto runs = run_seeds(c, 1, Agent::Oracle);
    for (const RunResult& r : runs)
        for (const EpisodeRecord& e : r.episodes) CHECK(std::abs(e.inst_regret) <= 1e-9);
    const RegretCurve curve = bayesian_regret(runs);
    REQUIRE(curve.mean.size() == 6);
    for (double m : curve.mean) CHECK(std::abs(m) <= 1e-9);
}

TEST_CASE("identical seeds give bit-identical records, independent of threads") {
    const RunConfig c = small_config();
    const auto a = run_seeds(c, 1);
    const auto b = run_seeds(c, 3);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == c.seeds[i]);
        CHECK(a[i].seed == b[i].seed);
        for (std::size_t e = 0; e < a[i].episodes.size(); ++e) {
            CHECK(a[i].episodes[e].inst_regret == b[i].episodes[e].inst_regret);
            CHECK(a[i].trajectories[e].steps.back().next_state == b[i].trajectories[e].steps.back().next_state);
        }
    }
}

TEST_CASE("tracking off logs NaN variances") {
    RunConfig c = small_config(2, 3);
    c.track_exact_variance = false;
    const RunResult r = run_psrl(c, 1);
    for (const Transition& s : r.trajectories[1].steps) CHECK(std::isnan(s.post_var));
}

TEST_CASE("Bayesian regret curve: mean and standard error") {
    std::vector<RunResult> runs(2);
    runs[0].episodes = {{1, 0, 0, 1.0, 1.0}, {2, 0, 0, 1.0, 2.0}};
    runs[1].episodes = {{1, 0, 0, 3.0, 3.0}, {2, 0, 0, 3.0, 6.0}};
    const RegretCurve c = bayesian_regret(runs);
    REQUIRE(c.mean.size() == 2);
    CHECK(c.mean[0] == 2.0);
    CHECK(c.mean[1] == 4.0);
    CHECK(c.std_error[0] == doctest::Approx(1.0));  // sample std sqrt(2) over sqrt(2)
    CHECK(c.std_error[1] == doctest::Approx(2.0));
}

TEST_CASE("initial cell weights follow the configured law") {
    RunConfig c = small_config();
    const Grid g = c.make_grid();
    CHECK(initial_cell_weights(g, c.mdp).sum() == doctest::Approx(1.0));
    c.mdp.initial_state = InitialStateLaw::GaussianIso;
    const Eigen::VectorXd w = initial_cell_weights(g, c.mdp);
    CHECK(w.sum() == doctest::Approx(1.0));
    CHECK(w[g.nearest_cell(Eigen::Vector2d::Zero())] > 0.99);
}
