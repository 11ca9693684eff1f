#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "gppsrl/planner.hpp"
#include "gppsrl/random.hpp"
#include "support/planner_oracle.hpp"

using namespace gppsrl;
using namespace gppsrl::testing;

namespace {

// Two states, two actions: s0 -a0-> s0, s0 -a1-> s1, s1 -a0-> s1, s1 -a1-> s0.
TransitionTable hand_table() {
    Eigen::MatrixXi next(2, 2);
    next << 0, 1, 1, 0;
    return TransitionTable::deterministic(next);
}

Eigen::MatrixXd hand_reward() {
    Eigen::MatrixXd r(2, 2);
    r << 0, 1, 5, 0;
    return r;
}

}  // namespace

TEST_CASE("grid indexing, midpoints and clamping") {
    const Grid g = Grid::uniform(2, 2.0, 5, 2, 1.0, 3);  // knots -2,-1,0,1,2
    CHECK(g.num_cells() == 25);
    CHECK(g.num_actions() == 9);
    CHECK(g.nearest_index(0, 0.49) == 2);
    CHECK(g.nearest_index(0, 0.5) == 2);  // midpoint goes to the lower knot
    CHECK(g.nearest_index(0, 0.51) == 3);
    CHECK(g.nearest_index(0, -7.0) == 0);
    CHECK(g.nearest_index(0, 9.0) == 4);
    CHECK(g.cell_index({1, 3}) == 1 * 5 + 3);  // first dimension slowest
    CHECK(g.cell_point(8) == Eigen::Vector2d(-1.0, 1.0));
    CHECK(g.nearest_cell(Eigen::Vector2d(-1.2, 0.9)) == 8);
    const auto lo = g.cell_interval(0, 0);
    CHECK(std::isinf(lo.first));
    CHECK(lo.second == doctest::Approx(-1.5));
    const auto mid = g.cell_interval(0, 2);
    CHECK(mid.first == doctest::Approx(-0.5));
    CHECK(mid.second == doctest::Approx(0.5));
    CHECK(std::isinf(g.cell_interval(0, 4).second));
    CHECK(g.action(0) == Eigen::Vector2d(-1.0, -1.0));
    CHECK_THROWS_AS(Grid({}, Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
    Eigen::VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(Grid({bad}, Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
}

TEST_CASE("hand instance: optimal value 6, always-a0 value 0") {
    const TransitionTable t = hand_table();
    const Eigen::MatrixXd r = hand_reward();
    const GridPolicy pi = value_iteration(t, r, 2);
    CHECK(pi.value(0, 0) == 6.0);
    CHECK(pi.act(1, 0) == 1);
    CHECK(pi.act(2, 1) == 0);
    CHECK(pi.value.row(2).isZero(0.0));
    Eigen::MatrixXi always0 = Eigen::MatrixXi::Zero(2, 2);
    CHECK(evaluate_policy(always0, t, r)(0, 0) == 0.0);
    CHECK(brute_force(t, r, 2)[0] == 6.0);
}

TEST_CASE("H = 1 is the myopic argmax with lowest-index ties") {
    Eigen::MatrixXd r(3, 3);
    r << 1, 3, 3, -1, -2, -3, 0, 0, 0;
    Eigen::MatrixXi next = Eigen::MatrixXi::Zero(3, 3);
    const GridPolicy pi = value_iteration(TransitionTable::deterministic(next), r, 1);
    CHECK(pi.act(1, 0) == 1);
    CHECK(pi.act(1, 1) == 0);
    CHECK(pi.act(1, 2) == 0);
    CHECK(pi.value(0, 0) == 3.0);
}

TEST_CASE("value iteration equals brute-force enumeration on 200 small instances") {
    Rng rng(1);
    std::uniform_int_distribution<int> S(1, 4), A(1, 3), H(1, 4);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const bool stochastic = trial % 2 == 1;
        int s = S(rng), a = A(rng), h = H(rng);
        if (stochastic) {  // keep enumeration small: A^(S H) policies
            s = std::min(s, 3);
            a = std::min(a, 2);
            h = std::min(h, 3);
        }
        TransitionTable t;
        Eigen::MatrixXd r;
        Eigen::MatrixXi next;
        random_instance(rng, s, a, stochastic, t, r, &next);
        const GridPolicy pi = value_iteration(t, r, h);
        const Eigen::VectorXd oracle = stochastic ? brute_force(t, r, h) : brute_force_open_loop(next, r, h);
        CHECK(pi.value.row(0).transpose() == oracle);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("Bellman consistency, self-consistency and policy dominance") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        TransitionTable t;
        Eigen::MatrixXd r;
        random_instance(rng, 6, 4, true, t, r);
        const int H = 5;
        const GridPolicy pi = value_iteration(t, r, H, trial % 2 ? 2u : 1u);
        CHECK(pi.value == evaluate_policy(pi.action, t, r));
        for (int h = 1; h <= H; ++h)
            for (int s = 0; s < 6; ++s) {
                const Eigen::VectorXd next = pi.value.row(h).transpose();
                const double chosen = backup(t, r, next, s, pi.act(h, s));
                CHECK(pi.value(h - 1, s) == chosen);
                for (int a = 0; a < 4; ++a) {
                    CHECK(chosen >= backup(t, r, next, s, a));
                    if (a < pi.act(h, s)) CHECK(chosen > backup(t, r, next, s, a));
                }
            }
        std::uniform_int_distribution<int> act(0, 3);
        Eigen::MatrixXi other(H, 6);
        for (int i = 0; i < other.size(); ++i) other.data()[i] = act(rng);
        const Eigen::MatrixXd v_other = evaluate_policy(other, t, r);
        CHECK(((pi.value - v_other).array() >= 0.0).all());
    }
}

TEST_CASE("shifted-horizon bound and value range") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        TransitionTable t;
        Eigen::MatrixXd r;
        random_instance(rng, 5, 3, trial % 2 == 0, t, r);
        const double r_max = 8.0;
        for (int H = 1; H <= 6; ++H) {
            const GridPolicy a = value_iteration(t, r, H);
            const GridPolicy b = value_iteration(t, r, H + 1);
            CHECK(((b.value.row(0) - a.value.row(0)).array() <= r_max).all());
            CHECK((a.value.row(0).array().abs() <= H * r_max).all());
        }
    }
    const GridPolicy zero = value_iteration(hand_table(), Eigen::MatrixXd::Zero(2, 2), 4);
    CHECK(zero.value.isZero(0.0));
}

TEST_CASE("tabulation: nearest cell, clamping, smoothed weights") {
    const Grid g = Grid::uniform(2, 2.0, 9, 1, 1.0, 3);
    const NextStateFn shift = [](const Eigen::VectorXd& s, const Eigen::VectorXd& a) -> Eigen::VectorXd {
        return s + Eigen::Vector2d(a[0], 0.0);
    };
    const TransitionTable near = tabulate(g, shift, TransitionMode::NearestCell, 0.1);
    for (int s = 0; s < g.num_cells(); ++s)
        for (int a = 0; a < g.num_actions(); ++a) {
            const int row = s * g.num_actions() + a;
            REQUIRE(near.offsets[row + 1] - near.offsets[row] == 1);
            CHECK(near.next[near.offsets[row]] == g.nearest_cell(shift(g.cell_point(s), g.action(a))));
        }
    // from the right edge, pushing right stays on the boundary cell
    const int edge = g.cell_index({8, 4});
    CHECK(near.next[near.offsets[edge * 3 + 2]] == edge);

    const TransitionTable smooth = tabulate(g, shift, TransitionMode::NoiseSmoothed, 0.3);
    for (int row = 0; row + 1 < static_cast<int>(smooth.offsets.size()); ++row) {
        double sum = 0.0;
        for (int k = smooth.offsets[row]; k < smooth.offsets[row + 1]; ++k) {
            CHECK(smooth.prob[k] > 0.0);
            sum += smooth.prob[k];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    const TransitionTable sharp = tabulate(g, shift, TransitionMode::NoiseSmoothed, 1e-9);
    for (int row = 0; row + 1 < static_cast<int>(sharp.offsets.size()); ++row) {
        double best = 0.0;
        int arg = -1;
        for (int k = sharp.offsets[row]; k < sharp.offsets[row + 1]; ++k)
            if (sharp.prob[k] > best) best = sharp.prob[k], arg = sharp.next[k];
        if (best > 0.5) CHECK(arg == near.next[near.offsets[row]]);
    }
}

TEST_CASE("initial cell weights sum to one") {
    const Grid g = Grid::uniform(2, 2.0, 41, 2, 1.0, 3);
    const Eigen::VectorXd u = uniform_cell_weights(g, -2.0, 2.0);
    CHECK(u.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((u.array() >= 0.0).all());
    // boundary cells are half width, corners a quarter
    CHECK(u[g.cell_index({0, 0})] == doctest::Approx(u[g.cell_index({20, 20})] / 4.0));
    const Eigen::VectorXd gw = gaussian_cell_weights(g, 0.3);
    CHECK(gw.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gw.maxCoeff() == gw[g.cell_index({20, 20})]);
}

TEST_CASE("empty and malformed tables are argument errors") {
    CHECK_THROWS_AS(TransitionTable::deterministic(Eigen::MatrixXi(0, 0)), std::invalid_argument);
    Eigen::MatrixXi bad(1, 1);
    bad << 3;
    CHECK_THROWS_AS(TransitionTable::deterministic(bad), std::invalid_argument);
    CHECK_THROWS_AS(value_iteration(hand_table(), Eigen::MatrixXd::Zero(3, 2), 2), std::invalid_argument);
}

TEST_CASE("policy CSV dump") {
    const GridPolicy pi = value_iteration(hand_table(), hand_reward(), 2);
    std::stringstream ss;
    pi.write_csv(ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header.find("h") != std::string::npos);
    int lines = 0;
    for (std::string line; std::getline(ss, line);) ++lines;
    CHECK(lines == 2 * 2);
}
