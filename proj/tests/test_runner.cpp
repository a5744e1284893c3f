#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include "resist/runner.hpp"

using namespace resist;

namespace {

RunConfig base_config(int m, std::uint64_t seed) {
    RunConfig config(complete_graph(m));
    config.b = 1;
    config.J = 3;
    config.step = StepSchedule::constant(0.1);
    config.t_max = 60;
    config.seed = seed;
    return config;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

}  // namespace

TEST_CASE("stepsize schedules") {
    CHECK(stepsize(StepSchedule::constant(0.1), 7) == doctest::Approx(0.1));
    CHECK(stepsize(StepSchedule::diminishing(0.05, 0.6), 0) == doctest::Approx(0.05));
    CHECK(stepsize(StepSchedule::diminishing(0.05, 0.6), 3) ==
          doctest::Approx(0.05 / std::pow(4.0, 0.6)));
    CHECK(stepsize(StepSchedule::fixed_horizon(400), 123) == doctest::Approx(0.05));
    CHECK_THROWS_AS(StepSchedule::constant(0.0), std::invalid_argument);
}

TEST_CASE("gradient steps land exactly at (t+1) mod J == 0") {
    RunConfig config = base_config(5, 1);
    config.J = 3;
    config.t_max = 9;
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.0}), 0.0);
    Trajectory traj = run_resist(config, objs);
    CHECK(traj.completed_s == 3);
    CHECK(traj.s_to_t == std::vector<int>{2, 5, 8});
    CHECK(traj.s_snapshots.size() == 4);
    // Snapshot 0 is the initialization.
    CHECK(max_abs_diff(traj.s_snapshots[0],
                       initialize_state(5, 1, config.init_radius, config.seed)) == 0.0);
}

TEST_CASE("J = 2 alternates single consensus rounds with gradient steps") {
    RunConfig config = base_config(5, 1);
    config.J = 2;
    config.t_max = 10;
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.0}), 0.0);
    Trajectory traj = run_resist(config, objs);
    CHECK(traj.completed_s == 5);
    CHECK(traj.s_to_t == std::vector<int>{1, 3, 5, 7, 9});
    CHECK(traj.rounds.size() == 5);  // consensus at t = 0, 2, 4, 6, 8
}

TEST_CASE("a trailing partial block stops mid-pattern") {
    RunConfig config = base_config(5, 1);
    config.J = 4;
    config.t_max = 10;  // blocks of 4; rounds 8..9 are a partial block
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.0}), 0.0);
    Trajectory traj = run_resist(config, objs);
    CHECK(traj.completed_s == 2);
    CHECK(traj.rounds.size() == 8);
}

TEST_CASE("validation rejects bad configurations") {
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.0}), 0.0);
    RunConfig config = base_config(5, 1);
    config.J = 1;
    CHECK_THROWS_AS(run_resist(config, objs), std::invalid_argument);
    config = base_config(5, 1);
    config.t_max = 2;
    CHECK_THROWS_AS(run_resist(config, objs), std::invalid_argument);
    config = base_config(5, 1);
    config.b = 2;  // degree 4 < 2b + 1
    CHECK_THROWS_AS(run_resist(config, objs), std::invalid_argument);
    config = base_config(5, 1);
    auto three = make_quadratic(std::vector<std::vector<double>>(3, {0.0}), 0.0);
    CHECK_THROWS_AS(run_resist(config, three), std::invalid_argument);
}

TEST_CASE("identical locals with no attack converge to the common minimizer") {
    const std::vector<double> target{0.4, -0.3};
    RunConfig config = base_config(6, 2);
    config.J = 3;
    config.t_max = 3 * 250;
    auto objs = make_quadratic(std::vector<std::vector<double>>(6, target), 0.0);
    Trajectory traj = run_resist(config, objs);
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(traj.final_state(i, k) - target[static_cast<std::size_t>(k)]) < 1e-8);
}

TEST_CASE("dgd with no attack converges like the screened run") {
    const std::vector<double> target{1.0};
    RunConfig config = base_config(6, 3);
    config.t_max = 3 * 200;
    auto objs = make_quadratic(std::vector<std::vector<double>>(6, target), 0.0);
    Trajectory screened = run_resist(config, objs);
    Trajectory plain = run_dgd_multistep(config, objs);
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(screened.final_state(i, 0) - 1.0) < 1e-6);
        CHECK(std::abs(plain.final_state(i, 0) - 1.0) < 1e-6);
    }
}

TEST_CASE("runs replay bit-identically with the same seed") {
    RunConfig config = base_config(6, 9);
    config.attack = AttackPlan::dynamic_random(2, AttackStrategy::random_value(5.0), 9);
    auto objs = make_quadratic(std::vector<std::vector<double>>(6, {0.2}), 0.0);
    Trajectory a = run_resist(config, objs);
    Trajectory b = run_resist(config, objs);
    CHECK(a.final_state == b.final_state);
    for (std::size_t s = 0; s < a.s_snapshots.size(); ++s)
        CHECK(a.s_snapshots[s] == b.s_snapshots[s]);
}

TEST_CASE("node processing order cannot change the trajectory") {
    RunConfig config = base_config(6, 11);
    config.attack = AttackPlan::dynamic_random(2, AttackStrategy::random_value(5.0), 11);
    auto objs = make_quadratic(std::vector<std::vector<double>>(6, {0.2}), 0.0);
    Trajectory natural = run_resist(config, objs);
    config.processing_order = {5, 3, 1, 0, 4, 2};
    Trajectory shuffled = run_resist(config, objs);
    CHECK(natural.final_state == shuffled.final_state);
}

TEST_CASE("gradient rounds are purely local regardless of the attack plan") {
    RunConfig config = base_config(5, 4);
    config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(50.0), 4);
    config.snapshot_stride = 1;
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.7}), 0.0);
    Trajectory traj = run_resist(config, objs);
    // At every gradient round t, w(t+1) is exactly w(t) - h grad f_j(w(t)),
    // whatever the attack did elsewhere.
    for (int t = 0; t < config.t_max; ++t) {
        if ((t + 1) % config.J != 0) continue;
        const Matrix& before = traj.t_snapshots[static_cast<std::size_t>(t)].second;
        const Matrix& after = traj.t_snapshots[static_cast<std::size_t>(t + 1)].second;
        for (int j = 0; j < 5; ++j) {
            const double expected = before(j, 0) - 0.1 * objs[static_cast<std::size_t>(j)].grad({before(j, 0)})[0];
            CHECK(after(j, 0) == expected);
        }
    }
}

TEST_CASE("mixing matrices are recorded per coordinate when requested") {
    RunConfig config = base_config(5, 6);
    config.record_mixing = true;
    config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(5.0), 6);
    auto objs = make_quadratic(std::vector<std::vector<double>>(5, {0.1, 0.2}), 0.0);
    Trajectory traj = run_resist(config, objs);
    REQUIRE_FALSE(traj.rounds.empty());
    for (const auto& round : traj.rounds) {
        REQUIRE(round.mixing.size() == 2);
        // Row stochastic, zero on compromised links.
        for (const Matrix& y : round.mixing) {
            for (int i = 0; i < 5; ++i) {
                double sum = 0.0;
                for (int j = 0; j < 5; ++j) sum += y(i, j);
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
            for (const auto& [from, to] : round.links.links) CHECK(y(to, from) == 0.0);
        }
    }
}

TEST_CASE("alternative screening rules run end to end under attack") {
    auto objs = make_quadratic(std::vector<std::vector<double>>(8, {0.5}), 0.0);
    for (ScreeningRule rule : {ScreeningRule::median, ScreeningRule::krum, ScreeningRule::bulyan}) {
        RunConfig config(complete_graph(8));
        config.b = 1;
        config.J = 3;
        config.step = StepSchedule::constant(0.1);
        config.t_max = 3 * 150;
        config.seed = 13;
        config.screening = rule;
        config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(50.0), 13);
        Trajectory traj = run_resist(config, objs);
        for (int i = 0; i < 8; ++i) CHECK(std::abs(traj.final_state(i, 0) - 0.5) < 1e-3);
    }
    // Krum needs 2b + 3 candidates per neighborhood.
    RunConfig small(complete_graph(4));
    small.b = 1;
    small.J = 3;
    small.step = StepSchedule::constant(0.1);
    small.t_max = 30;
    small.screening = ScreeningRule::krum;
    auto four = make_quadratic(std::vector<std::vector<double>>(4, {0.5}), 0.0);
    CHECK_THROWS_AS(run_resist(small, four), std::invalid_argument);
}

TEST_CASE("consensus-only runs contract toward agreement") {
    ConsensusOnlyResult run = run_consensus_only(
        complete_graph(5), 1, AttackPlan::dynamic_random(1, AttackStrategy::random_value(5.0), 8),
        80, 1, 1.0, 8);
    CHECK(run.rounds.size() == 80);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 5; ++i) {
        lo = std::min(lo, run.final_state(i, 0));
        hi = std::max(hi, run.final_state(i, 0));
    }
    CHECK(hi - lo < 1e-8);
}
