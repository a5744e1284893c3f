#include "resist/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "resist/config.hpp"
#include "resist/metrics.hpp"
#include "resist/mixing_analysis.hpp"
#include "resist/suite.hpp"

namespace resist {

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

DirectedGraph er_with_min_degree(int m, double rho, std::uint64_t seed, int want) {
    for (std::uint64_t a = 0; a < 200; ++a) {
        DirectedGraph g = generate_erdos_renyi(m, rho, seed + a);
        if (min_in_degree(g) >= want) return g;
    }
    throw std::runtime_error("could not sample a graph with the required degree");
}

std::vector<std::vector<double>> spread_targets(int m, int d, double spread, std::uint64_t seed) {
    std::vector<std::vector<double>> t;
    for (int j = 0; j < m; ++j) {
        Rng rng = Rng::keyed(seed, {label_key("targets"), static_cast<std::uint64_t>(j)});
        std::vector<double> a(static_cast<std::size_t>(d));
        for (double& v : a) v = rng.next_uniform(-spread, spread);
        t.push_back(std::move(a));
    }
    return t;
}

double tail_mean(const std::vector<double>& v, std::size_t n) {
    n = std::min(n, v.size());
    if (n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = v.size() - n; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(n);
}

double frob_to_stack(const Matrix& w, const std::vector<double>& wstar) {
    double s = 0.0;
    for (int i = 0; i < w.rows(); ++i)
        for (int k = 0; k < w.cols(); ++k) {
            const double r = w(i, k) - wstar[static_cast<std::size_t>(k)];
            s += r * r;
        }
    return std::sqrt(s);
}

// Criterion 1: over random rounds, the reconstructed mixing matrix reproduces
// the trimmed-mean update, is row stochastic, zeroes compromised links, and
// keeps enough entries above beta.
Criterion c1_mixing_equivalence() {
    Criterion c;
    double worst_residual = 0.0, worst_row_sum = 0.0;
    Rng value_rng(424242);
    for (int r = 0; r < 1000 && c.pass; ++r) {
        const int b = 1 + (r % 2);
        const int m = b == 1 ? 5 + (r % 6) : 6 + (r % 5);
        const int d = 1 + (r % 3);
        const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(r);
        DirectedGraph g = (b == 1 && r % 3 == 0) ? er_with_min_degree(m, 0.8, seed, 2 * b + 1)
                                                 : complete_graph(m);

        AttackStrategy strategy = AttackStrategy::random_value(50.0);
        const int links = r % (2 * b + 2);
        AttackPlan plan = AttackPlan::dynamic_random(links, strategy, seed);
        CompromisedLinkSet link_set = select_links(plan, g, b, r);
        c.require(link_set.max_incoming() <= b, "per-neighborhood cap violated");

        Matrix w(m, d);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < d; ++k) w(i, k) = value_rng.next_uniform(-5.0, 5.0);

        std::map<Edge, std::vector<double>> corrupted;
        for (const Edge& e : link_set.links) {
            Rng stream = corruption_stream(seed, r, e.first, e.second);
            corrupted[e] = corrupt(w.row(e.first), strategy, stream);
        }

        // Screened outputs from the received (possibly corrupted) values.
        Matrix outputs(m, d);
        for (int j = 0; j < m; ++j) {
            std::vector<std::pair<int, std::vector<double>>> received;
            for (int i : g.in_neighbors(j)) {
                auto it = corrupted.find({i, j});
                received.emplace_back(i, it != corrupted.end() ? it->second : w.row(i));
            }
            std::vector<double> out = cwtm(w.row(j), received, b);
            for (int k = 0; k < d; ++k) outputs(j, k) = out[static_cast<std::size_t>(k)];
        }

        const double beta = mixing_beta(m, b);
        for (int k = 0; k < d && c.pass; ++k) {
            std::map<Edge, double> corrupted_k;
            for (const auto& [e, v] : corrupted) corrupted_k[e] = v[static_cast<std::size_t>(k)];
            std::vector<MixingRow> rows;
            Matrix y = build_mixing_matrix(g, w.col(k), corrupted_k, b, k, TieBreak::smallest_id(), &rows);

            const std::vector<double> reproduced = mat_vec(y, w.col(k));
            for (int j = 0; j < m; ++j) {
                worst_residual = std::max(worst_residual, std::abs(reproduced[static_cast<std::size_t>(j)] - outputs(j, k)));
                double sum = 0.0;
                int above_beta = 0;
                for (int i = 0; i < m; ++i) {
                    sum += y(j, i);
                    if (y(j, i) >= beta - 1e-12) ++above_beta;
                    if (i != j && !g.has_edge(i, j))
                        c.require(y(j, i) == 0.0, "nonzero weight on a non-edge");
                }
                worst_row_sum = std::max(worst_row_sum, std::abs(sum - 1.0));
                int compromised_in = 0;
                for (const Edge& e : link_set.links)
                    if (e.second == j) {
                        ++compromised_in;
                        c.require(y(j, e.first) == 0.0, "nonzero weight on a compromised link");
                    }
                const int honest_in = g.in_degree(j) - compromised_in;
                c.require(above_beta >= honest_in - b + 1, "too few entries above beta");
            }
        }
    }
    c.require(worst_residual < 1e-10, "cwtm reproduction residual " + num(worst_residual));
    c.require(worst_row_sum < 1e-12, "row sum deviation " + num(worst_row_sum));
    c.note("max residual " + num(worst_residual) + ", max row-sum error " + num(worst_row_sum));
    return c;
}

// Criterion 2: hand-evaluated five-node fixture, first coordinate: node A row
// (1/3, 0, 1/6, 1/3, 1/6) and node B row (0, 1/2, 1/2, 0, 0).
Criterion c2_reference_fixture() {
    Criterion c;
    const double kTol = 1e-12;

    MixingRow row_a = build_mixing_row_oracle(
        5, 0, 0, 4.0, {{1, 3.0}, {2, 3.0}, {3, 2.0}, {4, 5.0}}, {1}, 1);
    const std::vector<double> expect_a{1.0 / 3.0, 0.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0};
    for (int i = 0; i < 5; ++i)
        c.require(std::abs(row_a.weights[static_cast<std::size_t>(i)] - expect_a[static_cast<std::size_t>(i)]) < kTol,
                  "node A weight " + std::to_string(i));

    MixingRow row_b = build_mixing_row_oracle(5, 1, 0, 3.0, {{0, 4.0}, {2, 3.0}, {3, 2.0}}, {0}, 1);
    const std::vector<double> expect_b{0.0, 0.5, 0.5, 0.0, 0.0};
    for (int i = 0; i < 5; ++i)
        c.require(std::abs(row_b.weights[static_cast<std::size_t>(i)] - expect_b[static_cast<std::size_t>(i)]) < kTol,
                  "node B weight " + std::to_string(i));

    // Same rows via the full-matrix builder on the underlying topology
    // (complete graph minus the B-E pair; pairs A-B and C-E compromised with
    // pass-through values).
    DirectedGraph g = complete_graph(5);
    DirectedGraph g2(5);
    for (const auto& [i, j] : g.edges())
        if (!((i == 1 && j == 4) || (i == 4 && j == 1))) g2.add_edge(i, j);
    const std::vector<double> values{4.0, 3.0, 3.0, 2.0, 5.0};
    const std::map<Edge, double> corrupted{{{1, 0}, 3.0}, {{0, 1}, 4.0}, {{4, 2}, 5.0}, {{2, 4}, 3.0}};
    Matrix y = build_mixing_matrix(g2, values, corrupted, 1);
    for (int i = 0; i < 5; ++i) {
        c.require(std::abs(y(0, i) - expect_a[static_cast<std::size_t>(i)]) < kTol, "matrix row A");
        c.require(std::abs(y(1, i) - expect_b[static_cast<std::size_t>(i)]) < kTol, "matrix row B");
    }
    return c;
}

// Criterion 3: complete graph M=5, b=1, dynamic random attacks, 200
// consensus-only rounds: delta of the prefix product is non-increasing,
// below 1e-8 at the end, decays log-linearly, and the formal envelope holds.
Criterion c3_geometric_mixing() {
    Criterion c;
    const int m = 5, b = 1, rounds = 200;
    DirectedGraph g = complete_graph(m);
    AttackPlan plan = AttackPlan::dynamic_random(2, AttackStrategy::random_value(50.0), 31);
    ConsensusOnlyResult run = run_consensus_only(g, b, plan, rounds, 1, 5.0, 31);

    std::vector<Matrix> ys;
    ys.reserve(run.rounds.size());
    for (const auto& round : run.rounds) ys.push_back(round.mixing.front());

    bool saturated = false;
    const double tau = static_cast<double>(count_tau(g, b, &saturated));
    GeometricMixingReport report =
        verify_geometric_mixing(ys, mixing_beta(m, b), tau, m);

    c.require(report.monotone, "delta not non-increasing along prefixes");
    c.require(report.final_delta < 1e-8, "final delta " + num(report.final_delta));
    c.require(report.fitted_slope < 0.0, "fitted slope " + num(report.fitted_slope));
    c.require(report.fitted_r2 > 0.95, "fit r2 " + num(report.fitted_r2));
    c.require(report.formal_bound_holds, "formal envelope violated");
    c.note("delta(200) " + num(report.final_delta) + ", slope " + num(report.fitted_slope) +
           ", r2 " + num(report.fitted_r2));
    return c;
}

// Criterion 4: identical quadratics, M=10, b=1, J=11: xi6 vanishes (below
// 1e-8 at s=500) and decays at the centralized rate log(1 - mu h) +- 25%.
Criterion c4_exact_convergence() {
    Criterion c;
    const int m = 10, b = 1, j_param = 11, s_target = 500, s_extra = 30;
    const double h = 0.1;

    DirectedGraph g = er_with_min_degree(m, 0.5, 1001, 2 * b + 1);
    RunConfig config(g);
    config.b = b;
    config.J = j_param;
    config.step = StepSchedule::constant(h);
    config.t_max = (s_target + s_extra) * j_param;
    config.init_radius = 1.0;
    config.seed = 1001;
    config.record_mixing = true;
    config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(100.0), 1001);

    std::vector<std::vector<double>> targets(m, std::vector<double>{0.3, -0.2});
    auto objectives = make_quadratic(targets, 0.0);
    Trajectory traj = run_resist(config, objectives);
    MetricsLog log = compute_metrics(traj, objectives);

    c.require(log.rows.size() > static_cast<std::size_t>(s_target), "run too short");
    const double xi6_at_target = log.rows[static_cast<std::size_t>(s_target)].xi6;
    c.require(log.rows[static_cast<std::size_t>(s_target)].chat_converged,
              "consensus weights not converged at s=500");
    c.require(xi6_at_target < 1e-8, "xi6(500) = " + num(xi6_at_target));

    // Fit over the clean geometric regime, away from the transient and the
    // floating-point floor.
    std::vector<double> series;
    for (const auto& row : log.rows) {
        if (row.s < 25) continue;
        if (row.xi6 < 1e-12 || !row.chat_converged) break;
        series.push_back(row.xi6);
    }
    RateFit fit = fit_geometric_rate(series, 0);
    const double expect = std::log(1.0 - objectives.front().mu * h);
    c.require(std::abs(fit.slope - expect) <= 0.25 * std::abs(expect),
              "slope " + num(fit.slope) + " vs log(1 - mu h) = " + num(expect));
    c.note("xi6(500) " + num(xi6_at_target) + ", slope " + num(fit.slope) + " (target " +
           num(expect) + ")");
    return c;
}

// Criterion 5: heterogeneous quadratics: the asymptotic consensus error is
// O(h), so halving h roughly halves it (ratio in [1.5, 2.6] over 5 seeds).
Criterion c5_consensus_ball() {
    Criterion c;
    const int m = 10, b = 1, j_param = 11, s_steps = 250;
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        DirectedGraph g = er_with_min_degree(m, 0.6, 500 + seed, 2 * b + 1);
        auto objectives = make_quadratic(spread_targets(m, 2, 1.0, seed), 0.0);
        double tails[2];
        const double steps[2] = {0.12, 0.06};
        for (int variant = 0; variant < 2; ++variant) {
            RunConfig config(g);
            config.b = b;
            config.J = j_param;
            config.step = StepSchedule::constant(steps[variant]);
            config.t_max = s_steps * j_param;
            config.seed = seed;
            config.record_mixing = true;
            config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(25.0), seed);
            Trajectory traj = run_resist(config, objectives);
            MetricsLog log = compute_metrics(traj, objectives);
            std::vector<double> xi1;
            for (const auto& row : log.rows)
                if (row.chat_converged) xi1.push_back(row.xi1_max);
            tails[variant] = tail_mean(xi1, 25);
        }
        ratio_sum += tails[0] / tails[1];
    }
    const double mean_ratio = ratio_sum / 5.0;
    c.require(mean_ratio >= 1.5 && mean_ratio <= 2.6, "mean ratio " + num(mean_ratio));
    c.note("mean h vs h/2 ratio " + num(mean_ratio));
    return c;
}

// Criterion 6: one persistently attacked link. Unscreened averaging is
// destroyed (terminal error > 10x its attack-free run); the screened run
// stays within 3x of its attack-free run.
Criterion c6_resist_vs_dgd() {
    Criterion c;
    const int m = 10, b = 1, j_param = 11, s_steps = 220;
    DirectedGraph g = er_with_min_degree(m, 0.6, 77, 2 * b + 1);
    auto objectives = make_quadratic(spread_targets(m, 2, 1.0, 77), 0.0);
    CentralizedSolution sol = centralized_solve(objectives);

    auto terminal = [&](bool screened, bool attacked) {
        RunConfig config(g);
        config.b = b;
        config.J = j_param;
        config.step = StepSchedule::constant(0.1);
        config.t_max = s_steps * j_param;
        config.seed = 77;
        config.record_mixing = false;
        const Edge link = g.edges().front();
        config.attack = attacked
                            ? AttackPlan::static_plan({link}, AttackStrategy::random_value(50.0), g, b, 77)
                            : AttackPlan::none();
        Trajectory traj = screened ? run_resist(config, objectives)
                                   : run_dgd_multistep(config, objectives);
        return frob_to_stack(traj.final_state, sol.w);
    };

    const double dgd_clean = terminal(false, false);
    const double dgd_attacked = terminal(false, true);
    const double resist_clean = terminal(true, false);
    const double resist_attacked = terminal(true, true);

    c.require(dgd_attacked > 10.0 * dgd_clean,
              "dgd attacked/clean = " + num(dgd_attacked / dgd_clean));
    c.require(resist_attacked < 3.0 * resist_clean,
              "screened attacked/clean = " + num(resist_attacked / resist_clean));
    c.note("dgd ratio " + num(dgd_attacked / dgd_clean) + ", screened ratio " +
           num(resist_attacked / resist_clean));
    return c;
}

// Criterion 7: a Byzantine node and its mapped static link attack produce
// identical trajectories on the regular nodes.
Criterion c7_byzantine_mapping() {
    Criterion c;
    const int m = 8, b = 1, j_param = 5, byz = 2;
    double worst = 0.0;
    for (std::uint64_t seed = 11; seed <= 13; ++seed) {
        DirectedGraph g = er_with_min_degree(m, 0.7, seed, 2 * b + 1);
        auto objectives = make_quadratic(spread_targets(m, 2, 1.0, seed), 0.0);

        RunConfig node_level(g);
        node_level.b = b;
        node_level.J = j_param;
        node_level.step = StepSchedule::constant(0.1);
        node_level.t_max = 300;
        node_level.seed = seed;
        node_level.attack = AttackPlan::dynamic_random(0, AttackStrategy::random_value(30.0), seed);
        node_level.byzantine_nodes = {byz};
        Trajectory a = run_resist(node_level, objectives);

        RunConfig mapped(g);
        mapped.b = b;
        mapped.J = j_param;
        mapped.step = StepSchedule::constant(0.1);
        mapped.t_max = 300;
        mapped.seed = seed;
        mapped.attack = map_byzantine({byz}, g, b, AttackStrategy::random_value(30.0), seed);
        Trajectory bt = run_resist(mapped, objectives);

        for (std::size_t s = 0; s < a.s_snapshots.size(); ++s)
            for (int i = 0; i < m; ++i) {
                if (i == byz) continue;
                for (int k = 0; k < 2; ++k)
                    worst = std::max(worst, std::abs(a.s_snapshots[s](i, k) - bt.s_snapshots[s](i, k)));
            }
    }
    c.require(worst <= 1e-12, "regular-node trajectory deviation " + num(worst));
    c.note("max regular-node deviation " + num(worst));
    return c;
}

// Criterion 8: identical gradient-dominated locals: the function gap decays
// geometrically below 1e-6, at least as fast as the grid-certified rate.
Criterion c8_pl_rate() {
    Criterion c;
    const int m = 5, b = 1, j_param = 6, s_steps = 220;
    const double h = 0.2;
    LocalObjective pl = make_pl_sine();
    const double mu_hat = pl_constant_grid_estimate(pl, -2.0, 2.0, 81, 0.0);
    const double lip_hat = lipschitz_grid_estimate(pl, -2.0, 2.0, 81);

    DirectedGraph g = complete_graph(m);
    RunConfig config(g);
    config.b = b;
    config.J = j_param;
    config.step = StepSchedule::constant(h);
    config.t_max = s_steps * j_param;
    config.seed = 5;
    config.record_mixing = true;
    config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(10.0), 5);

    std::vector<LocalObjective> objectives(static_cast<std::size_t>(m), pl);
    Trajectory traj = run_resist(config, objectives);
    MetricsOptions options;
    options.fstar = 0.0;
    options.wstar = std::vector<double>{0.0, 0.0};  // a point of the critical set
    MetricsLog log = compute_metrics(traj, objectives, options);

    double min_gap = 1e300;
    std::vector<double> series;
    for (const auto& row : log.rows) {
        min_gap = std::min(min_gap, row.fgap);
        if (row.s >= 5 && row.fgap > 1e-12 && row.chat_converged && series.size() < 150)
            series.push_back(row.fgap);
    }
    RateFit fit = fit_geometric_rate(series, 0);
    const double rho = 1.0 - mu_hat * h * (2.0 - lip_hat * h);
    c.require(rho > 0.0 && rho < 1.0, "certified contraction out of range: " + num(rho));
    const double bound = std::log(rho) + 0.25 * std::abs(std::log(rho));
    c.require(min_gap < 1e-6, "min function gap " + num(min_gap));
    c.require(fit.slope <= bound, "slope " + num(fit.slope) + " vs bound " + num(bound));
    c.note("min gap " + num(min_gap) + ", slope " + num(fit.slope) + ", bound " + num(bound) +
           " (mu_hat " + num(mu_hat) + ", L_hat " + num(lip_hat) + ")");
    return c;
}

// Criterion 9: the two-valley sum with diminishing steps h(s) = p/(s+1)^0.6:
// min-so-far squared gradient norm falls by half from S=100 to S=400 and its
// log-log decay exponent is within 50% of -(1/2 - eps). The fixture pins a
// run in the multi-valley contention regime, where the sublinear envelope is
// the binding description of the descent; clean single-valley runs decay
// faster than the guarantee.
Criterion c9_nonconvex_rate() {
    Criterion c;
    const int m = 10, b = 1, j_param = 3, s_steps = 400;
    const double eps = 0.1;
    LocalObjective sum = make_pl_sum_counterexample();
    const double lip_hat = lipschitz_grid_estimate(sum, -2.0, 6.0, 81);
    const double p = 1.0 / (2.0 * lip_hat);

    DirectedGraph g = complete_graph(m);
    RunConfig config(g);
    config.b = b;
    config.J = j_param;
    config.step = StepSchedule::diminishing(p, 0.5 + eps);
    config.t_max = (s_steps + 20) * j_param;
    config.seed = 15;
    config.init_radius = 4.0;
    config.record_mixing = true;
    config.attack = AttackPlan::dynamic_random(1, AttackStrategy::random_value(5.0), 15);

    std::vector<LocalObjective> objectives(static_cast<std::size_t>(m), sum);
    Trajectory traj = run_resist(config, objectives);
    MetricsOptions options;
    options.fstar = 0.0;
    options.wstar = std::vector<double>{1.5, 0.333};
    MetricsLog log = compute_metrics(traj, objectives, options);

    const std::vector<double> mins = log.series_min_gradnorm2();
    c.require(mins.size() > 400, "run too short");
    const double at_100 = mins[100], at_400 = mins[400];
    c.require(at_400 <= 0.5 * at_100,
              "min grad norm^2: S=400 " + num(at_400) + " vs S=100 " + num(at_100));

    std::vector<double> series(mins.begin(), mins.begin() + 401);
    RateFit fit = fit_loglog_rate(series, 20);
    const double expect = -(0.5 - eps);
    c.require(std::abs(fit.slope - expect) <= 0.5 * std::abs(expect),
              "log-log slope " + num(fit.slope) + " vs -(1/2 - eps) = " + num(expect));
    c.note("S=100 " + num(at_100) + ", S=400 " + num(at_400) + ", log-log slope " +
           num(fit.slope) + " (target " + num(expect) + ", p " + num(p) + ")");
    return c;
}

// Criterion 10: the search oracle certifies a near-stationary point of the
// two-valley sum with a macroscopic gap, falsifying gradient domination.
Criterion c10_pl_counterexample() {
    Criterion c;
    LocalObjective sum = make_pl_sum_counterexample();
    NearStationaryPoint found = find_near_stationary_gap(sum, -2.0, 6.0, 161);
    c.require(!found.point.empty(), "no candidate found");
    if (found.point.empty()) return c;
    c.require(found.grad_norm < 1e-3, "grad norm " + num(found.grad_norm));
    c.require(found.gap > 0.05, "gap " + num(found.gap));
    // For any mu >= 1e-4 the inequality gap <= ||grad||^2 / (2 mu) fails.
    const double implied_mu = 0.5 * found.grad_norm * found.grad_norm / found.gap;
    c.require(implied_mu < 1e-4, "implied mu " + num(implied_mu));
    c.note("point (" + num(found.point[0]) + ", " + num(found.point[1]) + "), grad " +
           num(found.grad_norm) + ", gap " + num(found.gap) + ", implied mu " + num(implied_mu));
    return c;
}

// Criterion 11: heterogeneous logistic data: the asymptotic xi6 floor scales
// like 1/sqrt(N); quadrupling N gives a mean ratio in [1.4, 2.8] (ideal 2).
// Stochastic by nature; a soft criterion run over 10 seeds.
Criterion c11_sample_scaling() {
    Criterion c;
    const int m = 8, b = 1, j_param = 11, s_steps = 200, feature_dim = 8;
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        double tails[2];
        const int per_node[2] = {30, 120};
        for (int variant = 0; variant < 2; ++variant) {
            DirectedGraph g = complete_graph(m);
            Dataset data = make_blobs(
                2, feature_dim, per_node[variant] * m / 2, 0.8, 0.8,
                Rng::keyed(seed, {label_key("data"), static_cast<std::uint64_t>(per_node[variant])})
                    .next_u64());
            PartitionedDataset parts = partition_data(data, m, PartitionMode::iid,
                                                      Rng::keyed(seed, {label_key("partition")}).next_u64());
            std::vector<LocalObjective> objectives;
            for (const Dataset& node_data : parts.nodes)
                objectives.push_back(make_logistic_l2(node_data, 0.3));

            RunConfig config(g);
            config.b = b;
            config.J = j_param;
            config.step = StepSchedule::constant(0.25);
            config.t_max = s_steps * j_param;
            config.seed = seed;
            config.record_mixing = true;
            config.attack = AttackPlan::dynamic_random(2, AttackStrategy::random_value(5.0), seed);
            Trajectory traj = run_resist(config, objectives);
            MetricsLog log = compute_metrics(traj, objectives);
            std::vector<double> xi6;
            for (const auto& row : log.rows)
                if (row.chat_converged) xi6.push_back(row.xi6);
            tails[variant] = tail_mean(xi6, 40);
        }
        ratio_sum += tails[0] / tails[1];
    }
    const double mean_ratio = ratio_sum / 10.0;
    c.require(mean_ratio >= 1.4 && mean_ratio <= 2.8, "mean N vs 4N ratio " + num(mean_ratio));
    c.note("mean N vs 4N xi6 ratio " + num(mean_ratio));
    return c;
}

// Criterion 12: repeating any run with the same seed produces byte-identical
// CSV output.
Criterion c12_determinism() {
    Criterion c;
    RawConfig raw = parse_config(R"(suite = determinism
seeds = 3,4

[run quick]
graph = erdos_renyi
M = 6
rho = 0.7
b = 1
attack = dynamic_random
B = 1
strategy = random_value
attack_range = 20
screening = cwtm
J = 4
step = constant
h = 0.1
T_max = 120
objective = quadratic
d = 2
targets = spread
target_spread = 1
)");
    SuiteSpec suite = validate_config(raw);
    const std::filesystem::path base = std::filesystem::temp_directory_path() / "resist_determinism";
    std::filesystem::remove_all(base);
    SuiteResult first = run_suite(suite, (base / "a").string());
    SuiteResult second = run_suite(suite, (base / "b").string());
    c.require(first.status == kSuiteOk && second.status == kSuiteOk, "suite run failed");
    c.require(first.csv_files.size() == second.csv_files.size(), "file count mismatch");
    for (std::size_t i = 0; i < first.csv_files.size() && c.pass; ++i) {
        std::ifstream fa(first.csv_files[i], std::ios::binary);
        std::ifstream fb(second.csv_files[i], std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        c.require(sa.str() == sb.str() && !sa.str().empty(),
                  "CSV differs: " + first.csv_files[i]);
    }
    std::filesystem::remove_all(base);
    c.note(std::to_string(first.csv_files.size()) + " CSV files byte-identical");
    return c;
}

}  // namespace

int run_acceptance_battery(std::ostream& out) {
    struct Entry {
        const char* name;
        std::function<Criterion()> run;
    };
    const std::vector<Entry> entries{
        {"mixing-matrix equivalence over random rounds", c1_mixing_equivalence},
        {"five-node hand-evaluated mixing rows", c2_reference_fixture},
        {"geometric mixing of attacked consensus", c3_geometric_mixing},
        {"exact geometric convergence with identical locals", c4_exact_convergence},
        {"O(h) consensus ball under step halving", c5_consensus_ball},
        {"screened vs unscreened run under a persistent attack", c6_resist_vs_dgd},
        {"byzantine-to-link-attack mapping equivalence", c7_byzantine_mapping},
        {"gradient-dominated function-gap decay", c8_pl_rate},
        {"nonconvex diminishing-step rate", c9_nonconvex_rate},
        {"near-stationary gap certificate", c10_pl_counterexample},
        {"sample-size scaling of the xi6 floor", c11_sample_scaling},
        {"byte-identical reruns", c12_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Criterion result;
        try {
            result = entries[i].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[512];
        std::snprintf(line, sizeof(line), "[%2zu] %s  %s (%.1fs) %s", i + 1,
                      result.pass ? "PASS" : "FAIL", entries[i].name, secs,
                      result.detail.c_str());
        out << line << "\n";
        if (!result.pass) ++failures;
    }
    out << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
        << "\n";
    return failures;
}

}  // namespace resist
