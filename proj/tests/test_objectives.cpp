#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <set>

#include "resist/matrix.hpp"
#include "resist/objectives.hpp"
#include "resist/rng.hpp"

using namespace resist;

TEST_CASE("quadratics") {
    auto objs = make_quadratic({{0.0}, {2.0}}, 0.0);
    CentralizedSolution sol = centralized_solve(objs);
    CHECK(sol.w[0] == doctest::Approx(1.0));

    // Gradient vanishes at the local target.
    CHECK(objs[0].grad({0.0})[0] == doctest::Approx(0.0));
    CHECK(objs[1].grad({2.0})[0] == doctest::Approx(0.0));

    // Identical targets: the common target is the common minimizer.
    auto same = make_quadratic({{0.5, -0.5}, {0.5, -0.5}, {0.5, -0.5}}, 0.0);
    CentralizedSolution s2 = centralized_solve(same);
    CHECK(s2.w[0] == doctest::Approx(0.5));
    CHECK(s2.w[1] == doctest::Approx(-0.5));

    // Ridge shrinks the minimizer.
    auto ridged = make_quadratic({{1.0}}, 1.0);
    CHECK(centralized_solve(ridged).w[0] == doctest::Approx(0.5));
    CHECK(ridged[0].mu == doctest::Approx(2.0));
}

TEST_CASE("quadratic gradients agree with finite differences") {
    auto objs = make_quadratic({{0.3, -0.7, 0.1}}, 0.2);
    CHECK(finite_diff_check(objs[0], {{0.1, 0.2, 0.3}, {-1.0, 0.5, 2.0}}, 1e-6) < 1e-7);
}

TEST_CASE("logistic loss") {
    Dataset d;
    d.label_count = 2;
    d.features = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.5}, {0.5, -1.0}};
    d.labels = {0, 1, 0, 1};
    LocalObjective obj = make_logistic_l2(d, 0.1);

    // At w = 0 every sample contributes ln 2.
    std::vector<double> zero(static_cast<std::size_t>(obj.dim), 0.0);
    CHECK(obj.eval(zero) == doctest::Approx(std::log(2.0)));

    Rng rng(4);
    std::vector<std::vector<double>> points;
    for (int t = 0; t < 3; ++t) {
        std::vector<double> w(static_cast<std::size_t>(obj.dim));
        for (double& v : w) v = rng.next_uniform(-1.0, 1.0);
        points.push_back(std::move(w));
    }
    CHECK(finite_diff_check(obj, points, 1e-6) < 1e-5);

    // Heavy regularization pins the minimizer near the origin.
    LocalObjective heavy = make_logistic_l2(d, 100.0);
    CentralizedSolution sol = centralized_solve({heavy});
    CHECK(norm2(sol.w) < 0.05);
    CHECK(sol.grad_norm < 1e-10);
}

TEST_CASE("strong convexity of the average holds on samples") {
    Dataset d = make_blobs(2, 3, 40, 1.0, 0.7, 5);
    PartitionedDataset parts = partition_data(d, 4, PartitionMode::iid, 6);
    std::vector<LocalObjective> objs;
    for (const auto& node : parts.nodes) objs.push_back(make_logistic_l2(node, 0.2));
    auto favg = [&](const std::vector<double>& w) {
        double s = 0.0;
        for (const auto& o : objs) s += o.eval(w);
        return s / objs.size();
    };
    auto gavg = [&](const std::vector<double>& w) {
        std::vector<double> g(w.size(), 0.0);
        for (const auto& o : objs) g = vadd(g, o.grad(w));
        return vscale(1.0 / objs.size(), g);
    };
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(objs[0].dim)), y(x.size());
        for (double& v : x) v = rng.next_uniform(-1.0, 1.0);
        for (double& v : y) v = rng.next_uniform(-1.0, 1.0);
        const double lhs = favg(y);
        const double rhs =
            favg(x) + dot(gavg(x), vsub(y, x)) + 0.5 * 0.2 * norm2(vsub(y, x)) * norm2(vsub(y, x));
        CHECK(lhs >= rhs - 1e-9);
    }
}

TEST_CASE("sine-residual function values and gradients") {
    LocalObjective f = make_pl_sine();
    CHECK(f.eval({0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(f.grad({0.0, 0.0})[0] == doctest::Approx(0.0));
    CHECK(f.grad({0.0, 0.0})[1] == doctest::Approx(0.0));
    CHECK(f.eval({0.0, 1.0}) == doctest::Approx(0.5));
    CHECK(f.grad({0.0, 1.0})[0] == doctest::Approx(-1.0));
    CHECK(f.grad({0.0, 1.0})[1] == doctest::Approx(1.0));
    CHECK(finite_diff_check(f, {{0.3, -0.4}, {1.0, 2.0}}, 1e-6) < 1e-8);

    SolveOptions opts;
    opts.start = {0.0, 0.5};
    CentralizedSolution sol = centralized_solve({f}, opts);
    CHECK(sol.value < 1e-12);
}

TEST_CASE("two-valley sum admits a certified near-stationary gap") {
    LocalObjective sum = make_pl_sum_counterexample();
    CHECK(finite_diff_check(sum, {{0.5, 0.5}, {4.0, 1.0}}, 1e-6) < 1e-8);
    NearStationaryPoint found = find_near_stationary_gap(sum, -2.0, 6.0, 121);
    REQUIRE_FALSE(found.point.empty());
    CHECK(found.grad_norm < 1e-3);
    CHECK(found.gap > 0.05);
    // The certificate falsifies gradient domination for mu >= 1e-4.
    CHECK(0.5 * found.grad_norm * found.grad_norm / found.gap < 1e-4);
    // Global minimum estimate matches the closed-form valley floor value.
    CHECK(found.global_min == doctest::Approx(0.16834).epsilon(1e-3));
}

TEST_CASE("gradient-domination grid estimate for the sine residual") {
    // ||grad f||^2 / (2 (f - 0)) = 1 + cos^2(x), floored at 1 on any box
    // containing x = pi/2.
    LocalObjective f = make_pl_sine();
    CHECK(pl_constant_grid_estimate(f, -2.0, 2.0, 81, 0.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("partitions") {
    Dataset d = make_blobs(10, 2, 50, 2.0, 0.3, 1);  // 500 samples, 10 labels

    SUBCASE("single node gets everything") {
        for (PartitionMode mode :
             {PartitionMode::iid, PartitionMode::extreme_non_iid}) {
            PartitionedDataset parts = partition_data(d, 1, mode, 3);
            CHECK(parts.nodes.size() == 1);
            CHECK(parts.nodes[0].size() == d.size());
        }
    }

    SUBCASE("extreme mode is label sorted") {
        PartitionedDataset parts = partition_data(d, 50, PartitionMode::extreme_non_iid, 3);
        // 500 / 50 = 10 samples per node; nodes 0-4 hold only label 0.
        for (int node = 0; node < 5; ++node)
            for (int y : parts.nodes[node].labels) CHECK(y == 0);
    }

    SUBCASE("moderate mode gives every node exactly two labels") {
        PartitionedDataset parts = partition_data(d, 50, PartitionMode::moderate_non_iid, 3);
        for (const auto& node : parts.nodes) {
            std::set<int> labels(node.labels.begin(), node.labels.end());
            CHECK(labels.size() == 2);
        }
    }

    SUBCASE("iid split is reproducible and preserves the multiset") {
        PartitionedDataset a = partition_data(d, 10, PartitionMode::iid, 3);
        PartitionedDataset b = partition_data(d, 10, PartitionMode::iid, 3);
        std::multiset<double> all_a, all_d;
        for (const auto& node : a.nodes)
            for (const auto& x : node.features) all_a.insert(x[0]);
        for (const auto& x : d.features) all_d.insert(x[0]);
        CHECK(all_a == all_d);
        CHECK(a.nodes[0].labels == b.nodes[0].labels);
        for (const auto& node : a.nodes) CHECK(node.size() == 50);
    }
}

TEST_CASE("label flipping at compromised-source nodes") {
    Dataset d = make_blobs(4, 2, 10, 1.0, 0.2, 2);
    PartitionedDataset parts = partition_data(d, 4, PartitionMode::iid, 5);
    std::vector<int> before = parts.nodes[1].labels;
    flip_labels(parts, {1});
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(parts.nodes[1].labels[i] == 3 - before[i]);
}

TEST_CASE("finite differences on edge cases") {
    LocalObjective zero;
    zero.dim = 2;
    zero.eval = [](const std::vector<double>&) { return 0.0; };
    zero.grad = [](const std::vector<double>& w) { return std::vector<double>(w.size(), 0.0); };
    CHECK(finite_diff_check(zero, {{1.0, 2.0}}, 1e-6) == 0.0);
    CHECK_THROWS_AS(finite_diff_check(zero, {{1.0, 2.0}}, 0.0), std::invalid_argument);
}
