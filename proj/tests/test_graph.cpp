#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "resist/graph.hpp"
#include "resist/rng.hpp"

using namespace resist;

namespace {

// Test-only brute-force count of filtered graphs: enumerate every removal
// combination instead of using the product formula.
std::uint64_t enumerate_tau(const DirectedGraph& g, int b) {
    std::uint64_t total = 1;
    for (int j = 0; j < g.node_count(); ++j) {
        const int deg = g.in_degree(j);
        // Count 2b-subsets by recursive enumeration.
        std::uint64_t count = 0;
        std::vector<int> pick;
        std::function<void(int)> rec = [&](int start) {
            if (static_cast<int>(pick.size()) == 2 * b) {
                ++count;
                return;
            }
            for (int i = start; i < deg; ++i) {
                pick.push_back(i);
                rec(i + 1);
                pick.pop_back();
            }
        };
        rec(0);
        total *= count;
    }
    return total;
}

DirectedGraph relabel(const DirectedGraph& g, const std::vector<int>& perm) {
    DirectedGraph out(g.node_count());
    for (const auto& [i, j] : g.edges()) out.add_edge(perm[i], perm[j]);
    return out;
}

}  // namespace

TEST_CASE("erdos-renyi extremes") {
    DirectedGraph full = generate_erdos_renyi(4, 1.0, 5);
    CHECK(full.edge_count() == 12);
    DirectedGraph empty = generate_erdos_renyi(4, 0.0, 5);
    CHECK(empty.edge_count() == 0);
    CHECK_THROWS_AS(generate_erdos_renyi(1, 0.5, 5), std::invalid_argument);
}

TEST_CASE("erdos-renyi pair count within 4 sigma of the binomial mean") {
    DirectedGraph g = generate_erdos_renyi(50, 0.5, 7);
    const double pairs = g.edge_count() / 2.0;
    const double mean = 0.5 * (50 * 49 / 2);
    const double sigma = std::sqrt((50 * 49 / 2) * 0.25);
    CHECK(pairs > mean - 4 * sigma);
    CHECK(pairs < mean + 4 * sigma);
}

TEST_CASE("same seed, same graph") {
    DirectedGraph a = generate_erdos_renyi(20, 0.3, 99);
    DirectedGraph b = generate_erdos_renyi(20, 0.3, 99);
    CHECK(a.edges() == b.edges());
    DirectedGraph c = generate_erdos_renyi(20, 0.3, 100);
    CHECK(a.edges() != c.edges());
}

TEST_CASE("min in-degree") {
    CHECK(min_in_degree(complete_graph(5)) == 4);
    DirectedGraph empty(3);
    CHECK(min_in_degree(empty) == 0);
    // Star with four leaves each sending to the center: leaves have no
    // in-neighbors.
    DirectedGraph star(5);
    for (int leaf = 1; leaf < 5; ++leaf) star.add_edge(leaf, 0);
    CHECK(min_in_degree(star) == 0);
}

TEST_CASE("source component") {
    auto all = source_component(complete_graph(4));
    CHECK(all.size() == 4);

    DirectedGraph chain(3);
    chain.add_edge(0, 1);
    chain.add_edge(1, 2);
    CHECK(source_component(chain) == std::set<int>{0});

    DirectedGraph disconnected(2);
    CHECK(source_component(disconnected).empty());
}

TEST_CASE("source component is equivariant under relabeling") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        DirectedGraph g = generate_erdos_renyi(7, 0.35, 1000 + trial);
        std::vector<int> perm{0, 1, 2, 3, 4, 5, 6};
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.next_below(i))]);
        std::set<int> mapped;
        for (int v : source_component(g)) mapped.insert(perm[v]);
        CHECK(mapped == source_component(relabel(g, perm)));
    }
}

TEST_CASE("count_tau matches brute-force enumeration and hand values") {
    CHECK(count_tau(complete_graph(5), 1) == 7776);
    CHECK(count_tau(complete_graph(3), 1) == 1);
    CHECK(count_tau(complete_graph(6), 0) == 1);
    for (int trial = 0; trial < 10; ++trial) {
        DirectedGraph g = generate_erdos_renyi(5, 0.9, 300 + trial);
        if (min_in_degree(g) < 2) continue;
        CHECK(count_tau(g, 1) == enumerate_tau(g, 1));
    }
    DirectedGraph cycle(3);
    cycle.add_edge(0, 1);
    cycle.add_edge(1, 2);
    cycle.add_edge(2, 0);
    CHECK_THROWS_AS(count_tau(cycle, 1), std::invalid_argument);
}

TEST_CASE("connectivity verification on the complete five-node graph") {
    ConnectivityReport report = verify_sufficient_connectivity(
        complete_graph(5), 1, ConnectivityMode::exhaustive, 10000, 1);
    CHECK(report.all_pass);
    CHECK(report.checked_count == 7776);
    CHECK(report.tau == 7776);
    CHECK_FALSE(report.counterexample.has_value());
}

TEST_CASE("exhaustive verification over budget is rejected") {
    CHECK_THROWS_WITH_AS(
        (void)verify_sufficient_connectivity(complete_graph(5), 1, ConnectivityMode::exhaustive,
                                             100, 1),
        doctest::Contains("budget exceeded"), std::runtime_error);
}

TEST_CASE("sampled verification finds a failing topology") {
    // Two triangles joined by a single bidirectional bridge: removing the
    // bridge plus one more in-edge per endpoint disconnects information
    // flow, so some filtered graph has no source component.
    DirectedGraph g(6);
    for (int base : {0, 3})
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) g.add_edge(base + i, base + j);
    g.add_edge(0, 3);
    g.add_edge(3, 0);
    ConnectivityReport report =
        verify_sufficient_connectivity(g, 1, ConnectivityMode::sampled, 500, 3);
    CHECK_FALSE(report.all_pass);
    REQUIRE(report.counterexample.has_value());
    // The counterexample is a genuine witness: no multi-node source component.
    const FilteredGraph& fg = *report.counterexample;
    CHECK(source_component(fg).size() <= 1);
    for (const auto& [node, removed] : fg.removed) {
        CHECK(removed.size() == 2);
        for (int r : removed) CHECK(g.has_edge(r, node));
    }
}

TEST_CASE("degree precondition is enforced") {
    DirectedGraph cycle(3);
    cycle.add_edge(0, 1);
    cycle.add_edge(1, 2);
    cycle.add_edge(2, 0);
    CHECK_THROWS_AS((void)verify_sufficient_connectivity(cycle, 1, ConnectivityMode::sampled, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("edge list round trip") {
    DirectedGraph g = generate_erdos_renyi(8, 0.4, 11);
    DirectedGraph back = from_edge_list_string(to_edge_list(g));
    CHECK(back.node_count() == g.node_count());
    CHECK(back.edges() == g.edges());
}

TEST_CASE("self loops are rejected") {
    DirectedGraph g(3);
    CHECK_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
}
