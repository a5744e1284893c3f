#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include "resist/attack.hpp"
#include "resist/graph.hpp"

using namespace resist;

TEST_CASE("no links when nothing is attacked") {
    DirectedGraph g = complete_graph(5);
    AttackPlan plan = AttackPlan::dynamic_random(0, AttackStrategy::random_value(10.0), 1);
    CHECK(select_links(plan, g, 1, 0).links.empty());
    CHECK(select_links(AttackPlan::none(), g, 1, 3).links.empty());
}

TEST_CASE("dynamic selection respects the per-neighborhood cap") {
    DirectedGraph g = complete_graph(5);
    AttackPlan plan = AttackPlan::dynamic_random(2, AttackStrategy::random_value(10.0), 7);
    for (int t = 0; t < 50; ++t) {
        CompromisedLinkSet links = select_links(plan, g, 1, t);
        CHECK(links.links.size() == 2);
        CHECK(links.max_incoming() <= 1);
        for (const auto& [i, j] : links.links) CHECK(g.has_edge(i, j));
    }
}

TEST_CASE("dynamic selection moves across rounds but replays identically") {
    DirectedGraph g = complete_graph(6);
    AttackPlan plan = AttackPlan::dynamic_random(3, AttackStrategy::sign_flip(), 21);
    CompromisedLinkSet t0 = select_links(plan, g, 2, 0);
    CompromisedLinkSet t1 = select_links(plan, g, 2, 1);
    CHECK(t0.links != t1.links);
    CHECK(select_links(plan, g, 2, 0).links == t0.links);
}

TEST_CASE("static plans are validated against the cap at construction") {
    DirectedGraph g = complete_graph(5);
    CHECK_THROWS_AS(AttackPlan::static_plan({{0, 2}, {1, 2}}, AttackStrategy::sign_flip(), g, 1),
                    std::invalid_argument);
    AttackPlan ok = AttackPlan::static_plan({{0, 2}, {1, 3}}, AttackStrategy::sign_flip(), g, 1);
    CHECK(select_links(ok, g, 1, 9).links.size() == 2);
}

TEST_CASE("corruption strategies") {
    Rng rng = corruption_stream(5, 0, 1, 2);
    const std::vector<double> message{1.0, -2.0, 0.5};

    SUBCASE("sign flip negates") {
        CHECK(corrupt(message, AttackStrategy::sign_flip(), rng) ==
              std::vector<double>{-1.0, 2.0, -0.5});
    }
    SUBCASE("none passes through") {
        CHECK(corrupt(message, AttackStrategy::none(), rng) == message);
    }
    SUBCASE("constant replaces") {
        auto c = AttackStrategy::constant_vector({9.0, 9.0, 9.0});
        CHECK(corrupt(message, c, rng) == std::vector<double>{9.0, 9.0, 9.0});
    }
    SUBCASE("random values stay in range and replay bit for bit") {
        auto strategy = AttackStrategy::random_value(3.0);
        Rng s1 = corruption_stream(5, 7, 1, 2);
        std::vector<double> out = corrupt(message, strategy, s1);
        for (double v : out) {
            CHECK(v >= -3.0);
            CHECK(v <= 3.0);
        }
        Rng s2 = corruption_stream(5, 7, 1, 2);
        CHECK(corrupt(message, strategy, s2) == out);
    }
}

TEST_CASE("non-finite strategy parameters are rejected") {
    CHECK_THROWS_AS(AttackStrategy::random_value(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(AttackStrategy::constant_vector({std::nan("")}), std::invalid_argument);
}

TEST_CASE("byzantine mapping attacks exactly the outgoing edges") {
    DirectedGraph g = complete_graph(5);
    AttackPlan plan = map_byzantine({2}, g, 1, AttackStrategy::random_value(5.0));
    CHECK(plan.static_set.size() == 4);
    for (const auto& [i, j] : plan.static_set) {
        CHECK(i == 2);
        CHECK(j != 2);
    }
    AttackPlan empty = map_byzantine({}, g, 1, AttackStrategy::random_value(5.0));
    CHECK(empty.static_set.empty());
}

TEST_CASE("byzantine mapping rejects cap violations") {
    // Nodes 0 and 1 both feed node 2; two byzantine sources exceed b = 1.
    DirectedGraph g(4);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(3, 2);
    CHECK_THROWS_AS(map_byzantine({0, 1}, g, 1, AttackStrategy::sign_flip()),
                    std::invalid_argument);
}

TEST_CASE("compromised and honest in-neighborhoods partition the neighborhood") {
    DirectedGraph g = generate_erdos_renyi(8, 0.7, 3);
    AttackPlan plan = AttackPlan::dynamic_random(4, AttackStrategy::random_value(2.0), 13);
    CompromisedLinkSet links = select_links(plan, g, 2, 5);
    for (int j = 0; j < g.node_count(); ++j) {
        int compromised = 0;
        for (int i : g.in_neighbors(j))
            if (links.contains(i, j)) ++compromised;
        auto counts = links.incoming_counts();
        CHECK(compromised == (counts.count(j) ? counts[j] : 0));
    }
}
