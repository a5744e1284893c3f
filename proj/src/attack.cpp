#include "resist/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resist {

AttackStrategy AttackStrategy::none() { return AttackStrategy{}; }

AttackStrategy AttackStrategy::random_value(double range) {
    if (!std::isfinite(range) || range < 0.0)
        throw std::invalid_argument("random_value range must be finite and non-negative");
    AttackStrategy s;
    s.kind = Kind::random_value;
    s.range = range;
    return s;
}

AttackStrategy AttackStrategy::sign_flip() {
    AttackStrategy s;
    s.kind = Kind::sign_flip;
    return s;
}

AttackStrategy AttackStrategy::constant_vector(std::vector<double> c) {
    for (double v : c)
        if (!std::isfinite(v)) throw std::invalid_argument("constant attack vector must be finite");
    AttackStrategy s;
    s.kind = Kind::constant;
    s.constant = std::move(c);
    return s;
}

std::map<int, int> CompromisedLinkSet::incoming_counts() const {
    std::map<int, int> counts;
    for (const auto& [i, j] : links) {
        (void)i;
        ++counts[j];
    }
    return counts;
}

int CompromisedLinkSet::max_incoming() const {
    int mx = 0;
    for (const auto& [node, n] : incoming_counts()) {
        (void)node;
        mx = std::max(mx, n);
    }
    return mx;
}

AttackPlan AttackPlan::none() {
    AttackPlan p;
    p.policy = Policy::static_links;
    p.strategy = AttackStrategy::none();
    p.links_per_round = 0;
    return p;
}

AttackPlan AttackPlan::dynamic_random(int links_per_round, AttackStrategy strategy,
                                      std::uint64_t seed) {
    if (links_per_round < 0) throw std::invalid_argument("links_per_round must be >= 0");
    AttackPlan p;
    p.policy = Policy::dynamic_random;
    p.strategy = std::move(strategy);
    p.links_per_round = links_per_round;
    p.seed = seed;
    return p;
}

AttackPlan AttackPlan::static_plan(std::set<Edge> links, AttackStrategy strategy,
                                   const DirectedGraph& g, int b, std::uint64_t seed) {
    std::map<int, int> counts;
    for (const auto& [i, j] : links) {
        if (!g.has_edge(i, j)) throw std::invalid_argument("static attack link not in graph");
        if (++counts[j] > b)
            throw std::invalid_argument("static attack plan violates the per-neighborhood cap b");
    }
    AttackPlan p;
    p.policy = Policy::static_links;
    p.strategy = std::move(strategy);
    p.links_per_round = static_cast<int>(links.size());
    p.static_set = std::move(links);
    p.seed = seed;
    return p;
}

CompromisedLinkSet select_links(const AttackPlan& plan, const DirectedGraph& g, int b, int t) {
    if (b < 0) throw std::invalid_argument("b must be >= 0");
    CompromisedLinkSet out;
    out.round = t;

    if (plan.policy == AttackPlan::Policy::static_links) {
        out.links = plan.static_set;
        if (out.max_incoming() > b)
            throw std::invalid_argument("static attack set violates the cap b");
        return out;
    }

    if (plan.links_per_round == 0) return out;
    const auto edges = g.edges();
    if (plan.links_per_round > static_cast<int>(edges.size()))
        throw std::invalid_argument("links_per_round exceeds the number of directed edges");

    // Rejection-sample directed links until the per-node incoming cap holds.
    Rng rng = Rng::keyed(plan.seed, {label_key("attack-links"), static_cast<std::uint64_t>(t)});
    std::map<int, int> counts;
    int attempts = 0;
    const int max_attempts = 1000 * (plan.links_per_round + 1);
    while (static_cast<int>(out.links.size()) < plan.links_per_round) {
        if (++attempts > max_attempts)
            throw std::runtime_error("select_links: cannot satisfy the per-neighborhood cap");
        const Edge& e = edges[static_cast<std::size_t>(rng.next_below(edges.size()))];
        if (out.links.count(e)) continue;
        if (counts[e.second] + 1 > b) continue;
        out.links.insert(e);
        ++counts[e.second];
    }
    return out;
}

Rng corruption_stream(std::uint64_t seed, int t, int from, int to) {
    return Rng::keyed(seed, {label_key("attack-value"), static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(from), static_cast<std::uint64_t>(to)});
}

std::vector<double> corrupt(const std::vector<double>& message, const AttackStrategy& strategy,
                            Rng& rng) {
    switch (strategy.kind) {
        case AttackStrategy::Kind::none:
            return message;
        case AttackStrategy::Kind::sign_flip: {
            std::vector<double> out(message.size());
            for (std::size_t k = 0; k < message.size(); ++k) out[k] = -message[k];
            return out;
        }
        case AttackStrategy::Kind::random_value: {
            std::vector<double> out(message.size());
            for (std::size_t k = 0; k < message.size(); ++k)
                out[k] = rng.next_uniform(-strategy.range, strategy.range);
            return out;
        }
        case AttackStrategy::Kind::constant: {
            if (strategy.constant.size() != message.size())
                throw std::invalid_argument("constant attack vector dimension mismatch");
            return strategy.constant;
        }
    }
    throw std::logic_error("unknown attack strategy");
}

AttackPlan map_byzantine(const std::set<int>& byzantine_nodes, const DirectedGraph& g, int b,
                         AttackStrategy strategy, std::uint64_t seed) {
    std::set<Edge> links;
    for (int u : byzantine_nodes)
        for (int j : g.out_neighbors(u)) links.insert({u, j});
    return AttackPlan::static_plan(std::move(links), std::move(strategy), g, b, seed);
}

}  // namespace resist
