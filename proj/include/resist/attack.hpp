#ifndef RESIST_ATTACK_HPP
#define RESIST_ATTACK_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "resist/graph.hpp"
#include "resist/rng.hpp"

namespace resist {

// How a message on a compromised link is altered. Corrupted outputs are
// always finite; NaN/Inf-producing configurations are rejected at
// construction so sorting inside the screening rules stays well defined.
struct AttackStrategy {
    enum class Kind { none, random_value, sign_flip, constant };
    Kind kind = Kind::none;
    double range = 0.0;               // random_value: coordinates iid uniform on [-range, range]
    std::vector<double> constant;     // constant: the vector that replaces the message

    static AttackStrategy none();
    static AttackStrategy random_value(double range);
    static AttackStrategy sign_flip();
    static AttackStrategy constant_vector(std::vector<double> c);
};

// Which links are compromised at round t.
struct CompromisedLinkSet {
    int round = 0;
    std::set<Edge> links;

    std::map<int, int> incoming_counts() const;  // node -> |N_j^b(t)|
    int max_incoming() const;
    bool contains(int from, int to) const { return links.count({from, to}) > 0; }
};

struct AttackPlan {
    enum class Policy { dynamic_random, static_links };
    Policy policy = Policy::dynamic_random;
    AttackStrategy strategy;
    int links_per_round = 0;          // B_actual, counted over directed links
    std::uint64_t seed = 0;
    std::set<Edge> static_set;        // only for static_links

    static AttackPlan none();
    static AttackPlan dynamic_random(int links_per_round, AttackStrategy strategy, std::uint64_t seed);
    // Validates the per-neighborhood cap b against the graph up front.
    static AttackPlan static_plan(std::set<Edge> links, AttackStrategy strategy,
                                  const DirectedGraph& g, int b, std::uint64_t seed = 0);
};

// Links under attack at round t. Deterministic given (plan.seed, t).
CompromisedLinkSet select_links(const AttackPlan& plan, const DirectedGraph& g, int b, int t);

// Apply the strategy to one message. The rng argument is the keyed
// (seed, t, i, j) substream owned by the caller.
std::vector<double> corrupt(const std::vector<double>& message, const AttackStrategy& strategy,
                            Rng& rng);

// Keyed substream for the corruption of link (from, to) at round t.
Rng corruption_stream(std::uint64_t seed, int t, int from, int to);

// Byzantine nodes mapped to a static MITM plan on their outgoing edges.
AttackPlan map_byzantine(const std::set<int>& byzantine_nodes, const DirectedGraph& g, int b,
                         AttackStrategy strategy, std::uint64_t seed = 0);

}  // namespace resist

#endif
