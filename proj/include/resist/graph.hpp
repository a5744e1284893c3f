#ifndef RESIST_GRAPH_HPP
#define RESIST_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace resist {

using Edge = std::pair<int, int>;  // (i, j): j receives from i

// Directed graph over nodes 0..M-1. No self loops; per-node in-neighborhoods
// are kept sorted so iteration order is deterministic.
class DirectedGraph {
public:
    explicit DirectedGraph(int node_count);

    int node_count() const { return m_; }
    void add_edge(int from, int to);
    bool has_edge(int from, int to) const;
    const std::vector<int>& in_neighbors(int node) const { return in_[node]; }
    std::vector<int> out_neighbors(int node) const;
    std::vector<Edge> edges() const;  // sorted
    int edge_count() const;
    int in_degree(int node) const { return static_cast<int>(in_[node].size()); }

private:
    void check_node(int v) const;
    int m_;
    std::vector<std::vector<int>> in_;
};

// A filtered graph: the base graph with exactly 2b incoming edges removed at
// each node.
struct FilteredGraph {
    const DirectedGraph* base = nullptr;
    int b = 0;
    std::map<int, std::set<int>> removed;  // node -> removed in-neighbor sources

    // In-neighbors of `node` surviving the removal.
    std::vector<int> in_neighbors(int node) const;
};

enum class ConnectivityMode { exhaustive, sampled };

struct ConnectivityReport {
    ConnectivityMode mode = ConnectivityMode::exhaustive;
    std::uint64_t checked_count = 0;
    bool all_pass = false;
    std::optional<FilteredGraph> counterexample;
    std::uint64_t tau = 0;  // closed form, saturated at uint64 max
    bool tau_saturated = false;
};

// Both directions of each unordered pair are added independently with
// probability rho. Same seed, same graph.
DirectedGraph generate_erdos_renyi(int node_count, double rho, std::uint64_t seed);

int min_in_degree(const DirectedGraph& g);

// Nodes having directed paths to all other nodes (possibly empty). Computed
// as the unique source component of the SCC condensation, if there is one.
std::set<int> source_component(const DirectedGraph& g);
std::set<int> source_component(const FilteredGraph& g);

// Number of filtered graphs: prod_j C(|N_j|, 2b). Saturates at uint64 max.
std::uint64_t count_tau(const DirectedGraph& g, int b, bool* saturated = nullptr);

ConnectivityReport verify_sufficient_connectivity(const DirectedGraph& g, int b,
                                                  ConnectivityMode mode,
                                                  std::uint64_t budget,
                                                  std::uint64_t seed);

// Edge-list text format: first line "M", then one "i j" line per directed edge.
std::string to_edge_list(const DirectedGraph& g);
DirectedGraph from_edge_list(std::istream& in);
DirectedGraph from_edge_list_string(const std::string& text);

DirectedGraph complete_graph(int node_count);

}  // namespace resist

#endif
