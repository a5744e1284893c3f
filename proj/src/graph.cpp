#include "resist/graph.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "resist/rng.hpp"

namespace resist {

DirectedGraph::DirectedGraph(int node_count) : m_(node_count), in_(node_count) {
    if (node_count < 2) throw std::invalid_argument("graph needs at least 2 nodes");
}

void DirectedGraph::check_node(int v) const {
    if (v < 0 || v >= m_) throw std::invalid_argument("node index out of range");
}

void DirectedGraph::add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw std::invalid_argument("self loops are not allowed");
    auto& nbrs = in_[to];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), from);
    if (it == nbrs.end() || *it != from) nbrs.insert(it, from);
}

bool DirectedGraph::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    const auto& nbrs = in_[to];
    return std::binary_search(nbrs.begin(), nbrs.end(), from);
}

std::vector<int> DirectedGraph::out_neighbors(int node) const {
    check_node(node);
    std::vector<int> out;
    for (int j = 0; j < m_; ++j)
        if (j != node && has_edge(node, j)) out.push_back(j);
    return out;
}

std::vector<Edge> DirectedGraph::edges() const {
    std::vector<Edge> es;
    for (int j = 0; j < m_; ++j)
        for (int i : in_[j]) es.emplace_back(i, j);
    std::sort(es.begin(), es.end());
    return es;
}

int DirectedGraph::edge_count() const {
    int n = 0;
    for (const auto& nbrs : in_) n += static_cast<int>(nbrs.size());
    return n;
}

std::vector<int> FilteredGraph::in_neighbors(int node) const {
    std::vector<int> kept;
    auto it = removed.find(node);
    for (int i : base->in_neighbors(node)) {
        if (it == removed.end() || it->second.count(i) == 0) kept.push_back(i);
    }
    return kept;
}

DirectedGraph generate_erdos_renyi(int node_count, double rho, std::uint64_t seed) {
    if (node_count < 2) throw std::invalid_argument("node_count must be >= 2");
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [0, 1]");
    DirectedGraph g(node_count);
    Rng rng = Rng::keyed(seed, {label_key("erdos-renyi")});
    for (int i = 0; i < node_count; ++i) {
        for (int j = i + 1; j < node_count; ++j) {
            // Bidirectional links per pair, as in the experimental protocol.
            if (rng.next_unit() < rho) {
                g.add_edge(i, j);
                g.add_edge(j, i);
            }
        }
    }
    return g;
}

DirectedGraph complete_graph(int node_count) {
    DirectedGraph g(node_count);
    for (int i = 0; i < node_count; ++i)
        for (int j = 0; j < node_count; ++j)
            if (i != j) g.add_edge(i, j);
    return g;
}

int min_in_degree(const DirectedGraph& g) {
    int md = std::numeric_limits<int>::max();
    for (int j = 0; j < g.node_count(); ++j) md = std::min(md, g.in_degree(j));
    return md;
}

namespace {

// Generic over "adjacency provider" so the same search serves DirectedGraph
// and FilteredGraph.
template <class InNbrs>
std::set<int> source_component_impl(int m, InNbrs in_neighbors_of) {
    // Out-adjacency from in-lists.
    std::vector<std::vector<int>> out(m);
    for (int j = 0; j < m; ++j)
        for (int i : in_neighbors_of(j)) out[i].push_back(j);

    // Tarjan SCC, iterative.
    std::vector<int> index(m, -1), low(m, 0), comp(m, -1);
    std::vector<bool> on_stack(m, false);
    std::vector<int> stack;
    int next_index = 0, comp_count = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < m; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < out[f.v].size()) {
                int w = out[f.v][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == f.v) break;
                    }
                    ++comp_count;
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }

    // Source SCCs: components with no incoming edge from another component.
    std::vector<bool> has_incoming(comp_count, false);
    for (int v = 0; v < m; ++v)
        for (int w : out[v])
            if (comp[v] != comp[w]) has_incoming[comp[w]] = true;

    int source = -1, n_sources = 0;
    for (int c = 0; c < comp_count; ++c) {
        if (!has_incoming[c]) {
            ++n_sources;
            source = c;
        }
    }
    std::set<int> result;
    if (n_sources == 1) {
        // In a condensation DAG with a unique source, every node is reachable
        // from it, so its members are exactly the source nodes.
        for (int v = 0; v < m; ++v)
            if (comp[v] == source) result.insert(v);
    }
    return result;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, bool& saturated) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > std::numeric_limits<std::uint64_t>::max()) {
        saturated = true;
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(p);
}

std::uint64_t binomial_saturating(int n, int k, bool& saturated) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i);
        r /= static_cast<unsigned>(i);
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            saturated = true;
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(r);
}

// Advance an odometer of per-node 2b-subsets (each digit is a combination in
// lexicographic order). Returns false once all combinations are exhausted.
bool next_combination(std::vector<int>& c, int n) {
    int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - (k - i)) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

bool filtered_graph_passes(const FilteredGraph& fg) {
    auto sc = source_component_impl(fg.base->node_count(),
                                    [&](int j) { return fg.in_neighbors(j); });
    return sc.size() > 1;
}

}  // namespace

std::set<int> source_component(const DirectedGraph& g) {
    return source_component_impl(g.node_count(), [&](int j) { return g.in_neighbors(j); });
}

std::set<int> source_component(const FilteredGraph& g) {
    return source_component_impl(g.base->node_count(), [&](int j) { return g.in_neighbors(j); });
}

std::uint64_t count_tau(const DirectedGraph& g, int b, bool* saturated_out) {
    if (b < 0) throw std::invalid_argument("b must be >= 0");
    bool saturated = false;
    std::uint64_t tau = 1;
    for (int j = 0; j < g.node_count(); ++j) {
        int deg = g.in_degree(j);
        if (deg < 2 * b)
            throw std::invalid_argument("count_tau: node with in-degree below 2b");
        tau = saturating_mul(tau, binomial_saturating(deg, 2 * b, saturated), saturated);
    }
    if (saturated_out) *saturated_out = saturated;
    return saturated ? std::numeric_limits<std::uint64_t>::max() : tau;
}

ConnectivityReport verify_sufficient_connectivity(const DirectedGraph& g, int b,
                                                  ConnectivityMode mode,
                                                  std::uint64_t budget,
                                                  std::uint64_t seed) {
    const int m = g.node_count();
    for (int j = 0; j < m; ++j) {
        if (g.in_degree(j) < 2 * b)
            throw std::invalid_argument("verify_sufficient_connectivity: in-degree below 2b");
    }

    ConnectivityReport report;
    report.mode = mode;
    report.tau = count_tau(g, b, &report.tau_saturated);
    report.all_pass = true;

    if (b == 0) {
        // The only filtered graph is the base graph itself.
        FilteredGraph fg{&g, 0, {}};
        report.checked_count = 1;
        if (!filtered_graph_passes(fg)) {
            report.all_pass = false;
            report.counterexample = fg;
        }
        return report;
    }

    if (mode == ConnectivityMode::exhaustive) {
        if (report.tau_saturated || report.tau > budget)
            throw std::runtime_error("budget exceeded: tau filtered graphs exceed the exhaustive budget; use sampled mode");
        // Odometer over per-node combinations of removed in-edges.
        std::vector<std::vector<int>> combos(m);
        for (int j = 0; j < m; ++j) {
            combos[j].resize(2 * b);
            for (int i = 0; i < 2 * b; ++i) combos[j][i] = i;
        }
        while (true) {
            FilteredGraph fg{&g, b, {}};
            for (int j = 0; j < m; ++j) {
                const auto& nbrs = g.in_neighbors(j);
                std::set<int>& rem = fg.removed[j];
                for (int idx : combos[j]) rem.insert(nbrs[idx]);
            }
            ++report.checked_count;
            if (!filtered_graph_passes(fg)) {
                report.all_pass = false;
                report.counterexample = fg;
                return report;
            }
            // Advance odometer.
            int j = m - 1;
            while (j >= 0 && !next_combination(combos[j], g.in_degree(j))) {
                combos[j].resize(2 * b);
                for (int i = 0; i < 2 * b; ++i) combos[j][i] = i;
                --j;
            }
            if (j < 0) break;
        }
        return report;
    }

    // Sampled mode: each draw removes a uniform 2b-subset at every node.
    Rng rng = Rng::keyed(seed, {label_key("connectivity-sample")});
    for (std::uint64_t draw = 0; draw < budget; ++draw) {
        FilteredGraph fg{&g, b, {}};
        for (int j = 0; j < m; ++j) {
            const auto& nbrs = g.in_neighbors(j);
            std::vector<int> pool(nbrs);
            std::set<int>& rem = fg.removed[j];
            for (int pick = 0; pick < 2 * b; ++pick) {
                std::size_t idx = static_cast<std::size_t>(rng.next_below(pool.size()));
                rem.insert(pool[idx]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
            }
        }
        ++report.checked_count;
        if (!filtered_graph_passes(fg)) {
            report.all_pass = false;
            report.counterexample = fg;
            return report;
        }
    }
    return report;
}

std::string to_edge_list(const DirectedGraph& g) {
    std::ostringstream out;
    out << g.node_count() << "\n";
    for (const auto& [i, j] : g.edges()) out << i << " " << j << "\n";
    return out.str();
}

DirectedGraph from_edge_list(std::istream& in) {
    int m = 0;
    if (!(in >> m)) throw std::runtime_error("edge list: missing node count");
    DirectedGraph g(m);
    int i, j;
    while (in >> i >> j) g.add_edge(i, j);
    return g;
}

DirectedGraph from_edge_list_string(const std::string& text) {
    std::istringstream in(text);
    return from_edge_list(in);
}

}  // namespace resist
