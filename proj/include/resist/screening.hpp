#ifndef RESIST_SCREENING_HPP
#define RESIST_SCREENING_HPP

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "resist/graph.hpp"
#include "resist/matrix.hpp"

namespace resist {

// Tie-breaking for the lower/upper trim sets. The deterministic default
// orders ties by smallest node id; the seeded mode breaks ties by a keyed
// hash of the node id instead, for runs that want randomized selection.
struct TieBreak {
    enum class Kind { smallest_id, seeded };
    Kind kind = Kind::smallest_id;
    std::uint64_t seed = 0;

    static TieBreak smallest_id() { return TieBreak{}; }
    static TieBreak seeded(std::uint64_t seed) { return TieBreak{Kind::seeded, seed}; }
};

// Per-coordinate trim partition of a neighborhood: the b smallest senders,
// the b largest, and the surviving center.
struct TrimSets {
    std::set<int> lower;
    std::set<int> upper;
    std::set<int> center;
};

// One row of the mixing matrix reconstructed by the analysis oracle, with
// the diagnostics the reconstruction is built from.
struct MixingRow {
    int node = 0;
    int coordinate = 0;
    std::vector<double> weights;       // length M, sums to 1
    int q = 0;                         // b - b_star + b_k
    int b_star = 0;                    // compromised in-links this round
    int b_k = 0;                       // compromised links surviving into the center
    std::vector<int> upper_anchors;    // honest upper-set routing nodes, q of them
    std::vector<int> lower_anchors;    // honest lower-set routing nodes, q of them
    std::vector<std::pair<int, double>> thetas;  // center member -> coefficient on pair 0
};

// Trim partition of `received` (pairs of sender id and scalar value) with
// trim width b. Self is never trimmed and is not part of the partition.
TrimSets trim_sets(const std::vector<std::pair<int, double>>& received, int b,
                   const TieBreak& tie_break = TieBreak::smallest_id());

// Coordinate-wise trimmed mean: per coordinate, drop the b largest and b
// smallest received values and average the survivors together with self.
std::vector<double> cwtm(const std::vector<double>& self_value,
                         const std::vector<std::pair<int, std::vector<double>>>& received, int b,
                         const TieBreak& tie_break = TieBreak::smallest_id());

// Coordinate-wise median of received plus self; even counts average the two
// middle values.
std::vector<double> coordinate_median(const std::vector<double>& self_value,
                                      const std::vector<std::pair<int, std::vector<double>>>& received);

std::vector<double> krum(const std::vector<double>& self_value,
                         const std::vector<std::pair<int, std::vector<double>>>& received, int b);

std::vector<double> bulyan(const std::vector<double>& self_value,
                           const std::vector<std::pair<int, std::vector<double>>>& received, int b);

// Simulator-side oracle: rebuilds the row-stochastic weights that express
// node j's trimmed-mean update in terms of uncompromised senders only.
// `received` holds the values as received (corrupted links included);
// `compromised_in` flags the senders whose link to j is under attack.
MixingRow build_mixing_row_oracle(int node_count, int node, int coordinate, double self_value,
                                  const std::vector<std::pair<int, double>>& received,
                                  const std::set<int>& compromised_in, int b,
                                  const TieBreak& tie_break = TieBreak::smallest_id());

// Stacks the row oracle over all nodes for one coordinate.
// `true_values[i]` is the actual state of node i; `corrupted` maps each
// compromised link (i, j) to the value j received on it.
Matrix build_mixing_matrix(const DirectedGraph& g, const std::vector<double>& true_values,
                           const std::map<Edge, double>& corrupted, int b, int coordinate = 0,
                           const TieBreak& tie_break = TieBreak::smallest_id(),
                           std::vector<MixingRow>* rows_out = nullptr);

}  // namespace resist

#endif
