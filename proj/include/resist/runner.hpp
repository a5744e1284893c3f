#ifndef RESIST_RUNNER_HPP
#define RESIST_RUNNER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "resist/attack.hpp"
#include "resist/graph.hpp"
#include "resist/matrix.hpp"
#include "resist/objectives.hpp"
#include "resist/screening.hpp"

namespace resist {

enum class ScreeningRule { cwtm, median, krum, bulyan, dgd_average };

struct StepSchedule {
    enum class Kind { constant, diminishing, fixed_horizon };
    Kind kind = Kind::constant;
    double h = 0.1;      // constant
    double p = 0.0;      // diminishing: p / (s + 1)^omega
    double omega = 0.0;
    int horizon = 0;     // fixed_horizon: 1 / sqrt(S)

    static StepSchedule constant(double h);
    static StepSchedule diminishing(double p, double omega);
    static StepSchedule fixed_horizon(int horizon);
};

double stepsize(const StepSchedule& schedule, int s);

struct RunConfig {
    DirectedGraph graph;
    int b = 0;                      // defense cap; also the per-neighborhood attack cap
    AttackPlan attack = AttackPlan::none();
    ScreeningRule screening = ScreeningRule::cwtm;
    int J = 2;                      // gradient step every J-th round
    StepSchedule step;
    int t_max = 0;
    double init_radius = 1.0;       // w_j(0) iid uniform on [-r, r]^d
    std::uint64_t seed = 0;
    bool record_mixing = false;     // retain per-coordinate mixing matrices
    int snapshot_stride = 0;        // t-scale snapshots; 0 means J
    TieBreak tie_break = TieBreak::smallest_id();
    // Node-level fault injection: these nodes' outgoing messages are replaced
    // by the plan's strategy stream every consensus round, regardless of the
    // link plan. Used by the Byzantine-to-MITM equivalence checks.
    std::set<int> byzantine_nodes;
    // Test hook: order in which node updates are materialized within a round.
    // Results must not depend on it.
    std::vector<int> processing_order;

    explicit RunConfig(DirectedGraph g) : graph(std::move(g)) {}
};

struct ConsensusRound {
    int t = 0;
    CompromisedLinkSet links;
    // Received value per compromised link, per coordinate; kept only when
    // record_mixing is on.
    std::map<Edge, std::vector<double>> corrupted;
    std::vector<Matrix> mixing;  // per coordinate, when record_mixing is on
};

struct Trajectory {
    // s_snapshots[s] is the state entering block s: the initialization for
    // s = 0, and the state right after the s-th gradient step otherwise.
    std::vector<Matrix> s_snapshots;
    std::vector<int> s_to_t;  // round index at which gradient step s completed (s >= 1)
    std::vector<std::pair<int, Matrix>> t_snapshots;
    std::vector<ConsensusRound> rounds;
    Matrix final_state;
    int completed_s = 0;
    int j_param = 2;
};

// RESIST: J - 1 screened consensus rounds, then one local gradient step.
Trajectory run_resist(const RunConfig& config, const std::vector<LocalObjective>& objectives);

// Same schedule with unscreened uniform averaging over {j} union N_j.
Trajectory run_dgd_multistep(const RunConfig& config, const std::vector<LocalObjective>& objectives);

// Consensus-only loop (no gradient steps), for mixing experiments. Returns
// the rounds with mixing matrices recorded.
struct ConsensusOnlyResult {
    std::vector<ConsensusRound> rounds;
    Matrix final_state;
    Matrix initial_state;
};
ConsensusOnlyResult run_consensus_only(const DirectedGraph& graph, int b, const AttackPlan& plan,
                                       int rounds, int dim, double init_radius,
                                       std::uint64_t seed, bool record_mixing = true);

// Uniform initialization on [-r, r]^d from the labeled "init" substream.
Matrix initialize_state(int node_count, int dim, double radius, std::uint64_t seed);

}  // namespace resist

#endif
