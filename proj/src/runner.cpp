#include "resist/runner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resist {

StepSchedule StepSchedule::constant(double h) {
    if (h <= 0.0) throw std::invalid_argument("stepsize must be > 0");
    StepSchedule s;
    s.kind = Kind::constant;
    s.h = h;
    return s;
}

StepSchedule StepSchedule::diminishing(double p, double omega) {
    if (p <= 0.0 || omega <= 0.0) throw std::invalid_argument("diminishing schedule needs p, omega > 0");
    StepSchedule s;
    s.kind = Kind::diminishing;
    s.p = p;
    s.omega = omega;
    return s;
}

StepSchedule StepSchedule::fixed_horizon(int horizon) {
    if (horizon < 1) throw std::invalid_argument("fixed horizon must be >= 1");
    StepSchedule s;
    s.kind = Kind::fixed_horizon;
    s.horizon = horizon;
    return s;
}

double stepsize(const StepSchedule& schedule, int s) {
    if (s < 0) throw std::invalid_argument("stepsize: s must be >= 0");
    switch (schedule.kind) {
        case StepSchedule::Kind::constant:
            return schedule.h;
        case StepSchedule::Kind::diminishing:
            return schedule.p / std::pow(static_cast<double>(s + 1), schedule.omega);
        case StepSchedule::Kind::fixed_horizon:
            return 1.0 / std::sqrt(static_cast<double>(schedule.horizon));
    }
    throw std::logic_error("unknown step schedule");
}

Matrix initialize_state(int node_count, int dim, double radius, std::uint64_t seed) {
    Matrix w(node_count, dim);
    for (int j = 0; j < node_count; ++j) {
        Rng rng = Rng::keyed(seed, {label_key("init"), static_cast<std::uint64_t>(j)});
        for (int k = 0; k < dim; ++k) w(j, k) = rng.next_uniform(-radius, radius);
    }
    return w;
}

namespace {

void validate(const RunConfig& config, const std::vector<LocalObjective>& objectives,
              bool screened) {
    if (config.J <= 1) throw std::invalid_argument("J must be > 1");
    if (config.t_max < config.J) throw std::invalid_argument("T_max must be >= J");
    if (objectives.size() != static_cast<std::size_t>(config.graph.node_count()))
        throw std::invalid_argument("one local objective per node required");
    if (config.step.kind == StepSchedule::Kind::constant && config.step.h <= 0.0)
        throw std::invalid_argument("stepsize must be > 0");
    if (screened) {
        const int min_deg = min_in_degree(config.graph);
        if (min_deg < 2 * config.b + 1)
            throw std::invalid_argument("graph violates the degree requirement min |N_j| >= 2b + 1");
        if (config.screening == ScreeningRule::krum && min_deg + 1 < 2 * config.b + 3)
            throw std::invalid_argument("krum needs min |N_j| + 1 >= 2b + 3");
        if (config.screening == ScreeningRule::bulyan && min_deg + 1 < 4 * config.b + 3)
            throw std::invalid_argument("bulyan needs min |N_j| + 1 >= 4b + 3");
        if (config.record_mixing && config.screening != ScreeningRule::cwtm &&
            config.screening != ScreeningRule::dgd_average)
            throw std::invalid_argument("mixing matrices are only defined for cwtm and dgd averaging");
    }
}

// One consensus round: corrupt in-flight messages, apply the rule at every
// node. Returns the new state; fills the round record.
Matrix consensus_round(const RunConfig& config, const Matrix& w, int t, ScreeningRule rule,
                       ConsensusRound& record) {
    const DirectedGraph& g = config.graph;
    const int m = g.node_count();
    const int d = w.cols();

    record.t = t;
    record.links = select_links(config.attack, g, config.b, t);

    // Materialize every received message first; corruption streams are keyed
    // by (seed, t, i, j), so this is order independent.
    std::map<Edge, std::vector<double>> inbox;
    for (int j = 0; j < m; ++j) {
        for (int i : g.in_neighbors(j)) {
            std::vector<double> msg = w.row(i);
            const bool byzantine = config.byzantine_nodes.count(i) > 0;
            if (byzantine || record.links.contains(i, j)) {
                Rng rng = corruption_stream(config.attack.seed, t, i, j);
                msg = corrupt(msg, config.attack.strategy, rng);
                record.links.links.insert({i, j});
            }
            inbox[{i, j}] = std::move(msg);
        }
    }

    Matrix next(m, d);
    std::vector<int> order = config.processing_order;
    if (order.empty()) {
        order.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
    }
    for (int j : order) {
        std::vector<std::pair<int, std::vector<double>>> received;
        for (int i : g.in_neighbors(j)) received.emplace_back(i, inbox.at({i, j}));
        std::vector<double> self = w.row(j);
        std::vector<double> updated;
        switch (rule) {
            case ScreeningRule::cwtm:
                updated = cwtm(self, received, config.b, config.tie_break);
                break;
            case ScreeningRule::median:
                updated = coordinate_median(self, received);
                break;
            case ScreeningRule::krum:
                updated = krum(self, received, config.b);
                break;
            case ScreeningRule::bulyan:
                updated = bulyan(self, received, config.b);
                break;
            case ScreeningRule::dgd_average: {
                updated = self;
                for (const auto& [i, v] : received) {
                    (void)i;
                    for (int k = 0; k < d; ++k) updated[static_cast<std::size_t>(k)] += v[static_cast<std::size_t>(k)];
                }
                const double denom = static_cast<double>(received.size() + 1);
                for (double& v : updated) v /= denom;
                break;
            }
        }
        for (int k = 0; k < d; ++k) next(j, k) = updated[static_cast<std::size_t>(k)];
    }

    if (config.record_mixing) {
        for (const auto& [edge, msg] : inbox) {
            if (record.links.contains(edge.first, edge.second)) record.corrupted[edge] = msg;
        }
        record.mixing.reserve(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            std::map<Edge, double> corrupted_k;
            for (const auto& [edge, msg] : record.corrupted)
                corrupted_k[edge] = msg[static_cast<std::size_t>(k)];
            if (rule == ScreeningRule::cwtm) {
                record.mixing.push_back(
                    build_mixing_matrix(g, w.col(k), corrupted_k, config.b, k, config.tie_break));
            } else {
                // Unscreened averaging has the same explicit matrix at every
                // round and coordinate; corrupted entries are irrelevant to it.
                Matrix a(m, m);
                for (int j = 0; j < m; ++j) {
                    const auto& nbrs = g.in_neighbors(j);
                    const double v = 1.0 / static_cast<double>(nbrs.size() + 1);
                    a(j, j) = v;
                    for (int i : nbrs) a(j, i) = v;
                }
                record.mixing.push_back(std::move(a));
            }
        }
    }
    return next;
}

Trajectory run_loop(const RunConfig& config, const std::vector<LocalObjective>& objectives,
                    ScreeningRule rule) {
    validate(config, objectives, rule != ScreeningRule::dgd_average);

    const int m = config.graph.node_count();
    const int d = objectives.front().dim;
    const int stride = config.snapshot_stride > 0 ? config.snapshot_stride : config.J;

    Trajectory traj;
    traj.j_param = config.J;
    Matrix w = initialize_state(m, d, config.init_radius, config.seed);
    traj.s_snapshots.push_back(w);
    traj.t_snapshots.emplace_back(0, w);

    int s = 0;
    for (int t = 0; t < config.t_max; ++t) {
        if ((t + 1) % config.J != 0) {
            ConsensusRound record;
            w = consensus_round(config, w, t, rule, record);
            traj.rounds.push_back(std::move(record));
        } else {
            const double h = stepsize(config.step, s);
            Matrix next = w;
            for (int j = 0; j < m; ++j) {
                const std::vector<double> grad = objectives[static_cast<std::size_t>(j)].grad(w.row(j));
                for (int k = 0; k < d; ++k) next(j, k) = w(j, k) - h * grad[static_cast<std::size_t>(k)];
            }
            w = std::move(next);
            ++s;
            traj.s_snapshots.push_back(w);
            traj.s_to_t.push_back(t);
        }
        if ((t + 1) % stride == 0) traj.t_snapshots.emplace_back(t + 1, w);
    }
    traj.final_state = w;
    traj.completed_s = s;
    return traj;
}

}  // namespace

Trajectory run_resist(const RunConfig& config, const std::vector<LocalObjective>& objectives) {
    return run_loop(config, objectives, config.screening);
}

Trajectory run_dgd_multistep(const RunConfig& config, const std::vector<LocalObjective>& objectives) {
    return run_loop(config, objectives, ScreeningRule::dgd_average);
}

ConsensusOnlyResult run_consensus_only(const DirectedGraph& graph, int b, const AttackPlan& plan,
                                       int rounds, int dim, double init_radius, std::uint64_t seed,
                                       bool record_mixing) {
    RunConfig config(graph);
    config.b = b;
    config.attack = plan;
    config.record_mixing = record_mixing;
    config.seed = seed;
    if (min_in_degree(graph) < 2 * b + 1)
        throw std::invalid_argument("graph violates the degree requirement min |N_j| >= 2b + 1");

    ConsensusOnlyResult out;
    Matrix w = initialize_state(graph.node_count(), dim, init_radius, seed);
    out.initial_state = w;
    for (int t = 0; t < rounds; ++t) {
        ConsensusRound record;
        w = consensus_round(config, w, t, ScreeningRule::cwtm, record);
        out.rounds.push_back(std::move(record));
    }
    out.final_state = std::move(w);
    return out;
}

}  // namespace resist
