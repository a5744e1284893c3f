#include "resist/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "resist/idx.hpp"
#include "resist/metrics.hpp"
#include "resist/rng.hpp"

namespace resist {

namespace {

DirectedGraph build_graph(const RunSpec& spec, std::uint64_t seed) {
    if (spec.graph_kind == "complete") return complete_graph(spec.node_count);
    if (spec.graph_kind == "file") {
        std::ifstream in(spec.graph_file);
        if (!in) throw std::runtime_error("cannot open graph file: " + spec.graph_file);
        return from_edge_list(in);
    }
    // Erdos-Renyi, resampled with a derived seed until the degree requirement
    // for the configured b holds (bounded attempts).
    std::uint64_t graph_seed = Rng::keyed(seed, {label_key("graph")}).next_u64();
    for (int attempt = 0; attempt < 64; ++attempt) {
        DirectedGraph g = generate_erdos_renyi(spec.node_count, spec.rho, graph_seed + static_cast<std::uint64_t>(attempt));
        if (min_in_degree(g) >= 2 * spec.b + 1) return g;
    }
    throw std::invalid_argument("run " + spec.name +
                                ": could not sample a graph with min in-degree >= 2b + 1; raise rho");
}

AttackStrategy build_strategy(const RunSpec& spec) {
    if (spec.strategy_kind == "none") return AttackStrategy::none();
    if (spec.strategy_kind == "sign_flip") return AttackStrategy::sign_flip();
    if (spec.strategy_kind == "constant") return AttackStrategy::constant_vector(spec.constant_value);
    const double range = spec.attack_range >= 0.0 ? spec.attack_range : 100.0 * spec.init_radius;
    return AttackStrategy::random_value(range);
}

PartitionMode partition_mode(const std::string& name) {
    if (name == "moderate") return PartitionMode::moderate_non_iid;
    if (name == "extreme") return PartitionMode::extreme_non_iid;
    return PartitionMode::iid;
}

std::vector<LocalObjective> build_objectives(const RunSpec& spec, int node_count,
                                             std::uint64_t seed) {
    if (spec.objective == "quadratic") {
        std::vector<std::vector<double>> targets;
        if (spec.targets == "spread") {
            for (int j = 0; j < node_count; ++j) {
                Rng rng = Rng::keyed(seed, {label_key("targets"), static_cast<std::uint64_t>(j)});
                std::vector<double> a(static_cast<std::size_t>(spec.dim));
                for (double& v : a) v = rng.next_uniform(-spec.target_spread, spec.target_spread);
                targets.push_back(std::move(a));
            }
        } else {
            std::vector<double> a = spec.target_value;
            if (a.empty()) a.assign(static_cast<std::size_t>(spec.dim), 0.0);
            if (static_cast<int>(a.size()) != spec.dim)
                throw std::invalid_argument("run " + spec.name + ": target_value dimension mismatch");
            targets.assign(static_cast<std::size_t>(node_count), a);
        }
        return make_quadratic(targets, spec.l2);
    }
    if (spec.objective == "pl_sine" || spec.objective == "pl_sum") {
        LocalObjective proto = spec.objective == "pl_sine" ? make_pl_sine() : make_pl_sum_counterexample();
        return std::vector<LocalObjective>(static_cast<std::size_t>(node_count), proto);
    }
    // Dataset-backed objectives.
    Dataset data;
    if (spec.objective == "mnist") {
        data = load_idx(spec.mnist_images, spec.mnist_labels);
    } else {
        const int per_class =
            (spec.n_per_node * node_count + spec.classes - 1) / spec.classes;
        data = make_blobs(spec.classes, spec.feature_dim, per_class, spec.blob_separation,
                          spec.blob_spread, Rng::keyed(seed, {label_key("data")}).next_u64());
    }
    PartitionedDataset parts = partition_data(data, node_count, partition_mode(spec.partition),
                                              Rng::keyed(seed, {label_key("partition")}).next_u64());
    if (!spec.label_flip_nodes.empty()) flip_labels(parts, spec.label_flip_nodes);
    const double l2 = spec.l2 > 0.0 ? spec.l2 : 0.01;
    std::vector<LocalObjective> objs;
    objs.reserve(parts.nodes.size());
    for (const Dataset& node_data : parts.nodes) objs.push_back(make_logistic_l2(node_data, l2));
    return objs;
}

StepSchedule build_step(const RunSpec& spec) {
    if (spec.step_kind == "diminishing") return StepSchedule::diminishing(spec.p, spec.omega);
    if (spec.step_kind == "fixed_horizon") return StepSchedule::fixed_horizon(spec.horizon);
    return StepSchedule::constant(spec.h);
}

ScreeningRule screening_rule(const std::string& name) {
    if (name == "median") return ScreeningRule::median;
    if (name == "krum") return ScreeningRule::krum;
    if (name == "bulyan") return ScreeningRule::bulyan;
    if (name == "dgd") return ScreeningRule::dgd_average;
    return ScreeningRule::cwtm;
}

std::string unique_path(const std::filesystem::path& dir, const std::string& stem,
                        const std::string& ext) {
    std::filesystem::path p = dir / (stem + ext);
    int suffix = 0;
    while (std::filesystem::exists(p)) p = dir / (stem + "_" + std::to_string(++suffix) + ext);
    return p.string();
}

struct JobResult {
    std::string csv_text;
    double final_xi6 = 0.0, tail_xi6 = 0.0, final_xi1_max = 0.0, tail_xi1_max = 0.0;
    double final_fgap = 0.0, final_frob = 0.0, final_min_gradnorm2 = 0.0;
};

double tail_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t n = std::max<std::size_t>(1, v.size() / 10);
    double s = 0.0;
    for (std::size_t i = v.size() - n; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(n);
}

}  // namespace

MaterializedRun materialize_run(const RunSpec& spec, std::uint64_t seed) {
    DirectedGraph graph = build_graph(spec, seed);
    RunConfig config(graph);
    config.b = spec.b;
    config.J = spec.j_param;
    config.step = build_step(spec);
    config.t_max = spec.t_max;
    config.init_radius = spec.init_radius;
    config.seed = seed;
    config.record_mixing = spec.record_mixing;
    config.snapshot_stride = spec.snapshot_stride;
    config.screening = screening_rule(spec.screening);

    AttackStrategy strategy = build_strategy(spec);
    std::uint64_t attack_seed = Rng::keyed(seed, {label_key("attack")}).next_u64();
    if (spec.attack_kind == "dynamic_random") {
        config.attack = AttackPlan::dynamic_random(spec.links_per_round, strategy, attack_seed);
    } else if (spec.attack_kind == "static") {
        std::set<Edge> links(spec.static_links.begin(), spec.static_links.end());
        config.attack = AttackPlan::static_plan(links, strategy, graph, spec.b, attack_seed);
    } else if (spec.attack_kind == "byzantine") {
        std::set<int> byz(spec.byzantine_nodes.begin(), spec.byzantine_nodes.end());
        config.attack = map_byzantine(byz, graph, spec.b, strategy, attack_seed);
    } else {
        config.attack = AttackPlan::none();
    }

    MaterializedRun run{std::move(config), build_objectives(spec, graph.node_count(), seed)};
    return run;
}

SuiteResult run_suite(const SuiteSpec& suite, const std::string& out_dir,
                      const std::vector<std::uint64_t>& seed_override, int parallel,
                      bool verbose) {
    SuiteResult result;
    const std::vector<std::uint64_t>& seeds = seed_override.empty() ? suite.seeds : seed_override;

    // Validate everything up front: materialize each run once on the first
    // seed before producing any output.
    try {
        for (const RunSpec& spec : suite.runs) (void)materialize_run(spec, seeds.front());
    } catch (const std::exception& e) {
        result.status = kSuiteInvalidConfig;
        result.message = e.what();
        return result;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        result.status = kSuiteIoFailure;
        result.message = "cannot create output directory: " + out_dir;
        return result;
    }

    struct Job {
        std::size_t run_index;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t r = 0; r < suite.runs.size(); ++r)
        for (std::uint64_t s : seeds) jobs.push_back({r, s});

    std::vector<JobResult> job_results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::mutex log_mutex;

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t idx = begin; idx < jobs.size(); idx += stride) {
            const Job& job = jobs[idx];
            const RunSpec& spec = suite.runs[job.run_index];
            if (verbose) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "running " << spec.name << " seed " << job.seed << "\n";
            }
            try {
                MaterializedRun run = materialize_run(spec, job.seed);
                Trajectory traj = run.config.screening == ScreeningRule::dgd_average
                                      ? run_dgd_multistep(run.config, run.objectives)
                                      : run_resist(run.config, run.objectives);
                MetricsLog log = compute_metrics(traj, run.objectives);
                JobResult& jr = job_results[idx];
                jr.final_xi6 = log.rows.back().xi6;
                jr.final_xi1_max = log.rows.back().xi1_max;
                jr.final_fgap = log.rows.back().fgap;
                jr.final_frob = log.rows.back().frob_triplet;
                jr.final_min_gradnorm2 = log.rows.back().min_gradnorm2;
                jr.tail_xi6 = tail_mean(log.series_xi6());
                jr.tail_xi1_max = tail_mean(log.series_xi1_max());
                // File naming is deterministic; jobs may run on any thread.
                jr.csv_text = metrics_csv(log);
            } catch (const std::exception& e) {
                errors[idx] = e.what();
            }
        }
    };

    const int threads = std::max(1, parallel);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), threads);
        for (auto& th : pool) th.join();
    }

    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
        if (!errors[idx].empty()) {
            result.status = kSuiteInvalidConfig;
            result.message = errors[idx];
            return result;
        }
    }

    // Write per-job CSVs in deterministic (config, seed) order.
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
        const Job& job = jobs[idx];
        const std::string stem = suite.runs[job.run_index].name + "_seed" + std::to_string(job.seed);
        const std::string path = unique_path(out_dir, stem, ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            result.status = kSuiteIoFailure;
            result.message = "cannot write " + path;
            return result;
        }
        out << job_results[idx].csv_text;
        result.csv_files.push_back(path);
    }

    // Summary: one row per config, mean/stddev across seeds.
    std::ostringstream summary;
    summary << "config,n_seeds,final_xi6_mean,final_xi6_std,tail_xi6_mean,tail_xi6_std,"
               "final_xi1max_mean,final_xi1max_std,tail_xi1max_mean,tail_xi1max_std,"
               "final_fgap_mean,final_fgap_std,final_frob_mean,final_frob_std,"
               "final_min_gradnorm2_mean,final_min_gradnorm2_std\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        summary << "," << buf;
    };
    for (std::size_t r = 0; r < suite.runs.size(); ++r) {
        std::vector<const JobResult*> rows;
        for (std::size_t idx = 0; idx < jobs.size(); ++idx)
            if (jobs[idx].run_index == r) rows.push_back(&job_results[idx]);
        auto stats = [&](auto getter) {
            double mean = 0.0;
            for (const JobResult* jr : rows) mean += getter(*jr);
            mean /= static_cast<double>(rows.size());
            double var = 0.0;
            for (const JobResult* jr : rows) {
                const double d = getter(*jr) - mean;
                var += d * d;
            }
            var = rows.size() > 1 ? var / static_cast<double>(rows.size() - 1) : 0.0;
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        summary << suite.runs[r].name << "," << rows.size();
        for (auto [mean, sd] : {stats([](const JobResult& j) { return j.final_xi6; }),
                                stats([](const JobResult& j) { return j.tail_xi6; }),
                                stats([](const JobResult& j) { return j.final_xi1_max; }),
                                stats([](const JobResult& j) { return j.tail_xi1_max; }),
                                stats([](const JobResult& j) { return j.final_fgap; }),
                                stats([](const JobResult& j) { return j.final_frob; }),
                                stats([](const JobResult& j) { return j.final_min_gradnorm2; })}) {
            put(mean);
            put(sd);
        }
        summary << "\n";
    }
    result.summary_file = unique_path(out_dir, suite.name + "_summary", ".csv");
    std::ofstream out(result.summary_file, std::ios::binary);
    if (!out) {
        result.status = kSuiteIoFailure;
        result.message = "cannot write " + result.summary_file;
        return result;
    }
    out << summary.str();
    return result;
}

}  // namespace resist
