#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resist/acceptance.hpp"
#include "resist/config.hpp"
#include "resist/graph.hpp"
#include "resist/suite.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& seeds_arg, int parallel) {
    resist::SuiteSpec suite;
    try {
        suite = resist::validate_config(resist::parse_config_file(config_path));
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return resist::kSuiteInvalidConfig;
    }
    std::vector<std::uint64_t> seeds;
    if (!seeds_arg.empty()) {
        std::string token;
        std::istringstream in(seeds_arg);
        while (std::getline(in, token, ',')) seeds.push_back(std::stoull(token));
    }
    const char* verbose_env = std::getenv("RESIST_VERBOSE");
    const bool verbose = verbose_env && std::string(verbose_env) != "0";
    resist::SuiteResult result = resist::run_suite(suite, out_dir, seeds, parallel, verbose);
    if (result.status != resist::kSuiteOk) {
        std::cerr << "suite failed: " << result.message << "\n";
        return result.status;
    }
    for (const std::string& f : result.csv_files) std::cout << f << "\n";
    std::cout << result.summary_file << "\n";
    return 0;
}

int cmd_check_graph(const std::string& config_path, std::uint64_t budget) {
    resist::SuiteSpec suite;
    try {
        suite = resist::validate_config(resist::parse_config_file(config_path));
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return resist::kSuiteInvalidConfig;
    }
    bool all_ok = true;
    for (const resist::RunSpec& spec : suite.runs) {
        try {
            resist::MaterializedRun run = resist::materialize_run(spec, suite.seeds.front());
            const resist::DirectedGraph& g = run.config.graph;
            bool saturated = false;
            std::uint64_t tau = resist::count_tau(g, spec.b, &saturated);
            resist::ConnectivityMode mode = (!saturated && tau <= budget)
                                                ? resist::ConnectivityMode::exhaustive
                                                : resist::ConnectivityMode::sampled;
            resist::ConnectivityReport report =
                resist::verify_sufficient_connectivity(g, spec.b, mode, budget, suite.seeds.front());
            std::cout << spec.name << ": M=" << g.node_count() << " edges=" << g.edge_count()
                      << " min_in_degree=" << resist::min_in_degree(g) << " b=" << spec.b
                      << " tau=" << (saturated ? std::string(">=2^64") : std::to_string(tau))
                      << " mode=" << (mode == resist::ConnectivityMode::exhaustive ? "exhaustive" : "sampled")
                      << " checked=" << report.checked_count
                      << " sufficient_connectivity=" << (report.all_pass ? "yes" : "NO") << "\n";
            if (!report.all_pass) {
                all_ok = false;
                std::cout << "  counterexample removals:";
                for (const auto& [node, removed] : report.counterexample->removed) {
                    std::cout << " node " << node << " {";
                    bool first = true;
                    for (int r : removed) {
                        std::cout << (first ? "" : ",") << r;
                        first = false;
                    }
                    std::cout << "}";
                }
                std::cout << "\n";
            }
        } catch (const std::exception& e) {
            std::cerr << spec.name << ": " << e.what() << "\n";
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for screened consensus gradient descent under link attacks"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", seeds_arg, suite_name = "acceptance";
    int parallel = 1;
    std::uint64_t budget = 10000;

    CLI::App* simulate = app.add_subcommand("simulate", "run an experiment suite from a config file");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--seeds", seeds_arg, "comma-separated seed list overriding the config");
    simulate->add_option("--parallel", parallel, "number of worker threads");

    CLI::App* check = app.add_subcommand("check-graph", "connectivity report for each run in a config");
    check->add_option("--config", config_path, "config file")->required();
    check->add_option("--budget", budget, "filtered-graph check budget");

    CLI::App* verify = app.add_subcommand("verify", "run a named verification battery");
    verify->add_option("--suite", suite_name, "battery name (acceptance)");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seeds_arg, parallel);
    if (check->parsed()) return cmd_check_graph(config_path, budget);
    if (verify->parsed()) {
        if (suite_name != "acceptance") {
            std::cerr << "unknown battery: " << suite_name << "\n";
            return 2;
        }
        return resist::run_acceptance_battery(std::cout);
    }
    return 0;
}
