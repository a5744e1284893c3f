#ifndef RESIST_CONFIG_HPP
#define RESIST_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "resist/objectives.hpp"
#include "resist/runner.hpp"

namespace resist {

// Flat key = value text with one [run NAME] section per experiment.
// '#' starts a comment; keys before the first section are suite-level.
struct RawConfig {
    std::map<std::string, std::string> globals;
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> runs;

    bool operator==(const RawConfig&) const = default;
};

RawConfig parse_config(const std::string& text);
RawConfig parse_config_file(const std::string& path);
std::string serialize_config(const RawConfig& config);

// Validated, typed description of one run. Kept close to the raw keys so the
// schema stays diff friendly; see the README for the full key reference.
struct RunSpec {
    std::string name;

    std::string graph_kind = "erdos_renyi";  // erdos_renyi | complete | file
    int node_count = 0;
    double rho = 0.5;
    std::string graph_file;

    int b = 0;
    std::string attack_kind = "none";  // none | dynamic_random | static | byzantine
    int links_per_round = 0;           // B, counted over directed links
    std::vector<Edge> static_links;
    std::vector<int> byzantine_nodes;
    std::string strategy_kind = "none";  // none | random_value | sign_flip | constant
    double attack_range = -1.0;          // < 0: default 100 * init_radius
    std::vector<double> constant_value;

    std::string screening = "cwtm";  // cwtm | median | krum | bulyan | dgd
    int j_param = 2;
    std::string step_kind = "constant";  // constant | diminishing | fixed_horizon
    double h = 0.1;
    double p = 0.0;
    double omega = 0.0;
    int horizon = 0;
    int t_max = 0;
    double init_radius = 1.0;
    bool record_mixing = true;
    int snapshot_stride = 0;

    std::string objective = "quadratic";  // quadratic | logistic_blobs | pl_sine | pl_sum | mnist
    int dim = 1;
    std::string targets = "identical";  // identical | spread
    std::vector<double> target_value;
    double target_spread = 1.0;
    double l2 = 0.0;
    int classes = 2;
    int feature_dim = 2;
    int n_per_node = 50;
    double blob_separation = 2.0;
    double blob_spread = 0.5;
    std::string partition = "iid";  // iid | moderate | extreme
    std::string mnist_images;
    std::string mnist_labels;
    std::vector<int> label_flip_nodes;
};

struct SuiteSpec {
    std::string name = "suite";
    std::vector<std::uint64_t> seeds{0};
    std::vector<RunSpec> runs;
};

// Throws std::invalid_argument with a key-specific message on bad input.
SuiteSpec validate_config(const RawConfig& raw);
RawConfig to_raw(const SuiteSpec& suite);

struct MaterializedRun {
    RunConfig config;
    std::vector<LocalObjective> objectives;
};

// Builds the graph, attack plan and per-node objectives for one seed. All
// randomness is drawn from labeled substreams of the seed.
MaterializedRun materialize_run(const RunSpec& spec, std::uint64_t seed);

}  // namespace resist

#endif
