#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resist/acceptance.hpp"
#include "resist/config.hpp"
#include "resist/idx.hpp"
#include "resist/metrics.hpp"
#include "resist/mixing_analysis.hpp"
#include "resist/suite.hpp"

namespace py = pybind11;
using namespace resist;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    return rows;
}

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows(); ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != m.cols())
            throw std::invalid_argument("ragged matrix rows");
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simulator and analysis toolkit for screened consensus gradient descent under "
              "dynamic link attacks";

    // graph
    py::class_<DirectedGraph>(m, "DirectedGraph")
        .def(py::init<int>(), py::arg("node_count"))
        .def_property_readonly("node_count", &DirectedGraph::node_count)
        .def("add_edge", &DirectedGraph::add_edge)
        .def("has_edge", &DirectedGraph::has_edge)
        .def("in_neighbors", &DirectedGraph::in_neighbors)
        .def("out_neighbors", &DirectedGraph::out_neighbors)
        .def("edges", &DirectedGraph::edges)
        .def("edge_count", &DirectedGraph::edge_count)
        .def("in_degree", &DirectedGraph::in_degree);
    m.def("generate_erdos_renyi", &generate_erdos_renyi, py::arg("node_count"), py::arg("rho"),
          py::arg("seed"));
    m.def("complete_graph", &complete_graph);
    m.def("min_in_degree", &min_in_degree);
    m.def("source_component",
          static_cast<std::set<int> (*)(const DirectedGraph&)>(&source_component));
    m.def("filtered_source_component",
          static_cast<std::set<int> (*)(const FilteredGraph&)>(&source_component));
    m.def("count_tau", [](const DirectedGraph& g, int b) {
        bool saturated = false;
        std::uint64_t tau = count_tau(g, b, &saturated);
        return py::make_tuple(tau, saturated);
    });
    py::enum_<ConnectivityMode>(m, "ConnectivityMode")
        .value("exhaustive", ConnectivityMode::exhaustive)
        .value("sampled", ConnectivityMode::sampled);
    py::class_<FilteredGraph>(m, "FilteredGraph")
        .def_readonly("removed", &FilteredGraph::removed)
        .def("in_neighbors", &FilteredGraph::in_neighbors);
    py::class_<ConnectivityReport>(m, "ConnectivityReport")
        .def_readonly("mode", &ConnectivityReport::mode)
        .def_readonly("checked_count", &ConnectivityReport::checked_count)
        .def_readonly("all_pass", &ConnectivityReport::all_pass)
        .def_readonly("tau", &ConnectivityReport::tau)
        .def_readonly("tau_saturated", &ConnectivityReport::tau_saturated)
        .def_property_readonly("counterexample", [](const ConnectivityReport& r) {
            return r.counterexample ? py::cast(*r.counterexample) : py::none().cast<py::object>();
        });
    m.def("verify_sufficient_connectivity", &verify_sufficient_connectivity, py::arg("graph"),
          py::arg("b"), py::arg("mode"), py::arg("budget"), py::arg("seed"));
    m.def("to_edge_list", &to_edge_list);
    m.def("from_edge_list", &from_edge_list_string);

    // attack
    py::class_<AttackStrategy>(m, "AttackStrategy")
        .def_static("none", &AttackStrategy::none)
        .def_static("random_value", &AttackStrategy::random_value, py::arg("range"))
        .def_static("sign_flip", &AttackStrategy::sign_flip)
        .def_static("constant_vector", &AttackStrategy::constant_vector);
    py::class_<CompromisedLinkSet>(m, "CompromisedLinkSet")
        .def_readonly("round", &CompromisedLinkSet::round)
        .def_readonly("links", &CompromisedLinkSet::links)
        .def("incoming_counts", &CompromisedLinkSet::incoming_counts)
        .def("max_incoming", &CompromisedLinkSet::max_incoming);
    py::class_<AttackPlan>(m, "AttackPlan")
        .def_static("none", &AttackPlan::none)
        .def_static("dynamic_random", &AttackPlan::dynamic_random, py::arg("links_per_round"),
                    py::arg("strategy"), py::arg("seed"))
        .def_static("static_plan", &AttackPlan::static_plan, py::arg("links"), py::arg("strategy"),
                    py::arg("graph"), py::arg("b"), py::arg("seed") = 0)
        .def_readonly("links_per_round", &AttackPlan::links_per_round)
        .def_readonly("static_set", &AttackPlan::static_set);
    m.def("select_links", &select_links);
    m.def("corrupt",
          [](const std::vector<double>& message, const AttackStrategy& strategy,
             std::uint64_t seed, int t, int from, int to) {
              Rng rng = corruption_stream(seed, t, from, to);
              return corrupt(message, strategy, rng);
          },
          py::arg("message"), py::arg("strategy"), py::arg("seed"), py::arg("t"), py::arg("from_node"),
          py::arg("to_node"));
    m.def("map_byzantine", &map_byzantine, py::arg("byzantine_nodes"), py::arg("graph"),
          py::arg("b"), py::arg("strategy"), py::arg("seed") = 0);

    // screening
    py::class_<TieBreak>(m, "TieBreak")
        .def_static("smallest_id", &TieBreak::smallest_id)
        .def_static("seeded", &TieBreak::seeded);
    py::class_<MixingRow>(m, "MixingRow")
        .def_readonly("node", &MixingRow::node)
        .def_readonly("coordinate", &MixingRow::coordinate)
        .def_readonly("weights", &MixingRow::weights)
        .def_readonly("q", &MixingRow::q)
        .def_readonly("b_star", &MixingRow::b_star)
        .def_readonly("b_k", &MixingRow::b_k)
        .def_readonly("upper_anchors", &MixingRow::upper_anchors)
        .def_readonly("lower_anchors", &MixingRow::lower_anchors)
        .def_readonly("thetas", &MixingRow::thetas);
    m.def("cwtm", &cwtm, py::arg("self_value"), py::arg("received"), py::arg("b"),
          py::arg("tie_break") = TieBreak::smallest_id());
    m.def("coordinate_median", &coordinate_median);
    m.def("krum", &krum);
    m.def("bulyan", &bulyan);
    m.def("build_mixing_row_oracle", &build_mixing_row_oracle, py::arg("node_count"),
          py::arg("node"), py::arg("coordinate"), py::arg("self_value"), py::arg("received"),
          py::arg("compromised_in"), py::arg("b"), py::arg("tie_break") = TieBreak::smallest_id());
    m.def("build_mixing_matrix",
          [](const DirectedGraph& g, const std::vector<double>& values,
             const std::map<Edge, double>& corrupted, int b) {
              return matrix_rows(build_mixing_matrix(g, values, corrupted, b));
          });

    // mixing analysis
    m.def("transition_product", [](const std::vector<std::vector<std::vector<double>>>& seq) {
        std::vector<Matrix> ms;
        for (const auto& rows : seq) ms.push_back(matrix_from_rows(rows));
        return matrix_rows(transition_product(ms).matrix);
    });
    m.def("delta_ergodicity",
          [](const std::vector<std::vector<double>>& rows) { return delta_ergodicity(matrix_from_rows(rows)); });
    m.def("lambda_ergodicity",
          [](const std::vector<std::vector<double>>& rows) { return lambda_ergodicity(matrix_from_rows(rows)); });
    m.def("is_scrambling",
          [](const std::vector<std::vector<double>>& rows) { return is_scrambling(matrix_from_rows(rows)); });
    py::class_<ConsensusEstimate>(m, "ConsensusEstimate")
        .def_readonly("converged", &ConsensusEstimate::converged)
        .def_readonly("chat", &ConsensusEstimate::chat)
        .def_readonly("rounds_used", &ConsensusEstimate::rounds_used)
        .def_readonly("delta", &ConsensusEstimate::delta);
    m.def("estimate_consensus_vector",
          [](const std::vector<std::vector<std::vector<double>>>& seq, double tol) {
              std::vector<Matrix> ms;
              for (const auto& rows : seq) ms.push_back(matrix_from_rows(rows));
              return estimate_consensus_vector(ms, tol);
          });
    m.def("mixing_beta", &mixing_beta, py::arg("node_count"), py::arg("b"));
    py::class_<RateFit>(m, "RateFit")
        .def_readonly("slope", &RateFit::slope)
        .def_readonly("r2", &RateFit::r2)
        .def_readonly("points_used", &RateFit::points_used);
    m.def("fit_geometric_rate", [](const std::vector<double>& series, int burn_in) {
        return fit_geometric_rate(series, burn_in);
    });
    m.def("fit_loglog_rate", [](const std::vector<double>& series, int burn_in) {
        return fit_loglog_rate(series, burn_in);
    });

    // objectives
    py::enum_<FunctionClass>(m, "FunctionClass")
        .value("strongly_convex", FunctionClass::strongly_convex)
        .value("polyak_lojasiewicz", FunctionClass::polyak_lojasiewicz)
        .value("nonconvex", FunctionClass::nonconvex);
    py::class_<LocalObjective>(m, "LocalObjective")
        .def_readonly("dim", &LocalObjective::dim)
        .def_readonly("cls", &LocalObjective::cls)
        .def_readonly("mu", &LocalObjective::mu)
        .def_readonly("lip", &LocalObjective::lip)
        .def("eval", [](const LocalObjective& o, const std::vector<double>& w) { return o.eval(w); })
        .def("grad", [](const LocalObjective& o, const std::vector<double>& w) { return o.grad(w); });
    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("features", &Dataset::features)
        .def_readwrite("labels", &Dataset::labels)
        .def_readwrite("label_count", &Dataset::label_count)
        .def("size", &Dataset::size);
    py::enum_<PartitionMode>(m, "PartitionMode")
        .value("iid", PartitionMode::iid)
        .value("moderate_non_iid", PartitionMode::moderate_non_iid)
        .value("extreme_non_iid", PartitionMode::extreme_non_iid);
    py::class_<PartitionedDataset>(m, "PartitionedDataset")
        .def_readonly("nodes", &PartitionedDataset::nodes)
        .def_readonly("per_node", &PartitionedDataset::per_node)
        .def_readonly("truncated", &PartitionedDataset::truncated);
    m.def("make_quadratic", &make_quadratic, py::arg("targets"), py::arg("l2"));
    m.def("make_logistic_l2", &make_logistic_l2, py::arg("data"), py::arg("l2"));
    m.def("make_pl_sine", &make_pl_sine);
    m.def("make_pl_sum_counterexample", &make_pl_sum_counterexample);
    m.def("partition_data", &partition_data);
    m.def("make_blobs", &make_blobs, py::arg("classes"), py::arg("dim"), py::arg("per_class"),
          py::arg("separation"), py::arg("spread"), py::arg("seed"));
    m.def("flip_labels", &flip_labels);
    py::class_<CentralizedSolution>(m, "CentralizedSolution")
        .def_readonly("w", &CentralizedSolution::w)
        .def_readonly("value", &CentralizedSolution::value)
        .def_readonly("grad_norm", &CentralizedSolution::grad_norm)
        .def_readonly("iterations", &CentralizedSolution::iterations)
        .def_readonly("converged", &CentralizedSolution::converged);
    m.def("centralized_solve",
          [](const std::vector<LocalObjective>& objs) { return centralized_solve(objs); });
    m.def("finite_diff_check", &finite_diff_check);
    py::class_<NearStationaryPoint>(m, "NearStationaryPoint")
        .def_readonly("point", &NearStationaryPoint::point)
        .def_readonly("grad_norm", &NearStationaryPoint::grad_norm)
        .def_readonly("value", &NearStationaryPoint::value)
        .def_readonly("gap", &NearStationaryPoint::gap)
        .def_readonly("global_min", &NearStationaryPoint::global_min);
    m.def("find_near_stationary_gap", &find_near_stationary_gap);
    m.def("pl_constant_grid_estimate", &pl_constant_grid_estimate);
    m.def("lipschitz_grid_estimate", &lipschitz_grid_estimate);

    // runner
    py::enum_<ScreeningRule>(m, "ScreeningRule")
        .value("cwtm", ScreeningRule::cwtm)
        .value("median", ScreeningRule::median)
        .value("krum", ScreeningRule::krum)
        .value("bulyan", ScreeningRule::bulyan)
        .value("dgd_average", ScreeningRule::dgd_average);
    py::class_<StepSchedule>(m, "StepSchedule")
        .def_static("constant", &StepSchedule::constant)
        .def_static("diminishing", &StepSchedule::diminishing)
        .def_static("fixed_horizon", &StepSchedule::fixed_horizon);
    m.def("stepsize", &stepsize);
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<DirectedGraph>())
        .def_readwrite("b", &RunConfig::b)
        .def_readwrite("attack", &RunConfig::attack)
        .def_readwrite("screening", &RunConfig::screening)
        .def_readwrite("J", &RunConfig::J)
        .def_readwrite("step", &RunConfig::step)
        .def_readwrite("t_max", &RunConfig::t_max)
        .def_readwrite("init_radius", &RunConfig::init_radius)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("record_mixing", &RunConfig::record_mixing)
        .def_readwrite("snapshot_stride", &RunConfig::snapshot_stride)
        .def_readwrite("byzantine_nodes", &RunConfig::byzantine_nodes);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("completed_s", &Trajectory::completed_s)
        .def_readonly("s_to_t", &Trajectory::s_to_t)
        .def_property_readonly("final_state",
                               [](const Trajectory& t) { return matrix_rows(t.final_state); })
        .def("s_snapshot",
             [](const Trajectory& t, int s) {
                 return matrix_rows(t.s_snapshots.at(static_cast<std::size_t>(s)));
             })
        .def_property_readonly("snapshot_count",
                               [](const Trajectory& t) { return t.s_snapshots.size(); });
    m.def("run_resist", &run_resist, py::arg("config"), py::arg("objectives"));
    m.def("run_dgd_multistep", &run_dgd_multistep, py::arg("config"), py::arg("objectives"));

    // metrics
    py::class_<MetricsRow>(m, "MetricsRow")
        .def_readonly("s", &MetricsRow::s)
        .def_readonly("t", &MetricsRow::t)
        .def_readonly("xi1_max", &MetricsRow::xi1_max)
        .def_readonly("xi5_max", &MetricsRow::xi5_max)
        .def_readonly("xi6", &MetricsRow::xi6)
        .def_readonly("fgap", &MetricsRow::fgap)
        .def_readonly("gradnorm2", &MetricsRow::gradnorm2)
        .def_readonly("min_gradnorm2", &MetricsRow::min_gradnorm2)
        .def_readonly("frob_triplet", &MetricsRow::frob_triplet)
        .def_readonly("chat_converged", &MetricsRow::chat_converged);
    py::class_<Heterogeneity>(m, "Heterogeneity")
        .def_readonly("delta", &Heterogeneity::delta)
        .def_readonly("c0_estimate", &Heterogeneity::c0_estimate);
    py::class_<MetricsLog>(m, "MetricsLog")
        .def_readonly("rows", &MetricsLog::rows)
        .def_readonly("heterogeneity", &MetricsLog::heterogeneity)
        .def_readonly("wstar", &MetricsLog::wstar)
        .def_readonly("fstar", &MetricsLog::fstar);
    m.def("compute_metrics",
          [](const Trajectory& traj, const std::vector<LocalObjective>& objs) {
              return compute_metrics(traj, objs);
          });
    m.def("metrics_csv", &metrics_csv);

    // harness
    m.def("load_idx", &load_idx, py::arg("images_path"), py::arg("labels_path"));
    m.def("run_suite_from_config",
          [](const std::string& config_text, const std::string& out_dir) {
              SuiteSpec suite = validate_config(parse_config(config_text));
              SuiteResult result = run_suite(suite, out_dir);
              return py::make_tuple(result.status, result.csv_files, result.summary_file,
                                    result.message);
          });
    m.def("run_acceptance_battery", []() {
        std::ostringstream out;
        int failures = run_acceptance_battery(out);
        return py::make_tuple(failures, out.str());
    });
}
