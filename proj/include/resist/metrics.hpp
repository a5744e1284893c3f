#ifndef RESIST_METRICS_HPP
#define RESIST_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "resist/matrix.hpp"
#include "resist/mixing_analysis.hpp"
#include "resist/objectives.hpp"
#include "resist/runner.hpp"

namespace resist {

// xi5_k = || W_k - (1 1^T / M) W_k ||: distance of coordinate k from its
// exact average.
double compute_xi5(const Matrix& w, int coordinate);

// Inexact-consensus residual against the weighted consensus vector:
// xi1_k = || 1 chat_k^T W_k - W_k ||.
double compute_xi1(const Matrix& w, const std::vector<double>& chat, int coordinate);

// Coordinate-wise chat-weighted node average.
std::vector<double> compute_what(const Matrix& w,
                                 const std::vector<std::vector<double>>& chat_per_coordinate);

double compute_xi6(const std::vector<double>& what, const std::vector<double>& wstar);

struct Heterogeneity {
    double delta = 0.0;        // sum_i ||w* - w_i*||
    double c0_estimate = 0.0;  // running max over visited s (an estimate, not a sup)
};

// Delta is exact via per-node reference solves; the C0 component is folded in
// by compute_metrics as it walks the trajectory.
double compute_delta(const std::vector<LocalObjective>& objectives,
                     const std::vector<double>& wstar);

struct MetricsRow {
    int s = 0;
    int t = 0;
    std::vector<double> xi1;  // per coordinate
    std::vector<double> xi5;
    double xi1_max = 0.0;
    double xi5_max = 0.0;
    double xi6 = 0.0;
    double fgap = 0.0;
    double gradnorm2 = 0.0;
    double min_gradnorm2 = 0.0;
    double frob_consensus = 0.0;   // ||W - Wbar||_F
    double frob_opt = 0.0;         // ||W* - What||_F
    double frob_inexact = 0.0;     // ||W - What||_F
    double frob_triplet = 0.0;     // the sum of the three
    // Optional diagnostics; derivable from the state and tracker, not
    // verified against bounds and never emitted to CSV.
    std::vector<double> xi2;
    std::vector<double> xi3;
    std::vector<double> xi4;
    bool chat_converged = false;
    std::vector<double> what;
};

struct MetricsLog {
    std::vector<MetricsRow> rows;
    Heterogeneity heterogeneity;
    std::vector<double> wstar;
    double fstar = 0.0;

    std::vector<double> series_xi6() const;
    std::vector<double> series_fgap() const;
    std::vector<double> series_xi1_max() const;
    std::vector<double> series_min_gradnorm2() const;
};

struct MetricsOptions {
    std::optional<std::vector<double>> wstar;
    std::optional<double> fstar;
    double chat_tol = 1e-10;
    bool compute_optional_xi = false;
};

// Walks the s-scale snapshots of a mixing-recorded trajectory. chat_k(s) is
// the consensus vector of the tail block product from s onward: anchored
// where the tail has contracted below chat_tol, then propagated downward via
// chat(s)^T = chat(s+1)^T Q(s). Rows past the anchor use the truncated tail
// and are flagged chat_converged = false.
MetricsLog compute_metrics(const Trajectory& trajectory,
                           const std::vector<LocalObjective>& objectives,
                           const MetricsOptions& options = {});

// Per-block products Q_k(s) of the recorded per-round mixing matrices.
std::vector<std::vector<Matrix>> block_products(const Trajectory& trajectory);

std::string metrics_csv(const MetricsLog& log);

}  // namespace resist

#endif
