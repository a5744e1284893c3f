#ifndef RESIST_MIXING_ANALYSIS_HPP
#define RESIST_MIXING_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "resist/matrix.hpp"

namespace resist {

struct TransitionProduct {
    Matrix matrix;
    int from = 0;  // t0
    int to = 0;    // t (inclusive)
};

// Backward product of recorded mixing matrices: the list is chronological,
// later matrices multiply on the left.
TransitionProduct transition_product(std::span<const Matrix> matrices, int t0 = 0);

// Coefficients of ergodicity of a row-stochastic matrix, both in [0, 1].
// delta = 0 iff the rows are identical; lambda < 1 defines scrambling.
double delta_ergodicity(const Matrix& a);
double lambda_ergodicity(const Matrix& a);
bool is_scrambling(const Matrix& a);

struct ConsensusEstimate {
    bool converged = false;
    std::vector<double> chat;  // probability vector, length M
    int rounds_used = 0;
    double delta = 1.0;        // delta of the product actually formed
};

// Multiplies matrices (chronological order, from index s onward) until the
// product's delta drops below tol; the consensus vector is the averaged row.
// Never guesses silently: converged=false when tol was not reached.
ConsensusEstimate estimate_consensus_vector(std::span<const Matrix> matrices, double tol);

// beta = alpha / (4b) with alpha = 1 / (M - 2b + 1); the uniform positive
// floor on non-trivial mixing weights.
double mixing_beta(int node_count, int b);

struct GeometricMixingReport {
    std::vector<double> deltas;     // delta(Phi(t, 0)) per round
    bool monotone = false;          // non-increasing along prefixes
    double final_delta = 1.0;
    double fitted_slope = 0.0;      // log-linear decay rate of delta
    double fitted_r2 = 0.0;
    bool formal_bound_holds = false;
    ConsensusEstimate consensus;
};

// Checks the recorded sequence against the geometric-mixing characterization:
// the formal (1 - beta^{tau M})^{floor(t/(tau M))} envelope at every round
// (numerically near-vacuous for realistic tau, and still required to hold),
// the fitted empirical decay of delta, and prefix monotonicity.
GeometricMixingReport verify_geometric_mixing(std::span<const Matrix> matrices, double beta,
                                              double tau, int node_count,
                                              double consensus_tol = 1e-10);

// CSV dump of transition-product checkpoints for offline inspection: one row
// per checkpoint with t, delta(Phi(t, 0)) and the flattened product entries.
std::string phi_checkpoints_csv(std::span<const Matrix> matrices, int stride = 1);

// Least-squares fit of log(series) vs index, from burn_in onward; entries
// that are not positive (or below 1e-300) are skipped.
struct RateFit {
    double slope = 0.0;
    double r2 = 0.0;
    int points_used = 0;
};
RateFit fit_geometric_rate(std::span<const double> series, int burn_in);

// Least-squares fit of log(series) vs log(index + 1), for sublinear rates.
RateFit fit_loglog_rate(std::span<const double> series, int burn_in);

}  // namespace resist

#endif
