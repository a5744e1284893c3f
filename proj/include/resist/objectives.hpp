#ifndef RESIST_OBJECTIVES_HPP
#define RESIST_OBJECTIVES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace resist {

enum class FunctionClass { strongly_convex, polyak_lojasiewicz, nonconvex };

// Closed-form data kept by quadratic objectives so the centralized reference
// solver can bypass iteration.
struct QuadraticForm {
    std::vector<double> target;
    double l2 = 0.0;
};

struct LocalObjective {
    int dim = 0;
    FunctionClass cls = FunctionClass::nonconvex;
    double mu = 0.0;  // 0 when unknown
    double lip = 0.0; // gradient Lipschitz constant, 0 when unknown
    std::function<double(const std::vector<double>&)> eval;
    std::function<std::vector<double>(const std::vector<double>&)> grad;
    std::optional<QuadraticForm> quadratic;
};

// f_j(w) = 1/2 ||w - a_j||^2 + (l2/2) ||w||^2, so mu = L = 1 + l2.
std::vector<LocalObjective> make_quadratic(const std::vector<std::vector<double>>& targets,
                                           double l2);

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int label_count = 0;

    std::size_t size() const { return features.size(); }
};

// Multinomial cross-entropy with an l2 ridge; the model is a (classes x dim)
// weight matrix stored row major. l2 > 0 keeps it strongly convex.
LocalObjective make_logistic_l2(const Dataset& data, double l2);

// f(x, y) = (y - sin x)^2 / 2: gradient-dominated, critical set y = sin x.
LocalObjective make_pl_sine();
// f + g with g(x, y) = (y - 3 - sin(x - 3))^2 / 4: each summand is gradient
// dominated but the sum has saddle points.
LocalObjective make_pl_sum_counterexample();

enum class PartitionMode { iid, moderate_non_iid, extreme_non_iid };

struct PartitionedDataset {
    std::vector<Dataset> nodes;
    PartitionMode mode = PartitionMode::iid;
    int per_node = 0;
    bool truncated = false;  // dataset size was not divisible by the node count
};

PartitionedDataset partition_data(const Dataset& data, int node_count, PartitionMode mode,
                                  std::uint64_t seed);

// Deterministic Gaussian-blob classification data; the default data source,
// so nothing in the test suite needs a download.
Dataset make_blobs(int classes, int dim, int per_class, double separation, double spread,
                   std::uint64_t seed);

// Label-flipping data poisoning at the given nodes: label y -> L - 1 - y.
void flip_labels(PartitionedDataset& parts, const std::vector<int>& nodes);

struct CentralizedSolution {
    std::vector<double> w;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-10;          // on the gradient norm of the average objective
    int max_iterations = 500000;
    std::vector<double> start;   // empty: origin
};

// Minimizes the average of the locals: closed form when every local is the
// same-ridge quadratic, high-precision gradient descent otherwise.
CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objectives,
                                      const SolveOptions& options = {});

// Max relative error between analytic gradients and central differences over
// the given points, with an absolute floor of 1e-8 in the denominator.
double finite_diff_check(const LocalObjective& objective,
                         const std::vector<std::vector<double>>& points, double epsilon);

// Grid estimate of the gradient-domination constant over [lo, hi]^2:
// min over grid points of ||grad f||^2 / (2 (f - f_star)), skipping points
// with a vanishing gap.
double pl_constant_grid_estimate(const LocalObjective& objective, double lo, double hi,
                                 int grid_points, double f_star);

// Grid estimate of the gradient Lipschitz constant over [lo, hi]^2 via the
// spectral norm of the finite-difference Hessian.
double lipschitz_grid_estimate(const LocalObjective& objective, double lo, double hi,
                               int grid_points);

struct NearStationaryPoint {
    std::vector<double> point;
    double grad_norm = 0.0;
    double value = 0.0;
    double gap = 0.0;  // value - global minimum estimate
    double global_min = 0.0;
};

// Search oracle for the saddle certificate: dense grid over [lo, hi]^2,
// descent on ||grad f||^2 from the most promising grid points, and a global
// minimum estimate from plain descent on f from the grid minima.
NearStationaryPoint find_near_stationary_gap(const LocalObjective& objective, double lo, double hi,
                                             int grid_points);

}  // namespace resist

#endif
