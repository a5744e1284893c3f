#include "resist/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "resist/matrix.hpp"
#include "resist/rng.hpp"

namespace resist {

std::vector<LocalObjective> make_quadratic(const std::vector<std::vector<double>>& targets,
                                           double l2) {
    if (targets.empty()) throw std::invalid_argument("make_quadratic: no targets");
    const std::size_t d = targets.front().size();
    if (d == 0) throw std::invalid_argument("make_quadratic: dimension must be >= 1");
    if (l2 < 0.0) throw std::invalid_argument("make_quadratic: l2 must be >= 0");
    std::vector<LocalObjective> objs;
    objs.reserve(targets.size());
    for (const auto& a : targets) {
        if (a.size() != d) throw std::invalid_argument("make_quadratic: ragged targets");
        LocalObjective o;
        o.dim = static_cast<int>(d);
        o.cls = FunctionClass::strongly_convex;
        o.mu = 1.0 + l2;
        o.lip = 1.0 + l2;
        o.quadratic = QuadraticForm{a, l2};
        o.eval = [a, l2](const std::vector<double>& w) {
            double s = 0.0, n = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                const double r = w[k] - a[k];
                s += r * r;
                n += w[k] * w[k];
            }
            return 0.5 * s + 0.5 * l2 * n;
        };
        o.grad = [a, l2](const std::vector<double>& w) {
            std::vector<double> g(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) g[k] = (w[k] - a[k]) + l2 * w[k];
            return g;
        };
        objs.push_back(std::move(o));
    }
    return objs;
}

LocalObjective make_logistic_l2(const Dataset& data, double l2) {
    if (l2 <= 0.0) throw std::invalid_argument("make_logistic_l2: l2 must be > 0");
    if (data.size() == 0) throw std::invalid_argument("make_logistic_l2: empty dataset");
    const int classes = data.label_count;
    const int dim = static_cast<int>(data.features.front().size());
    for (int y : data.labels)
        if (y < 0 || y >= classes) throw std::invalid_argument("make_logistic_l2: label out of range");

    auto logits = [classes, dim](const std::vector<double>& w, const std::vector<double>& x) {
        std::vector<double> z(static_cast<std::size_t>(classes), 0.0);
        for (int c = 0; c < classes; ++c) {
            const double* wc = w.data() + static_cast<std::size_t>(c) * dim;
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += wc[k] * x[static_cast<std::size_t>(k)];
            z[static_cast<std::size_t>(c)] = s;
        }
        return z;
    };

    LocalObjective o;
    o.dim = classes * dim;
    o.cls = FunctionClass::strongly_convex;
    o.mu = l2;
    // Softmax Hessian is bounded by max ||x||^2 / 2 per sample.
    double max_x2 = 0.0;
    for (const auto& x : data.features) {
        double n = 0.0;
        for (double v : x) n += v * v;
        max_x2 = std::max(max_x2, n);
    }
    o.lip = 0.5 * max_x2 + l2;

    Dataset d = data;
    o.eval = [d, l2, classes, logits](const std::vector<double>& w) {
        double loss = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::vector<double> z = logits(w, d.features[i]);
            const double zmax = *std::max_element(z.begin(), z.end());
            double lse = 0.0;
            for (double v : z) lse += std::exp(v - zmax);
            lse = zmax + std::log(lse);
            loss += lse - z[static_cast<std::size_t>(d.labels[i])];
        }
        loss /= static_cast<double>(d.size());
        double n = 0.0;
        for (double v : w) n += v * v;
        return loss + 0.5 * l2 * n;
    };
    o.grad = [d, l2, classes, logits](const std::vector<double>& w) {
        const int dim_local = static_cast<int>(d.features.front().size());
        std::vector<double> g(w.size(), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::vector<double> z = logits(w, d.features[i]);
            const double zmax = *std::max_element(z.begin(), z.end());
            double denom = 0.0;
            for (double& v : z) {
                v = std::exp(v - zmax);
                denom += v;
            }
            for (int c = 0; c < classes; ++c) {
                const double p = z[static_cast<std::size_t>(c)] / denom;
                const double coef = p - (d.labels[i] == c ? 1.0 : 0.0);
                double* gc = g.data() + static_cast<std::size_t>(c) * dim_local;
                for (int k = 0; k < dim_local; ++k)
                    gc[k] += coef * d.features[i][static_cast<std::size_t>(k)];
            }
        }
        for (double& v : g) v /= static_cast<double>(d.size());
        for (std::size_t k = 0; k < w.size(); ++k) g[k] += l2 * w[k];
        return g;
    };
    return o;
}

LocalObjective make_pl_sine() {
    LocalObjective o;
    o.dim = 2;
    o.cls = FunctionClass::polyak_lojasiewicz;
    o.eval = [](const std::vector<double>& w) {
        const double r = w[1] - std::sin(w[0]);
        return 0.5 * r * r;
    };
    o.grad = [](const std::vector<double>& w) {
        const double r = w[1] - std::sin(w[0]);
        return std::vector<double>{-r * std::cos(w[0]), r};
    };
    return o;
}

LocalObjective make_pl_sum_counterexample() {
    LocalObjective o;
    o.dim = 2;
    o.cls = FunctionClass::nonconvex;
    o.eval = [](const std::vector<double>& w) {
        const double r = w[1] - std::sin(w[0]);
        const double s = w[1] - 3.0 - std::sin(w[0] - 3.0);
        return 0.5 * r * r + 0.25 * s * s;
    };
    o.grad = [](const std::vector<double>& w) {
        const double r = w[1] - std::sin(w[0]);
        const double s = w[1] - 3.0 - std::sin(w[0] - 3.0);
        return std::vector<double>{-r * std::cos(w[0]) - 0.5 * s * std::cos(w[0] - 3.0),
                                   r + 0.5 * s};
    };
    return o;
}

PartitionedDataset partition_data(const Dataset& data, int node_count, PartitionMode mode,
                                  std::uint64_t seed) {
    if (node_count < 1) throw std::invalid_argument("partition_data: node_count must be >= 1");
    if (data.size() == 0) throw std::invalid_argument("partition_data: empty dataset");

    PartitionedDataset out;
    out.mode = mode;
    out.per_node = static_cast<int>(data.size()) / node_count;
    out.truncated = data.size() % static_cast<std::size_t>(node_count) != 0;
    if (out.per_node == 0) throw std::invalid_argument("partition_data: fewer samples than nodes");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    switch (mode) {
        case PartitionMode::iid: {
            Rng rng = Rng::keyed(seed, {label_key("partition")});
            for (std::size_t i = order.size(); i > 1; --i) {
                std::size_t j = static_cast<std::size_t>(rng.next_below(i));
                std::swap(order[i - 1], order[j]);
            }
            break;
        }
        case PartitionMode::extreme_non_iid: {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return data.labels[a] < data.labels[b];
            });
            break;
        }
        case PartitionMode::moderate_non_iid: {
            // Two label shares per node: label l owns slots
            // [l * 2M/L, (l+1) * 2M/L) of a 2M-slot ring, slot s living at
            // node s mod M. A node's two slots are then M apart, which is
            // L/2 labels apart, so every node holds exactly two distinct
            // labels' shares.
            const int labels = data.label_count;
            if (labels < 2) throw std::invalid_argument("partition_data: label_count unset");
            if ((2 * node_count) % labels != 0)
                throw std::invalid_argument(
                    "partition_data: moderate mode needs label_count dividing 2 * node_count");
            const int slots_per_label = 2 * node_count / labels;
            std::vector<std::vector<std::size_t>> per_node_idx(static_cast<std::size_t>(node_count));
            std::vector<int> dealt(static_cast<std::size_t>(labels), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return data.labels[a] < data.labels[b];
            });
            for (std::size_t idx : order) {
                const int l = data.labels[idx];
                const int slot = l * slots_per_label + dealt[static_cast<std::size_t>(l)] % slots_per_label;
                ++dealt[static_cast<std::size_t>(l)];
                per_node_idx[static_cast<std::size_t>(slot % node_count)].push_back(idx);
            }
            // Equal counts per node: trim to the smallest node share.
            std::size_t min_count = data.size();
            for (const auto& v : per_node_idx) min_count = std::min(min_count, v.size());
            out.per_node = static_cast<int>(min_count);
            for (auto& v : per_node_idx) {
                if (v.size() != min_count) out.truncated = true;
                v.resize(min_count);
            }
            for (const auto& v : per_node_idx) {
                Dataset node;
                node.label_count = data.label_count;
                for (std::size_t idx : v) {
                    node.features.push_back(data.features[idx]);
                    node.labels.push_back(data.labels[idx]);
                }
                out.nodes.push_back(std::move(node));
            }
            return out;
        }
    }

    for (int j = 0; j < node_count; ++j) {
        Dataset node;
        node.label_count = data.label_count;
        for (int i = 0; i < out.per_node; ++i) {
            std::size_t idx = order[static_cast<std::size_t>(j) * out.per_node + i];
            node.features.push_back(data.features[idx]);
            node.labels.push_back(data.labels[idx]);
        }
        out.nodes.push_back(std::move(node));
    }
    return out;
}

Dataset make_blobs(int classes, int dim, int per_class, double separation, double spread,
                   std::uint64_t seed) {
    if (classes < 2 || dim < 1 || per_class < 1)
        throw std::invalid_argument("make_blobs: bad shape parameters");
    Dataset data;
    data.label_count = classes;
    Rng center_rng = Rng::keyed(seed, {label_key("blob-centers")});
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < classes; ++c) {
        std::vector<double> mu(static_cast<std::size_t>(dim));
        for (double& v : mu) v = separation * center_rng.next_uniform(-1.0, 1.0);
        centers.push_back(std::move(mu));
    }
    Rng rng = Rng::keyed(seed, {label_key("blob-samples")});
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> x(static_cast<std::size_t>(dim));
            for (int k = 0; k < dim; ++k)
                x[static_cast<std::size_t>(k)] =
                    centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] +
                    spread * rng.next_gaussian();
            data.features.push_back(std::move(x));
            data.labels.push_back(c);
        }
    }
    return data;
}

void flip_labels(PartitionedDataset& parts, const std::vector<int>& nodes) {
    for (int j : nodes) {
        if (j < 0 || j >= static_cast<int>(parts.nodes.size()))
            throw std::invalid_argument("flip_labels: node out of range");
        Dataset& d = parts.nodes[static_cast<std::size_t>(j)];
        for (int& y : d.labels) y = d.label_count - 1 - y;
    }
}

namespace {

std::vector<double> average_gradient(const std::vector<LocalObjective>& objs,
                                     const std::vector<double>& w) {
    std::vector<double> g(w.size(), 0.0);
    for (const auto& o : objs) {
        std::vector<double> gi = o.grad(w);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
    }
    for (double& v : g) v /= static_cast<double>(objs.size());
    return g;
}

double average_value(const std::vector<LocalObjective>& objs, const std::vector<double>& w) {
    double s = 0.0;
    for (const auto& o : objs) s += o.eval(w);
    return s / static_cast<double>(objs.size());
}

}  // namespace

CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objectives,
                                      const SolveOptions& options) {
    if (objectives.empty()) throw std::invalid_argument("centralized_solve: no objectives");
    const int d = objectives.front().dim;
    for (const auto& o : objectives)
        if (o.dim != d) throw std::invalid_argument("centralized_solve: dimension mismatch");

    CentralizedSolution sol;

    // Same-ridge quadratics minimize in closed form at mean(a) / (1 + l2).
    bool all_quadratic = objectives.front().quadratic.has_value();
    if (all_quadratic) {
        for (const auto& o : objectives)
            if (!o.quadratic || o.quadratic->l2 != objectives.front().quadratic->l2)
                all_quadratic = false;
    }
    if (all_quadratic) {
        const double l2 = objectives.front().quadratic->l2;
        std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
        for (const auto& o : objectives)
            for (int k = 0; k < d; ++k) mean[static_cast<std::size_t>(k)] += o.quadratic->target[static_cast<std::size_t>(k)];
        for (double& v : mean) v /= static_cast<double>(objectives.size());
        for (double& v : mean) v /= (1.0 + l2);
        sol.w = std::move(mean);
        sol.value = average_value(objectives, sol.w);
        sol.grad_norm = norm2(average_gradient(objectives, sol.w));
        sol.converged = true;
        return sol;
    }

    // Gradient descent with backtracking whenever no Lipschitz constant is known.
    double lip = 0.0;
    for (const auto& o : objectives) lip = std::max(lip, o.lip);
    std::vector<double> w = options.start.empty()
                                ? std::vector<double>(static_cast<std::size_t>(d), 0.0)
                                : options.start;
    double step = lip > 0.0 ? 1.0 / lip : 1.0;
    double value = average_value(objectives, w);
    for (int it = 0; it < options.max_iterations; ++it) {
        std::vector<double> g = average_gradient(objectives, w);
        const double gn = norm2(g);
        sol.iterations = it;
        if (gn < options.tol) {
            sol.converged = true;
            break;
        }
        std::vector<double> next = vsub(w, vscale(step, g));
        double next_value = average_value(objectives, next);
        if (lip == 0.0) {
            int shrink = 0;
            while (next_value > value - 0.5 * step * gn * gn && shrink++ < 60) {
                step *= 0.5;
                next = vsub(w, vscale(step, g));
                next_value = average_value(objectives, next);
            }
            step *= 1.3;  // tentative growth for the next iteration
        }
        w = std::move(next);
        value = next_value;
    }
    sol.w = std::move(w);
    sol.value = value;
    sol.grad_norm = norm2(average_gradient(objectives, sol.w));
    return sol;
}

double finite_diff_check(const LocalObjective& objective,
                         const std::vector<std::vector<double>>& points, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("finite_diff_check: epsilon must be > 0");
    double worst = 0.0;
    for (const auto& p : points) {
        std::vector<double> g = objective.grad(p);
        for (std::size_t k = 0; k < p.size(); ++k) {
            std::vector<double> hi = p, lo = p;
            hi[k] += epsilon;
            lo[k] -= epsilon;
            const double fd = (objective.eval(hi) - objective.eval(lo)) / (2.0 * epsilon);
            const double denom = std::max({1e-8, std::abs(g[k]), std::abs(fd)});
            worst = std::max(worst, std::abs(fd - g[k]) / denom);
        }
    }
    return worst;
}

double pl_constant_grid_estimate(const LocalObjective& objective, double lo, double hi,
                                 int grid_points, double f_star) {
    if (objective.dim != 2) throw std::invalid_argument("grid estimate expects a 2-d objective");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        for (int j = 0; j < grid_points; ++j) {
            const double x = lo + (hi - lo) * i / (grid_points - 1);
            const double y = lo + (hi - lo) * j / (grid_points - 1);
            const std::vector<double> w{x, y};
            const double gap = objective.eval(w) - f_star;
            if (gap < 1e-12) continue;
            const std::vector<double> g = objective.grad(w);
            best = std::min(best, (g[0] * g[0] + g[1] * g[1]) / (2.0 * gap));
        }
    }
    return best;
}

double lipschitz_grid_estimate(const LocalObjective& objective, double lo, double hi,
                               int grid_points) {
    if (objective.dim != 2) throw std::invalid_argument("grid estimate expects a 2-d objective");
    const double eps = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        for (int j = 0; j < grid_points; ++j) {
            const double x = lo + (hi - lo) * i / (grid_points - 1);
            const double y = lo + (hi - lo) * j / (grid_points - 1);
            // Finite-difference Hessian, then its spectral norm (2x2).
            double h[2][2];
            for (int k = 0; k < 2; ++k) {
                std::vector<double> p1{x, y}, p2{x, y};
                p1[static_cast<std::size_t>(k)] += eps;
                p2[static_cast<std::size_t>(k)] -= eps;
                std::vector<double> g1 = objective.grad(p1);
                std::vector<double> g2 = objective.grad(p2);
                h[0][k] = (g1[0] - g2[0]) / (2.0 * eps);
                h[1][k] = (g1[1] - g2[1]) / (2.0 * eps);
            }
            const double a = h[0][0], b2 = 0.5 * (h[0][1] + h[1][0]), c = h[1][1];
            const double mean = 0.5 * (a + c);
            const double r = std::sqrt(0.25 * (a - c) * (a - c) + b2 * b2);
            worst = std::max({worst, std::abs(mean + r), std::abs(mean - r)});
        }
    }
    return worst;
}

namespace {

// Descent on ||grad f||^2 via finite-difference directional derivatives.
std::vector<double> polish_stationary(const LocalObjective& objective, std::vector<double> w) {
    const double eps = 1e-6;
    double step = 0.05;
    auto sq_grad_norm = [&](const std::vector<double>& p) {
        const std::vector<double> g = objective.grad(p);
        return g[0] * g[0] + g[1] * g[1];
    };
    double cur = sq_grad_norm(w);
    for (int it = 0; it < 4000 && cur > 1e-10; ++it) {
        std::vector<double> d(2);
        for (int k = 0; k < 2; ++k) {
            std::vector<double> hi = w, lo = w;
            hi[static_cast<std::size_t>(k)] += eps;
            lo[static_cast<std::size_t>(k)] -= eps;
            d[static_cast<std::size_t>(k)] = (sq_grad_norm(hi) - sq_grad_norm(lo)) / (2.0 * eps);
        }
        std::vector<double> next = vsub(w, vscale(step, d));
        double nv = sq_grad_norm(next);
        if (nv < cur) {
            w = std::move(next);
            cur = nv;
            step *= 1.2;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    return w;
}

std::vector<double> descend(const LocalObjective& objective, std::vector<double> w, int iters) {
    double step = 0.1;
    double value = objective.eval(w);
    for (int it = 0; it < iters; ++it) {
        std::vector<double> g = objective.grad(w);
        std::vector<double> next = vsub(w, vscale(step, g));
        double nv = objective.eval(next);
        if (nv < value) {
            w = std::move(next);
            value = nv;
            step *= 1.1;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    return w;
}

}  // namespace

NearStationaryPoint find_near_stationary_gap(const LocalObjective& objective, double lo, double hi,
                                             int grid_points) {
    if (objective.dim != 2) throw std::invalid_argument("search oracle expects a 2-d objective");

    // Global minimum estimate: descend from the best grid values.
    double global_min = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::vector<double>>> value_candidates;
    std::vector<std::pair<double, std::vector<double>>> grad_candidates;
    for (int i = 0; i < grid_points; ++i) {
        for (int j = 0; j < grid_points; ++j) {
            const double x = lo + (hi - lo) * i / (grid_points - 1);
            const double y = lo + (hi - lo) * j / (grid_points - 1);
            const std::vector<double> w{x, y};
            const double v = objective.eval(w);
            const std::vector<double> g = objective.grad(w);
            const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1]);
            value_candidates.emplace_back(v, w);
            grad_candidates.emplace_back(gn, w);
        }
    }
    auto by_first = [](const auto& a, const auto& b) { return a.first < b.first; };
    std::sort(value_candidates.begin(), value_candidates.end(), by_first);
    std::sort(grad_candidates.begin(), grad_candidates.end(), by_first);

    for (std::size_t i = 0; i < std::min<std::size_t>(10, value_candidates.size()); ++i) {
        std::vector<double> w = descend(objective, value_candidates[i].second, 20000);
        global_min = std::min(global_min, objective.eval(w));
    }

    // Near-stationary point with the largest gap: polish small-gradient grid
    // points that are not near the global minimum.
    NearStationaryPoint best;
    best.global_min = global_min;
    double best_grad = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < std::min<std::size_t>(200, grad_candidates.size()); ++i) {
        const double v = objective.eval(grad_candidates[i].second);
        if (v - global_min < 0.05) continue;
        std::vector<double> w = polish_stationary(objective, grad_candidates[i].second);
        const std::vector<double> g = objective.grad(w);
        const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1]);
        const double value = objective.eval(w);
        if (value - global_min > 0.05 && gn < best_grad) {
            best_grad = gn;
            best.point = w;
            best.grad_norm = gn;
            best.value = value;
            best.gap = value - global_min;
        }
    }
    return best;
}

}  // namespace resist
