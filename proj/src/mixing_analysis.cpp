#include "resist/mixing_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace resist {

namespace {

void check_row_stochastic(const Matrix& a, double tol = 1e-9) {
    if (a.rows() != a.cols()) throw std::invalid_argument("mixing matrix must be square");
    for (int i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j) < -1e-12) throw std::invalid_argument("mixing matrix has a negative entry");
            sum += a(i, j);
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("mixing matrix row does not sum to 1");
    }
}

// Long products drift; renormalize rows that have slipped past 1e-12.
void renormalize_rows(Matrix& a) {
    for (int i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < a.cols(); ++j) sum += a(i, j);
        if (std::abs(sum - 1.0) > 1e-12 && sum > 0.0) {
            for (int j = 0; j < a.cols(); ++j) a(i, j) /= sum;
        }
    }
}

RateFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    RateFit fit;
    const int n = static_cast<int>(xs.size());
    fit.points_used = n;
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace

TransitionProduct transition_product(std::span<const Matrix> matrices, int t0) {
    if (matrices.empty()) throw std::invalid_argument("transition product of an empty sequence");
    const int m = matrices.front().rows();
    for (const Matrix& y : matrices) {
        if (y.rows() != m || y.cols() != m)
            throw std::invalid_argument("transition product: dimension mismatch");
        check_row_stochastic(y);
    }
    TransitionProduct out;
    out.from = t0;
    out.to = t0 + static_cast<int>(matrices.size()) - 1;
    out.matrix = matrices.front();
    for (std::size_t i = 1; i < matrices.size(); ++i) {
        out.matrix = matrices[i] * out.matrix;
        renormalize_rows(out.matrix);
    }
    return out;
}

double delta_ergodicity(const Matrix& a) {
    check_row_stochastic(a);
    double worst = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double lo = a(0, j), hi = a(0, j);
        for (int i = 1; i < a.rows(); ++i) {
            lo = std::min(lo, a(i, j));
            hi = std::max(hi, a(i, j));
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

double lambda_ergodicity(const Matrix& a) {
    check_row_stochastic(a);
    double min_overlap = 1.0;
    for (int i1 = 0; i1 < a.rows(); ++i1) {
        for (int i2 = i1 + 1; i2 < a.rows(); ++i2) {
            double overlap = 0.0;
            for (int j = 0; j < a.cols(); ++j) overlap += std::min(a(i1, j), a(i2, j));
            min_overlap = std::min(min_overlap, overlap);
        }
    }
    if (a.rows() < 2) min_overlap = 1.0;
    return 1.0 - min_overlap;
}

bool is_scrambling(const Matrix& a) { return lambda_ergodicity(a) < 1.0; }

ConsensusEstimate estimate_consensus_vector(std::span<const Matrix> matrices, double tol) {
    if (matrices.empty()) throw std::invalid_argument("consensus estimate needs at least one matrix");
    ConsensusEstimate est;
    Matrix product = matrices.front();
    check_row_stochastic(product);
    est.rounds_used = 1;
    est.delta = delta_ergodicity(product);
    for (std::size_t i = 1; i < matrices.size() && est.delta >= tol; ++i) {
        check_row_stochastic(matrices[i]);
        product = matrices[i] * product;
        renormalize_rows(product);
        ++est.rounds_used;
        est.delta = delta_ergodicity(product);
    }
    est.converged = est.delta < tol;
    const int m = product.rows();
    est.chat.assign(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        double avg = 0.0;
        for (int i = 0; i < m; ++i) avg += product(i, j);
        est.chat[static_cast<std::size_t>(j)] = avg / m;
    }
    // Clean up: clamp negatives from rounding and renormalize the average row.
    double sum = 0.0;
    for (double& c : est.chat) {
        c = std::max(0.0, c);
        sum += c;
    }
    if (sum > 0.0)
        for (double& c : est.chat) c /= sum;
    return est;
}

double mixing_beta(int node_count, int b) {
    if (b < 1) throw std::invalid_argument("beta is undefined for b < 1");
    if (node_count <= 2 * b) throw std::invalid_argument("beta requires M > 2b");
    const double alpha = 1.0 / static_cast<double>(node_count - 2 * b + 1);
    return alpha / (4.0 * b);
}

GeometricMixingReport verify_geometric_mixing(std::span<const Matrix> matrices, double beta,
                                              double tau, int node_count, double consensus_tol) {
    if (matrices.empty()) throw std::invalid_argument("verify_geometric_mixing: empty sequence");
    GeometricMixingReport report;
    report.consensus = estimate_consensus_vector(matrices, consensus_tol);

    const double window = tau * static_cast<double>(node_count);
    // beta^{tau M} underflows to 0 for realistic tau, making the envelope
    // (1 - 0)^k = 1; the check is then near-vacuous but still executed.
    const double contraction = 1.0 - std::pow(beta, window);

    report.monotone = true;
    report.formal_bound_holds = true;
    Matrix product = matrices.front();
    double prev_delta = 2.0;
    for (std::size_t t = 0; t < matrices.size(); ++t) {
        if (t > 0) {
            product = matrices[t] * product;
            renormalize_rows(product);
        }
        const double d = delta_ergodicity(product);
        report.deltas.push_back(d);
        if (d > prev_delta * (1.0 + 1e-9) + 1e-15) report.monotone = false;
        prev_delta = d;

        const double bound =
            std::pow(contraction, std::floor(static_cast<double>(t) / window));
        for (int i = 0; i < product.rows() && report.formal_bound_holds; ++i)
            for (int j = 0; j < product.cols(); ++j)
                if (std::abs(product(i, j) - report.consensus.chat[static_cast<std::size_t>(j)]) >
                    bound + 1e-12) {
                    report.formal_bound_holds = false;
                    break;
                }
    }
    report.final_delta = report.deltas.back();
    RateFit fit = fit_geometric_rate(report.deltas, 0);
    report.fitted_slope = fit.slope;
    report.fitted_r2 = fit.r2;
    return report;
}

std::string phi_checkpoints_csv(std::span<const Matrix> matrices, int stride) {
    if (matrices.empty()) throw std::invalid_argument("phi_checkpoints_csv: empty sequence");
    if (stride < 1) throw std::invalid_argument("phi_checkpoints_csv: stride must be >= 1");
    const int m = matrices.front().rows();
    std::string out = "t,delta";
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out += ",phi_" + std::to_string(i) + "_" + std::to_string(j);
    out += "\n";
    char buf[64];
    Matrix product = matrices.front();
    for (std::size_t t = 0; t < matrices.size(); ++t) {
        if (t > 0) {
            product = matrices[t] * product;
            renormalize_rows(product);
        }
        if (t % static_cast<std::size_t>(stride) != 0 && t + 1 != matrices.size()) continue;
        std::snprintf(buf, sizeof(buf), "%zu,%.17g", t, delta_ergodicity(product));
        out += buf;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                std::snprintf(buf, sizeof(buf), ",%.17g", product(i, j));
                out += buf;
            }
        out += "\n";
    }
    return out;
}

RateFit fit_geometric_rate(std::span<const double> series, int burn_in) {
    std::vector<double> xs, ys;
    for (std::size_t i = static_cast<std::size_t>(std::max(0, burn_in)); i < series.size(); ++i) {
        if (series[i] > 1e-300) {
            xs.push_back(static_cast<double>(i));
            ys.push_back(std::log(series[i]));
        }
    }
    return linear_fit(xs, ys);
}

RateFit fit_loglog_rate(std::span<const double> series, int burn_in) {
    std::vector<double> xs, ys;
    for (std::size_t i = static_cast<std::size_t>(std::max(0, burn_in)); i < series.size(); ++i) {
        if (series[i] > 1e-300) {
            xs.push_back(std::log(static_cast<double>(i + 1)));
            ys.push_back(std::log(series[i]));
        }
    }
    return linear_fit(xs, ys);
}

}  // namespace resist
