#include "resist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace resist {

double compute_xi5(const Matrix& w, int coordinate) {
    const int m = w.rows();
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += w(i, coordinate);
    mean /= m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = w(i, coordinate) - mean;
        s += r * r;
    }
    return std::sqrt(s);
}

double compute_xi1(const Matrix& w, const std::vector<double>& chat, int coordinate) {
    const int m = w.rows();
    double weighted = 0.0;
    for (int i = 0; i < m; ++i) weighted += chat[static_cast<std::size_t>(i)] * w(i, coordinate);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = w(i, coordinate) - weighted;
        s += r * r;
    }
    return std::sqrt(s);
}

std::vector<double> compute_what(const Matrix& w,
                                 const std::vector<std::vector<double>>& chat_per_coordinate) {
    const int d = w.cols();
    if (static_cast<int>(chat_per_coordinate.size()) != d)
        throw std::invalid_argument("compute_what: one chat vector per coordinate required");
    std::vector<double> what(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < d; ++k) {
        double v = 0.0;
        for (int i = 0; i < w.rows(); ++i)
            v += chat_per_coordinate[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * w(i, k);
        what[static_cast<std::size_t>(k)] = v;
    }
    return what;
}

double compute_xi6(const std::vector<double>& what, const std::vector<double>& wstar) {
    return norm2(vsub(wstar, what));
}

double compute_delta(const std::vector<LocalObjective>& objectives,
                     const std::vector<double>& wstar) {
    double delta = 0.0;
    for (const auto& o : objectives) {
        CentralizedSolution local = centralized_solve({o});
        delta += norm2(vsub(wstar, local.w));
    }
    return delta;
}

std::vector<std::vector<Matrix>> block_products(const Trajectory& trajectory) {
    if (trajectory.rounds.empty() || trajectory.rounds.front().mixing.empty())
        throw std::invalid_argument("block_products: trajectory has no recorded mixing matrices");
    const int d = static_cast<int>(trajectory.rounds.front().mixing.size());
    const int j_param = trajectory.j_param;

    std::vector<std::vector<Matrix>> blocks;  // blocks[s][k]
    std::vector<Matrix> current;
    int current_block = -1;
    for (const auto& round : trajectory.rounds) {
        const int block = round.t / j_param;
        if (block != current_block) {
            if (current_block >= 0) blocks.push_back(std::move(current));
            current.assign(round.mixing.begin(), round.mixing.end());
            current_block = block;
        } else {
            for (int k = 0; k < d; ++k) {
                current[static_cast<std::size_t>(k)] =
                    round.mixing[static_cast<std::size_t>(k)] * current[static_cast<std::size_t>(k)];
            }
        }
    }
    if (current_block >= 0) blocks.push_back(std::move(current));
    return blocks;
}

namespace {

struct ChatTable {
    // chat[s][k] for s = 0..S; converged[s] marks anchor-backed entries.
    std::vector<std::vector<std::vector<double>>> chat;
    std::vector<bool> converged;
};

// Consensus vectors per gradient step. Anchor where the tail product has
// contracted below tol, then recurse downward with chat(s) = Q(s)^T chat(s+1).
ChatTable build_chat_table(const std::vector<std::vector<Matrix>>& blocks, int s_count, int m,
                           double tol) {
    const int d = blocks.empty() ? 0 : static_cast<int>(blocks.front().size());
    const int n_blocks = static_cast<int>(blocks.size());

    ChatTable table;
    table.chat.assign(static_cast<std::size_t>(s_count),
                      std::vector<std::vector<double>>(
                          static_cast<std::size_t>(d),
                          std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)));
    table.converged.assign(static_cast<std::size_t>(s_count), false);
    if (n_blocks == 0) return table;

    // Find the latest anchor: the smallest tail window (ending at the last
    // block) whose product has delta < tol, per coordinate; the anchor index
    // is the max over coordinates rendered common for simplicity.
    int anchor = -1;
    bool anchored = false;
    std::vector<std::vector<double>> anchor_chat(static_cast<std::size_t>(d));
    {
        std::vector<Matrix> tail(static_cast<std::size_t>(d));
        std::vector<bool> done(static_cast<std::size_t>(d), false);
        std::vector<int> anchor_k(static_cast<std::size_t>(d), -1);
        for (int s = n_blocks - 1; s >= 0; --s) {
            bool all_done = true;
            for (int k = 0; k < d; ++k) {
                if (done[static_cast<std::size_t>(k)]) continue;
                Matrix& t = tail[static_cast<std::size_t>(k)];
                const Matrix& q = blocks[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
                t = (s == n_blocks - 1) ? q : t * q;
                if (delta_ergodicity(t) < tol) {
                    done[static_cast<std::size_t>(k)] = true;
                    anchor_k[static_cast<std::size_t>(k)] = s;
                    std::vector<double>& c = anchor_chat[static_cast<std::size_t>(k)];
                    c.assign(static_cast<std::size_t>(m), 0.0);
                    for (int col = 0; col < m; ++col) {
                        double avg = 0.0;
                        for (int row = 0; row < m; ++row) avg += t(row, col);
                        c[static_cast<std::size_t>(col)] = avg / m;
                    }
                } else {
                    all_done = false;
                }
            }
            if (all_done) {
                anchor = s;
                break;
            }
        }
        anchored = anchor >= 0;
        if (!anchored) {
            // The whole recording never contracted below tol; coordinates
            // that never anchored fall back to the full product from block 0
            // as a truncated estimate.
            for (int k = 0; k < d; ++k) {
                if (done[static_cast<std::size_t>(k)]) {
                    for (int s = anchor_k[static_cast<std::size_t>(k)] - 1; s >= 0; --s)
                        anchor_chat[static_cast<std::size_t>(k)] = vec_mat(
                            anchor_chat[static_cast<std::size_t>(k)],
                            blocks[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)]);
                    continue;
                }
                const Matrix& t = tail[static_cast<std::size_t>(k)];
                std::vector<double> c(static_cast<std::size_t>(m), 1.0 / m);
                if (t.rows() == m) {
                    for (int col = 0; col < m; ++col) {
                        double avg = 0.0;
                        for (int row = 0; row < m; ++row) avg += t(row, col);
                        c[static_cast<std::size_t>(col)] = avg / m;
                    }
                }
                anchor_chat[static_cast<std::size_t>(k)] = std::move(c);
            }
            anchor = 0;
        } else {
            // Coordinates may have anchored later than `anchor`; bring each
            // one down to the common anchor by the downward recursion.
            for (int k = 0; k < d; ++k) {
                for (int s = anchor_k[static_cast<std::size_t>(k)] - 1; s >= anchor; --s) {
                    anchor_chat[static_cast<std::size_t>(k)] = vec_mat(
                        anchor_chat[static_cast<std::size_t>(k)],
                        blocks[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)]);
                }
            }
        }
    }

    // Fill s <= anchor by downward recursion, s > anchor by truncated tails.
    std::vector<std::vector<double>> cur = anchor_chat;
    for (int s = anchor; s >= 0; --s) {
        if (s < s_count) {
            table.chat[static_cast<std::size_t>(s)] = cur;
            table.converged[static_cast<std::size_t>(s)] = anchored;
        }
        if (s > 0) {
            for (int k = 0; k < d; ++k)
                cur[static_cast<std::size_t>(k)] = vec_mat(
                    cur[static_cast<std::size_t>(k)],
                    blocks[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(k)]);
        }
    }
    for (int s = anchor + 1; s < s_count; ++s) {
        if (s >= n_blocks) {
            // No tail at all; keep uniform and flag unconverged.
            continue;
        }
        std::vector<Matrix> tail(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            Matrix t = blocks[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
            for (int i = s + 1; i < n_blocks; ++i)
                t = blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * t;
            std::vector<double> c(static_cast<std::size_t>(m), 0.0);
            for (int col = 0; col < m; ++col) {
                double avg = 0.0;
                for (int row = 0; row < m; ++row) avg += t(row, col);
                c[static_cast<std::size_t>(col)] = avg / m;
            }
            table.chat[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] = std::move(c);
        }
    }
    return table;
}

}  // namespace

MetricsLog compute_metrics(const Trajectory& trajectory,
                           const std::vector<LocalObjective>& objectives,
                           const MetricsOptions& options) {
    MetricsLog log;
    const int m = trajectory.s_snapshots.front().rows();
    const int d = trajectory.s_snapshots.front().cols();

    if (options.wstar) {
        log.wstar = *options.wstar;
        log.fstar = options.fstar.value_or(0.0);
    } else {
        CentralizedSolution sol = centralized_solve(objectives);
        log.wstar = sol.w;
        log.fstar = options.fstar.value_or(sol.value);
    }
    log.heterogeneity.delta = compute_delta(objectives, log.wstar);

    const int s_count = static_cast<int>(trajectory.s_snapshots.size());
    const bool has_mixing =
        !trajectory.rounds.empty() && !trajectory.rounds.front().mixing.empty();
    ChatTable chat;
    if (has_mixing) {
        chat = build_chat_table(block_products(trajectory), s_count, m, options.chat_tol);
    } else {
        // No mixing record (median/krum/bulyan rules): fall back to uniform
        // weights, under which what is the plain average and xi1 = xi5.
        chat.chat.assign(static_cast<std::size_t>(s_count),
                         std::vector<std::vector<double>>(
                             static_cast<std::size_t>(d),
                             std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)));
        chat.converged.assign(static_cast<std::size_t>(s_count), true);
    }

    auto avg_grad = [&](const std::vector<double>& w) {
        std::vector<double> g(w.size(), 0.0);
        for (const auto& o : objectives) {
            std::vector<double> gi = o.grad(w);
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
        }
        for (double& v : g) v /= static_cast<double>(objectives.size());
        return g;
    };
    auto avg_value = [&](const std::vector<double>& w) {
        double s = 0.0;
        for (const auto& o : objectives) s += o.eval(w);
        return s / static_cast<double>(objectives.size());
    };

    double min_gradnorm2 = std::numeric_limits<double>::infinity();
    double c0 = 0.0;
    const Matrix wstar_stack = [&] {
        Matrix ws(m, d);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < d; ++k) ws(i, k) = log.wstar[static_cast<std::size_t>(k)];
        return ws;
    }();

    for (int s = 0; s < s_count; ++s) {
        const Matrix& w = trajectory.s_snapshots[static_cast<std::size_t>(s)];
        MetricsRow row;
        row.s = s;
        row.t = s == 0 ? 0 : trajectory.s_to_t[static_cast<std::size_t>(s - 1)] + 1;
        row.chat_converged = chat.converged[static_cast<std::size_t>(s)];

        const auto& chat_s = chat.chat[static_cast<std::size_t>(s)];
        row.what = compute_what(w, chat_s);
        for (int k = 0; k < d; ++k) {
            row.xi1.push_back(compute_xi1(w, chat_s[static_cast<std::size_t>(k)], k));
            row.xi5.push_back(compute_xi5(w, k));
        }
        row.xi1_max = *std::max_element(row.xi1.begin(), row.xi1.end());
        row.xi5_max = *std::max_element(row.xi5.begin(), row.xi5.end());
        row.xi6 = compute_xi6(row.what, log.wstar);

        row.fgap = avg_value(row.what) - log.fstar;
        const std::vector<double> g = avg_grad(row.what);
        row.gradnorm2 = dot(g, g);
        min_gradnorm2 = std::min(min_gradnorm2, row.gradnorm2);
        row.min_gradnorm2 = min_gradnorm2;

        // Frobenius triplet.
        {
            Matrix wbar(m, d);
            for (int k = 0; k < d; ++k) {
                double mean = 0.0;
                for (int i = 0; i < m; ++i) mean += w(i, k);
                mean /= m;
                for (int i = 0; i < m; ++i) wbar(i, k) = w(i, k) - mean;
            }
            row.frob_consensus = wbar.frobenius_norm();
            Matrix diff_opt(m, d), diff_inexact(m, d);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < d; ++k) {
                    diff_opt(i, k) = wstar_stack(i, k) - row.what[static_cast<std::size_t>(k)];
                    diff_inexact(i, k) = w(i, k) - row.what[static_cast<std::size_t>(k)];
                }
            row.frob_opt = diff_opt.frobenius_norm();
            row.frob_inexact = diff_inexact.frobenius_norm();
            row.frob_triplet = row.frob_consensus + row.frob_opt + row.frob_inexact;
        }

        // C0 term: coordinate-wise gap between the exact-average gradient and
        // the chat(s+1)-weighted gradient, both at what(s).
        if (s + 1 < static_cast<int>(chat.chat.size()) &&
            chat.converged[static_cast<std::size_t>(s + 1)]) {
            const auto& chat_next = chat.chat[static_cast<std::size_t>(s + 1)];
            std::vector<std::vector<double>> local_grads;
            local_grads.reserve(objectives.size());
            for (const auto& o : objectives) local_grads.push_back(o.grad(row.what));
            double gamma = 0.0;
            for (int k = 0; k < d; ++k) {
                double exact = 0.0, weighted = 0.0;
                for (int i = 0; i < m; ++i) {
                    exact += local_grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                    weighted += chat_next[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                                local_grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                }
                exact /= m;
                gamma += std::abs(exact - weighted);
            }
            c0 = std::max(c0, gamma);
        }

        if (options.compute_optional_xi) {
            // Tracker T(s) is the stacked local-gradient matrix at W(s).
            Matrix tracker(m, d);
            for (int i = 0; i < m; ++i) {
                const std::vector<double> gi = objectives[static_cast<std::size_t>(i)].grad(w.row(i));
                for (int k = 0; k < d; ++k) tracker(i, k) = gi[static_cast<std::size_t>(k)];
            }
            for (int k = 0; k < d; ++k) {
                row.xi2.push_back(compute_xi1(tracker, chat_s[static_cast<std::size_t>(k)], k));
                row.xi3.push_back([&] {
                    // || 1 chat^T W_k - (1 1^T / M) W_k ||
                    double weighted = 0.0, mean = 0.0;
                    for (int i = 0; i < m; ++i) {
                        weighted += chat_s[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                                    w(i, k);
                        mean += w(i, k);
                    }
                    mean /= m;
                    return std::sqrt(static_cast<double>(m)) * std::abs(weighted - mean);
                }());
                row.xi4.push_back([&] {
                    // || 1 chat^T T_k - (1 1^T / M) T_k ||
                    double weighted = 0.0, mean = 0.0;
                    for (int i = 0; i < m; ++i) {
                        weighted += chat_s[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                                    tracker(i, k);
                        mean += tracker(i, k);
                    }
                    mean /= m;
                    return std::sqrt(static_cast<double>(m)) * std::abs(weighted - mean);
                }());
            }
        }

        log.rows.push_back(std::move(row));
    }
    log.heterogeneity.c0_estimate = c0;
    return log;
}

std::vector<double> MetricsLog::series_xi6() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.xi6);
    return v;
}

std::vector<double> MetricsLog::series_fgap() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.fgap);
    return v;
}

std::vector<double> MetricsLog::series_xi1_max() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.xi1_max);
    return v;
}

std::vector<double> MetricsLog::series_min_gradnorm2() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.min_gradnorm2);
    return v;
}

std::string metrics_csv(const MetricsLog& log) {
    std::ostringstream out;
    out << "s,t,xi1_max,xi5_max,xi6,fgap,gradnorm2,min_gradnorm2,frob_triplet\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (const auto& r : log.rows) {
        out << r.s << "," << r.t << ",";
        put(r.xi1_max);
        out << ",";
        put(r.xi5_max);
        out << ",";
        put(r.xi6);
        out << ",";
        put(r.fgap);
        out << ",";
        put(r.gradnorm2);
        out << ",";
        put(r.min_gradnorm2);
        out << ",";
        put(r.frob_triplet);
        out << "\n";
    }
    return out.str();
}

}  // namespace resist
