#include "resist/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "resist/rng.hpp"

namespace resist {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

std::uint64_t tie_rank(const TieBreak& tb, int id) {
    if (tb.kind == TieBreak::Kind::smallest_id) return static_cast<std::uint64_t>(id + 1);
    return Rng::keyed(tb.seed, {label_key("tie-break"), static_cast<std::uint64_t>(id + 1)}).next_u64();
}

}  // namespace

TrimSets trim_sets(const std::vector<std::pair<int, double>>& received, int b,
                   const TieBreak& tie_break) {
    const int n = static_cast<int>(received.size());
    if (b < 0) throw std::invalid_argument("b must be >= 0");
    if (n < 2 * b) throw std::invalid_argument("trim width 2b exceeds the neighborhood size");

    struct Entry {
        double value;
        std::uint64_t rank;
        int id;
    };
    std::vector<Entry> order;
    order.reserve(received.size());
    for (const auto& [id, value] : received) order.push_back({value, tie_rank(tie_break, id), id});
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b2) {
        if (a.value != b2.value) return a.value < b2.value;
        return a.rank < b2.rank;
    });

    TrimSets sets;
    for (int i = 0; i < b; ++i) sets.lower.insert(order[i].id);
    for (int i = n - b; i < n; ++i) sets.upper.insert(order[i].id);
    for (int i = b; i < n - b; ++i) sets.center.insert(order[i].id);
    return sets;
}

std::vector<double> cwtm(const std::vector<double>& self_value,
                         const std::vector<std::pair<int, std::vector<double>>>& received, int b,
                         const TieBreak& tie_break) {
    const int n = static_cast<int>(received.size());
    if (2 * b >= n + 1)
        throw std::invalid_argument("cwtm requires b < (|received| + 1) / 2");
    check_finite(self_value, "self value");
    const std::size_t d = self_value.size();
    for (const auto& [id, v] : received) {
        (void)id;
        if (v.size() != d) throw std::invalid_argument("received vector dimension mismatch");
        check_finite(v, "received value");
    }

    std::vector<double> out(d);
    std::vector<std::pair<int, double>> coord(received.size());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < received.size(); ++i)
            coord[i] = {received[i].first, received[i].second[k]};
        TrimSets sets = trim_sets(coord, b, tie_break);
        double sum = self_value[k];
        for (const auto& [id, value] : coord)
            if (sets.center.count(id)) sum += value;
        out[k] = sum / static_cast<double>(n - 2 * b + 1);
    }
    return out;
}

std::vector<double> coordinate_median(const std::vector<double>& self_value,
                                      const std::vector<std::pair<int, std::vector<double>>>& received) {
    check_finite(self_value, "self value");
    const std::size_t d = self_value.size();
    std::vector<double> out(d);
    std::vector<double> vals(received.size() + 1);
    for (std::size_t k = 0; k < d; ++k) {
        vals.clear();
        vals.push_back(self_value[k]);
        for (const auto& [id, v] : received) {
            (void)id;
            vals.push_back(v[k]);
        }
        std::sort(vals.begin(), vals.end());
        const std::size_t n = vals.size();
        out[k] = (n % 2 == 1) ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    }
    return out;
}

namespace {

// Krum score: sum of squared distances to the `closest` nearest other
// candidates; winner is the minimal score, ties broken by candidate id
// (self carries id -1).
int krum_select(const std::vector<std::pair<int, std::vector<double>>>& candidates, int b) {
    const int n = static_cast<int>(candidates.size());
    const int closest = std::max(1, n - b - 2);
    double best_score = std::numeric_limits<double>::infinity();
    int best_index = -1;
    std::vector<double> dists;
    for (int i = 0; i < n; ++i) {
        dists.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            const auto& a = candidates[i].second;
            const auto& c = candidates[j].second;
            for (std::size_t k = 0; k < a.size(); ++k) {
                double diff = a[k] - c[k];
                d2 += diff * diff;
            }
            dists.push_back(d2);
        }
        std::sort(dists.begin(), dists.end());
        double score = 0.0;
        for (int j = 0; j < closest && j < static_cast<int>(dists.size()); ++j) score += dists[j];
        if (score < best_score ||
            (score == best_score && candidates[i].first < candidates[best_index].first)) {
            best_score = score;
            best_index = i;
        }
    }
    return best_index;
}

std::vector<std::pair<int, std::vector<double>>> with_self(
    const std::vector<double>& self_value,
    const std::vector<std::pair<int, std::vector<double>>>& received) {
    std::vector<std::pair<int, std::vector<double>>> candidates;
    candidates.reserve(received.size() + 1);
    candidates.emplace_back(-1, self_value);
    for (const auto& r : received) candidates.push_back(r);
    return candidates;
}

}  // namespace

std::vector<double> krum(const std::vector<double>& self_value,
                         const std::vector<std::pair<int, std::vector<double>>>& received, int b) {
    if (static_cast<int>(received.size()) + 1 < 2 * b + 3)
        throw std::invalid_argument("krum requires at least 2b + 3 candidates");
    check_finite(self_value, "self value");
    auto candidates = with_self(self_value, received);
    return candidates[static_cast<std::size_t>(krum_select(candidates, b))].second;
}

std::vector<double> bulyan(const std::vector<double>& self_value,
                           const std::vector<std::pair<int, std::vector<double>>>& received, int b) {
    if (static_cast<int>(received.size()) + 1 < 4 * b + 3)
        throw std::invalid_argument("bulyan requires at least 4b + 3 candidates");
    check_finite(self_value, "self value");
    auto pool = with_self(self_value, received);

    std::vector<std::pair<int, std::vector<double>>> selected;
    for (int pick = 0; pick < 2 * b + 3; ++pick) {
        int idx = krum_select(pool, b);
        selected.push_back(pool[static_cast<std::size_t>(idx)]);
        pool.erase(pool.begin() + idx);
    }

    // Coordinate-wise trimmed mean over the selection with the same trim b.
    const std::size_t d = self_value.size();
    std::vector<double> out(d);
    std::vector<double> vals(selected.size());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < selected.size(); ++i) vals[i] = selected[i].second[k];
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (std::size_t i = static_cast<std::size_t>(b); i < vals.size() - static_cast<std::size_t>(b); ++i)
            sum += vals[i];
        out[k] = sum / static_cast<double>(vals.size() - 2 * static_cast<std::size_t>(b));
    }
    return out;
}

MixingRow build_mixing_row_oracle(int node_count, int node, int coordinate, double self_value,
                                  const std::vector<std::pair<int, double>>& received,
                                  const std::set<int>& compromised_in, int b,
                                  const TieBreak& tie_break) {
    const int n_nbrs = static_cast<int>(received.size());
    if (2 * b >= n_nbrs + 1)
        throw std::invalid_argument("mixing row oracle requires b < (|received| + 1) / 2");
    if (!std::isfinite(self_value)) throw std::invalid_argument("self value must be finite");
    const double n = static_cast<double>(n_nbrs - 2 * b + 1);

    MixingRow row;
    row.node = node;
    row.coordinate = coordinate;
    row.weights.assign(static_cast<std::size_t>(node_count), 0.0);
    row.b_star = static_cast<int>(compromised_in.size());
    if (row.b_star > b)
        throw std::logic_error("mixing row oracle: compromised in-links exceed the cap b");

    TrimSets sets = trim_sets(received, b, tie_break);
    std::map<int, double> value_of;
    for (const auto& [id, v] : received) value_of[id] = v;

    for (int i : sets.center)
        if (compromised_in.count(i)) ++row.b_k;
    row.q = b - row.b_star + row.b_k;

    row.weights[static_cast<std::size_t>(node)] = 1.0 / n;

    if (row.q == 0) {
        // All center links are honest and the trim budget is exhausted:
        // uniform weights on self plus the center.
        for (int i : sets.center) row.weights[static_cast<std::size_t>(i)] = 1.0 / n;
        return row;
    }

    if (sets.center.empty()) return row;  // nothing to route; the row is just self

    // Honest routing anchors. The q most extreme uncompromised members of
    // the upper set (largest value first, smallest id on ties) are paired
    // with the q most extreme uncompromised members of the lower set. There
    // are always at least q of each when q > 0: an all-compromised upper set
    // would force b_star = b and b_k = 0, i.e. q = 0.
    std::vector<int> honest_upper, honest_lower;
    for (int i : sets.upper)
        if (!compromised_in.count(i)) honest_upper.push_back(i);
    for (int i : sets.lower)
        if (!compromised_in.count(i)) honest_lower.push_back(i);
    std::sort(honest_upper.begin(), honest_upper.end(), [&](int a, int b2) {
        if (value_of[a] != value_of[b2]) return value_of[a] > value_of[b2];
        return a < b2;
    });
    std::sort(honest_lower.begin(), honest_lower.end(), [&](int a, int b2) {
        if (value_of[a] != value_of[b2]) return value_of[a] < value_of[b2];
        return a < b2;
    });
    if (static_cast<int>(honest_upper.size()) < row.q ||
        static_cast<int>(honest_lower.size()) < row.q)
        throw std::logic_error("mixing row oracle: fewer honest extreme nodes than q");
    honest_upper.resize(static_cast<std::size_t>(row.q));
    honest_lower.resize(static_cast<std::size_t>(row.q));
    row.upper_anchors = honest_upper;
    row.lower_anchors = honest_lower;

    // Every center value v satisfies lo_r <= v <= hi_r against each anchor
    // pair, so v = theta*hi_r + (1-theta)*lo_r with theta in [0, 1]. Honest
    // center members keep half of their 1/n mass directly and route the
    // other half; compromised members route all of it. The mass is split
    // equally over the q disjoint pairs, which both reproduces the trimmed
    // mean exactly and leaves each pair's heavier side with at least
    // 1/(4nq) >= beta, giving the row q non-trivial entries beyond self and
    // the honest center.
    for (int i : sets.center) {
        double routed;
        if (compromised_in.count(i)) {
            routed = 1.0 / n;
        } else {
            row.weights[static_cast<std::size_t>(i)] += 1.0 / (2.0 * n);
            routed = 1.0 / (2.0 * n);
        }
        const double share = routed / static_cast<double>(row.q);
        for (int r = 0; r < row.q; ++r) {
            const double hi = value_of[honest_upper[static_cast<std::size_t>(r)]];
            const double lo = value_of[honest_lower[static_cast<std::size_t>(r)]];
            double theta;
            if (hi == lo) {
                theta = 0.5;
            } else {
                theta = (value_of[i] - lo) / (hi - lo);
                theta = std::min(1.0 - 1e-15, std::max(1e-15, theta));
            }
            if (r == 0) row.thetas.emplace_back(i, theta);
            row.weights[static_cast<std::size_t>(honest_upper[static_cast<std::size_t>(r)])] +=
                share * theta;
            row.weights[static_cast<std::size_t>(honest_lower[static_cast<std::size_t>(r)])] +=
                share * (1.0 - theta);
        }
    }
    return row;
}

Matrix build_mixing_matrix(const DirectedGraph& g, const std::vector<double>& true_values,
                           const std::map<Edge, double>& corrupted, int b, int coordinate,
                           const TieBreak& tie_break, std::vector<MixingRow>* rows_out) {
    const int m = g.node_count();
    if (static_cast<int>(true_values.size()) != m)
        throw std::invalid_argument("true_values must have one entry per node");
    Matrix y(m, m);
    if (rows_out) rows_out->clear();
    for (int j = 0; j < m; ++j) {
        std::vector<std::pair<int, double>> received;
        std::set<int> compromised_in;
        for (int i : g.in_neighbors(j)) {
            auto it = corrupted.find({i, j});
            if (it != corrupted.end()) {
                received.emplace_back(i, it->second);
                compromised_in.insert(i);
            } else {
                received.emplace_back(i, true_values[static_cast<std::size_t>(i)]);
            }
        }
        MixingRow row = build_mixing_row_oracle(m, j, coordinate,
                                                true_values[static_cast<std::size_t>(j)], received,
                                                compromised_in, b, tie_break);
        for (int i = 0; i < m; ++i) y(j, i) = row.weights[static_cast<std::size_t>(i)];
        if (rows_out) rows_out->push_back(std::move(row));
    }
    return y;
}

}  // namespace resist
