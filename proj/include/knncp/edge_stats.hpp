#pragma once

#include <knncp/knn_graph.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace knncp {

/// R_{G,1}(t) and R_{G,2}(t) for t = 1..n-1: edges with both endpoints at
/// times <= t, and with both endpoints at times > t.
struct EdgeCountProfile {
    std::size_t n = 0;
    std::vector<std::int64_t> r1; // r1[t-1]
    std::vector<std::int64_t> r2;

    std::int64_t within_before(std::size_t t) const { return r1[t - 1]; }
    std::int64_t within_after(std::size_t t) const { return r2[t - 1]; }
};

/// Profile under the identity ordering (node i observed at time i + 1).
EdgeCountProfile edge_count_profile(const DirectedKnnGraph& g);

/// Profile when node i is observed at time time_of_node[i] + 1. O(nk).
EdgeCountProfile edge_count_profile(const DirectedKnnGraph& g, std::span<const NodeId> time_of_node);

/// Counts of the seven configurations of an ordered pair of edges
/// ((i,j), (u,v)) drawn with replacement: 1 same edge, 2 reversed edge,
/// 3 j == u, 4 v == i, 5 common source, 6 common target, 7 disjoint.
struct PairConfigCounts {
    std::size_t n = 0;
    std::size_t k = 0;
    std::array<std::int64_t, 7> c{};

    std::int64_t operator[](int m) const { return c[static_cast<std::size_t>(m - 1)]; }
    std::int64_t d1() const { return c[0] + c[1]; }
    std::int64_t d2() const { return c[2] + c[3] + c[4] + c[5]; }
    std::int64_t d3() const { return c[6]; }
    std::int64_t edges() const { return static_cast<std::int64_t>(n * k); }
};

/// O(nk) from the in-degree lists.
PairConfigCounts pair_config_counts(const DirectedKnnGraph& g);

/// Fractions of the permutation null: probabilities that 2, 3 or 4 given
/// nodes all fall before t (p), all after t (q), or a pair on each side (r).
struct NullFractions {
    long double p1, p2, p3, q1, q2, q3, r;
};

NullFractions null_fractions(std::size_t n, std::size_t t);

/// Permutation-null moments of (R_{G,1}(t), R_{G,2}(t)).
struct MomentRow {
    long double mean1 = 0;
    long double mean2 = 0;
    long double var1 = 0;
    long double var2 = 0;
    long double cov12 = 0;
    long double second1 = 0; // E[R1^2]
    long double second2 = 0; // E[R2^2]
};

MomentRow null_moments(const PairConfigCounts& counts, std::size_t n, std::size_t t);

/// Scan window [n0, n1] of candidate change times (1-based, inclusive).
struct ScanWindow {
    std::size_t n0 = 0;
    std::size_t n1 = 0;

    bool empty() const noexcept { return n0 > n1; }
    std::size_t size() const noexcept { return empty() ? 0 : n1 - n0 + 1; }
};

/// n0 = ceil(0.05 n), n1 = n - n0.
ScanWindow default_window(std::size_t n);

/// Throws InvalidArgument unless 1 <= n0 <= n1 <= n - 1.
void validate_window(const ScanWindow& window, std::size_t n);

/// Weights and null moments needed to standardize R_w and R_diff over a
/// window. Throws DegenerateVariance at the first t where either variance
/// vanishes (relative to the raw second moments, threshold 1e-12).
class MomentTable {
public:
    struct Entry {
        MomentRow moments;
        double weight1 = 0; // R_w = weight1 * R1 + weight2 * R2
        double weight2 = 0;
        double mean_w = 0;
        double sd_w = 0;
        double mean_diff = 0;
        double sd_diff = 0;
    };

    MomentTable(const PairConfigCounts& counts, ScanWindow window);

    std::size_t n() const noexcept { return n_; }
    ScanWindow window() const noexcept { return window_; }
    const Entry& at(std::size_t t) const { return entries_[t - window_.n0]; }

    double z_w(std::size_t t, std::int64_t r1, std::int64_t r2) const {
        const Entry& e = at(t);
        return (e.weight1 * static_cast<double>(r1) + e.weight2 * static_cast<double>(r2) - e.mean_w) /
               e.sd_w;
    }
    double z_diff(std::size_t t, std::int64_t r1, std::int64_t r2) const {
        const Entry& e = at(t);
        return (static_cast<double>(r1 - r2) - e.mean_diff) / e.sd_diff;
    }

private:
    std::size_t n_;
    ScanWindow window_;
    std::vector<Entry> entries_;
};

inline constexpr double kDegenerateVarianceThreshold = 1e-12;

/// Standardized processes over the window, with M(t) = max(Z_w, |Z_diff|).
struct ScanProcesses {
    ScanWindow window;
    std::vector<double> z_w; // index t - n0
    std::vector<double> z_diff;
    std::vector<double> m;
    std::size_t tau_hat = 0; // argmax of m, smallest t on ties
    double max_stat = 0;
};

ScanProcesses scan_processes(const EdgeCountProfile& profile, const MomentTable& moments);

/// max_{n0<=t<=n1} M(t) without materializing the processes.
double scan_maximum(const EdgeCountProfile& profile, const MomentTable& moments);

} // namespace knncp
