#pragma once

#include <knncp/edge_stats.hpp>
#include <knncp/knn_graph.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace knncp {

/// N^(1..24): counts of ordered edge triples (with replacement) in each of the
/// 24 configurations listed in edge_configurations.hpp, plus the sums over
/// pair sets G^(2), G^(3), G^(5) they are assembled from.
struct TripleConfigCounts {
    std::array<std::int64_t, 24> counts{};
    std::int64_t mutual_in_degree_sum = 0; // sum over G^(2) of |D_i| + |D_j| - 2
    std::int64_t path_closing_cycles = 0;  // sum over G^(3) of 1{(v,i) in G}
    std::int64_t path_shortcuts = 0;       // sum over G^(3) of 1{(i,v) in G}
    std::int64_t path_end_in_degree = 0;   // sum over G^(3) of |D_v| - 1
    std::int64_t out_star_in_degree = 0;   // sum over G^(5) of |D_i|

    std::int64_t operator[](int l) const { return counts[static_cast<std::size_t>(l - 1)]; }
};

/// O(nk^2). Throws IntegerOverflow if (nk)^3 or an intermediate exceeds 64 bits.
TripleConfigCounts triple_config_counts(const DirectedKnnGraph& g, const PairConfigCounts& pairs);

/// Raw permutation-null moments E[R1^a R2^b], a + b <= 3, at time t.
struct RawMoments {
    long double m10 = 0, m01 = 0;
    long double m20 = 0, m11 = 0, m02 = 0;
    long double m30 = 0, m21 = 0, m12 = 0, m03 = 0;
};

RawMoments raw_moments(const PairConfigCounts& pairs, const TripleConfigCounts& triples,
                       std::size_t n, std::size_t t);

/// gamma_w = E[Z_w^3], gamma_diff = E[Z_diff^3] at time t.
struct Skewness {
    double gamma_w = 0;
    double gamma_diff = 0;
};

/// Throws DegenerateVariance when either standardizing variance vanishes.
Skewness third_moments(const TripleConfigCounts& triples, const PairConfigCounts& pairs,
                       std::size_t n, std::size_t t);

double normal_pdf(double x);
double normal_cdf(double x);

/// nu(x) = (2/x)(Phi(x/2) - 0.5) / ((x/2) Phi(x/2) + phi(x/2)), with nu(0) = 1.
double nu(double x);

/// Derivatives at s -> t- of the limiting covariance functions of Z_w and Z_diff.
struct CFunctions {
    double c_w = 0;
    double c_diff = 0;
};

/// Throws DegenerateDenominator at t = 1 and t = n - 1.
CFunctions c_functions(std::size_t n, std::size_t t);

/// S_j(t) for threshold b and skewness gamma. Returns false (leaving
/// `value` at 1) when 1 + 2 b gamma <= 0, where the correction is undefined.
bool skewness_correction(double b, double gamma, double& value);

/// Per-t quantities of the tail approximation over a window, computed once
/// per graph and reused for every threshold b.
class TailContext {
public:
    TailContext(const PairConfigCounts& pairs, const TripleConfigCounts& triples, ScanWindow window);

    /// Same, with skewness forced to zero (uncorrected Gaussian-process approximation).
    static TailContext without_skewness(const PairConfigCounts& pairs, ScanWindow window);

    struct Point {
        std::size_t t = 0;
        CFunctions c;
        Skewness gamma;
        bool usable_w = false;
        bool usable_diff = false;
    };

    std::size_t n() const noexcept { return n_; }
    ScanWindow window() const noexcept { return window_; }
    const std::vector<Point>& points() const noexcept { return points_; }

private:
    TailContext(std::size_t n, ScanWindow window) : n_(n), window_(window) {}

    std::size_t n_;
    ScanWindow window_;
    std::vector<Point> points_;
};

struct TailApproximation {
    double b = 0;
    double p_w = 0;
    double p_diff = 0;
    double p_m = 0;
    /// Window points dropped from the sum (degenerate C(t)).
    std::size_t skipped_t = 0;
    /// Points where the skewness correction was replaced by 1.
    std::size_t flagged_w = 0;
    std::size_t flagged_diff = 0;
};

/// pr(max M(t) > b) ~ 1 - (1 - p_w)(1 - p_diff), each component a unit-step
/// sum over the window and clamped to [0, 1].
TailApproximation tail_probability(const TailContext& ctx, double b);

/// Threshold b* with tail_probability(b*) = alpha, by bisection on [1, 10]
/// (widened once to [0.1, 20]). Throws NoRoot when alpha is not bracketed.
double critical_value(const TailContext& ctx, double alpha);

} // namespace knncp
