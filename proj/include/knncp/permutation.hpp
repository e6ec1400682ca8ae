#pragma once

#include <knncp/edge_stats.hpp>
#include <knncp/knn_graph.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace knncp {

struct PermutationPlan {
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    ScanWindow window;
    std::size_t workers = 0;
};

struct PermutationPValue {
    double p = 1.0;
    double se = 0.0;
    std::size_t exceedances = 0;
    std::size_t replicates = 0;
};

/// Uniform random time labelling of n nodes (Fisher-Yates).
std::vector<NodeId> random_time_labels(std::size_t n, std::mt19937_64& engine);

/// Engine of replicate r: seeded from (plan seed, r), independent of scheduling.
std::mt19937_64 replicate_engine(std::uint64_t seed, std::size_t replicate);

/// max M(t) over the window for each replicate, in replicate order.
std::vector<double> permutation_maxima(const DirectedKnnGraph& g, const MomentTable& moments,
                                       const PermutationPlan& plan);
std::vector<double> permutation_maxima(const DirectedKnnGraph& g, const PermutationPlan& plan);

/// (1 + #{max >= observed}) / (B + 1), with se = sqrt(p (1 - p) / B).
PermutationPValue pvalue_from_maxima(const std::vector<double>& maxima, double observed_max);

/// Order statistic at rank ceil((1 - alpha)(B + 1)), clamped to [1, B].
double quantile_from_maxima(std::vector<double> maxima, double alpha);

PermutationPValue permutation_pvalue(const DirectedKnnGraph& g, double observed_max,
                                     const PermutationPlan& plan);

double permutation_critical_value(const DirectedKnnGraph& g, double alpha, const PermutationPlan& plan);

} // namespace knncp
