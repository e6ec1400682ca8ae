#include <knncp/permutation.hpp>

#include <knncp/errors.hpp>
#include <knncp/parallel.hpp>
#include <knncp/random.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace knncp {

std::vector<NodeId> random_time_labels(std::size_t n, std::mt19937_64& engine) {
    std::vector<NodeId> labels(n);
    std::iota(labels.begin(), labels.end(), NodeId{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(engine, i));
        std::swap(labels[i - 1], labels[j]);
    }
    return labels;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::size_t replicate) {
    return stream_engine(seed, replicate, 0x5045524du); // "PERM"
}

std::vector<double> permutation_maxima(const DirectedKnnGraph& g, const MomentTable& moments,
                                       const PermutationPlan& plan) {
    if (plan.replicates == 0) {
        throw InvalidArgument("permutation replicates must be >= 1");
    }
    std::vector<double> maxima(plan.replicates);
    parallel_for(
        plan.replicates,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                auto engine = replicate_engine(plan.seed, r);
                const auto labels = random_time_labels(g.n(), engine);
                maxima[r] = scan_maximum(edge_count_profile(g, labels), moments);
            }
        },
        plan.workers);
    return maxima;
}

std::vector<double> permutation_maxima(const DirectedKnnGraph& g, const PermutationPlan& plan) {
    const MomentTable moments(pair_config_counts(g), plan.window);
    return permutation_maxima(g, moments, plan);
}

PermutationPValue pvalue_from_maxima(const std::vector<double>& maxima, double observed_max) {
    PermutationPValue out;
    out.replicates = maxima.size();
    out.exceedances = static_cast<std::size_t>(
        std::count_if(maxima.begin(), maxima.end(), [&](double m) { return m >= observed_max; }));
    const auto b = static_cast<double>(out.replicates);
    out.p = (1.0 + static_cast<double>(out.exceedances)) / (b + 1.0);
    out.se = std::sqrt(out.p * (1.0 - out.p) / b);
    return out;
}

double quantile_from_maxima(std::vector<double> maxima, double alpha) {
    if (maxima.empty()) {
        throw InvalidArgument("no replicate maxima");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    const std::size_t b = maxima.size();
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(b + 1) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, b);
    std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(rank - 1), maxima.end());
    return maxima[rank - 1];
}

PermutationPValue permutation_pvalue(const DirectedKnnGraph& g, double observed_max,
                                     const PermutationPlan& plan) {
    return pvalue_from_maxima(permutation_maxima(g, plan), observed_max);
}

double permutation_critical_value(const DirectedKnnGraph& g, double alpha, const PermutationPlan& plan) {
    return quantile_from_maxima(permutation_maxima(g, plan), alpha);
}

} // namespace knncp
