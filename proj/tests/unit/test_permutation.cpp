#include <doctest.h>

#include "oracles.hpp"

#include <knncp/edge_configurations.hpp>
#include <knncp/permutation.hpp>
#include <knncp/random.hpp>

#include <limits>
#include <set>

using namespace knncp;

namespace {

DirectedKnnGraph gaussian_graph(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed) {
    auto eng = stream_engine(seed, 0);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (double& x : v) {
        x = g(eng);
    }
    return build_graph(DataMatrix(n, d, v), k);
}

} // namespace

TEST_SUITE("permutation") {

TEST_CASE("Fisher-Yates gives a permutation and is uniform on 3 labels") {
    std::array<int, 6> hits{};
    for (std::size_t r = 0; r < 60000; ++r) {
        auto eng = replicate_engine(1, r);
        const auto labels = random_time_labels(3, eng);
        const int code = static_cast<int>(labels[0] * 2 + (labels[1] > labels[2]));
        ++hits[static_cast<std::size_t>(code)];
    }
    for (int h : hits) {
        CHECK(std::abs(h - 10000) < 400); // > 4 SE
    }
    auto eng = replicate_engine(9, 0);
    const auto big = random_time_labels(1000, eng);
    CHECK(std::set<NodeId>(big.begin(), big.end()).size() == 1000);
}

TEST_CASE("observed max above every replicate gives 1 / (B + 1)") {
    const auto g = gaussian_graph(80, 3, 3, 1);
    PermutationPlan plan;
    plan.replicates = 199;
    plan.window = default_window(80);
    const auto pv = permutation_pvalue(g, std::numeric_limits<double>::infinity(), plan);
    CHECK(pv.p == doctest::Approx(1.0 / 200));
    CHECK(pv.exceedances == 0);
    CHECK(pv.se == doctest::Approx(std::sqrt(pv.p * (1 - pv.p) / 199)));
}

TEST_CASE("fixed seed reproduces bit-identical results, also across worker counts") {
    const auto g = gaussian_graph(150, 4, 3, 2);
    PermutationPlan plan;
    plan.replicates = 300;
    plan.seed = 42;
    plan.window = default_window(150);
    plan.workers = 1;
    const auto a = permutation_maxima(g, plan);
    plan.workers = 4;
    const auto b = permutation_maxima(g, plan);
    CHECK(a == b);
    CHECK(permutation_pvalue(g, 2.5, plan).p == permutation_pvalue(g, 2.5, plan).p);
    plan.seed = 43;
    CHECK(permutation_maxima(g, plan) != a);
}

TEST_CASE("replicate maxima equal a naive recomputation") {
    const auto g = gaussian_graph(70, 3, 4, 3);
    const ScanWindow w = default_window(70);
    const MomentTable table(pair_config_counts(g), w);
    PermutationPlan plan;
    plan.replicates = 10;
    plan.seed = 7;
    plan.window = w;
    const auto maxima = permutation_maxima(g, table, plan);
    for (std::size_t r = 0; r < 10; ++r) {
        auto eng = replicate_engine(7, r);
        const auto labels = random_time_labels(70, eng);
        const auto [r1, r2] = oracle::naive_profile(70, g.edges(), labels);
        double best = -1e300;
        for (std::size_t t = w.n0; t <= w.n1; ++t) {
            best = std::max({best, table.z_w(t, r1[t - 1], r2[t - 1]), std::abs(table.z_diff(t, r1[t - 1], r2[t - 1]))});
        }
        CHECK(maxima[r] == best);
    }
}

TEST_CASE("quantile convention") {
    std::vector<double> m(999);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = static_cast<double>(998 - i);
    }
    CHECK(quantile_from_maxima(m, 0.5) == 499.0); // median
    CHECK(quantile_from_maxima(m, 0.05) == 949.0); // rank ceil(0.95 * 1000) = 950
    CHECK(quantile_from_maxima({1.0, 2.0}, 0.001) == 2.0);
}

TEST_CASE("two disjoint seeds with B = 10000 give quantiles within 0.05") {
    const auto g = gaussian_graph(300, 5, 3, 4);
    PermutationPlan plan;
    plan.replicates = 10000;
    plan.window = default_window(300);
    plan.seed = 1;
    const double a = permutation_critical_value(g, 0.05, plan);
    plan.seed = 2;
    const double b = permutation_critical_value(g, 0.05, plan);
    CHECK(std::abs(a - b) < 0.05);
}

TEST_CASE("permutation test holds its level on homogeneous data") {
    const std::size_t runs = 600;
    std::size_t rej10 = 0, rej05 = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        const auto g = gaussian_graph(60, 3, 3, 1000 + r);
        const ScanWindow w = default_window(60);
        const MomentTable table(pair_config_counts(g), w);
        const double observed = scan_processes(edge_count_profile(g), table).max_stat;
        PermutationPlan plan;
        plan.replicates = 199;
        plan.seed = r;
        plan.window = w;
        const double p = pvalue_from_maxima(permutation_maxima(g, table, plan), observed).p;
        rej10 += p <= 0.10;
        rej05 += p <= 0.05;
    }
    const auto within = [&](std::size_t rej, double alpha) {
        const double se = std::sqrt(alpha * (1 - alpha) / runs);
        return std::abs(static_cast<double>(rej) / runs - alpha) <= 3 * se;
    };
    CHECK(within(rej10, 0.10));
    CHECK(within(rej05, 0.05));
}

}
