#include <doctest.h>

#include "oracles.hpp"

#include <knncp/errors.hpp>
#include <knncp/knn_graph.hpp>

#include <filesystem>
#include <random>
#include <set>

using namespace knncp;

namespace {

DataMatrix gaussian(std::size_t n, std::size_t d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (double& x : v) {
        x = g(rng);
    }
    return DataMatrix(n, d, v);
}

std::vector<NodeId> ids(const std::vector<Neighbor>& nb) {
    std::vector<NodeId> out;
    for (const auto& x : nb) {
        out.push_back(x.index);
    }
    return out;
}

} // namespace

TEST_SUITE("knn_graph") {

TEST_CASE("single point gives a single leaf") {
    const DataMatrix m = DataMatrix::from_rows({{3.0, 4.0}});
    const KdTree tree(m);
    CHECK(tree.nodes().size() == 1);
    CHECK(tree.nodes()[0].is_leaf());
    CHECK(tree.leaf_count() == 1);
}

TEST_CASE("8 collinear points with bucket 1 give a balanced depth-3 tree") {
    const DataMatrix m = DataMatrix::from_rows({{5}, {1}, {7}, {0}, {3}, {6}, {2}, {4}});
    const KdTree tree(m, 1);
    CHECK(tree.depth() == 3);
    CHECK(tree.leaf_count() == 8);
    CHECK(tree.nodes().size() == 15);
}

TEST_CASE("duplicates are all indexed") {
    const DataMatrix m = DataMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {2, 2}, {1, 1}});
    const KdTree tree(m, 2);
    std::multiset<NodeId> seen(tree.indices().begin(), tree.indices().end());
    CHECK(seen == std::multiset<NodeId>{0, 1, 2, 3, 4});
    // ties between identical points go to the smaller index
    CHECK(ids(tree.knn_query(2, 3)) == std::vector<NodeId>{0, 1, 4});
}

TEST_CASE("1-d example {0,1,3,7}: query 0, k 2") {
    const DataMatrix m = DataMatrix::from_rows({{0}, {1}, {3}, {7}});
    const KdTree tree(m);
    CHECK(ids(tree.knn_query(0, 2)) == std::vector<NodeId>{1, 2});
}

TEST_CASE("equidistant ties go to the lower index") {
    const DataMatrix m = DataMatrix::from_rows({{-1}, {0}, {1}, {2}});
    const KdTree tree(m, 1);
    CHECK(ids(tree.knn_query(1, 1)) == std::vector<NodeId>{0});
    CHECK(ids(tree.knn_query(2, 2)) == std::vector<NodeId>{1, 3});
}

TEST_CASE("k >= n is rejected") {
    const DataMatrix m = DataMatrix::from_rows({{0}, {1}, {2}});
    CHECK_THROWS_AS(KdTree(m).knn_query(0, 3), NotEnoughNeighbors);
    CHECK_THROWS_AS(build_graph(m, 3), NotEnoughNeighbors);
}

TEST_CASE("50x5 Gaussian, eps 0: kd-tree equals brute force") {
    const DataMatrix m = gaussian(50, 5, 11);
    const KdTree tree(m, 4);
    for (std::size_t i = 0; i < m.n(); ++i) {
        CHECK(ids(tree.knn_query(i, 7)) == oracle::knn_sorted(m, i, 7));
    }
}

TEST_CASE("n=3, k=1 example graph") {
    const DataMatrix m = DataMatrix::from_rows({{0}, {1}, {10}});
    const DirectedKnnGraph g = build_graph(m, 1);
    const std::vector<std::pair<NodeId, NodeId>> expected{{0, 1}, {1, 0}, {2, 1}};
    CHECK(g.edges() == expected);
    CHECK(g.in_degree(0) == 1);
    CHECK(g.in_degree(1) == 2);
    CHECK(g.in_degree(2) == 0);
}

TEST_CASE("100x10 Gaussian, k=5: graph equals brute-force digraph, in-degrees sum to nk") {
    const DataMatrix m = gaussian(100, 10, 5);
    const DirectedKnnGraph g = build_graph(m, 5);
    std::size_t total = 0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        const auto out = g.out_neighbors(i);
        CHECK(std::vector<NodeId>(out.begin(), out.end()) == oracle::knn_sorted(m, i, 5));
        total += g.in_degree(i);
        for (NodeId src : g.in_neighbors(i)) {
            CHECK(g.has_edge(src, i));
        }
    }
    CHECK(total == 500);
    CHECK(g == build_graph_brute_force(m, 5));
}

TEST_CASE("exact mode matches brute force on tied integer grids") {
    std::mt19937_64 rng(3);
    std::vector<double> v(400 * 3);
    for (double& x : v) {
        x = static_cast<double>(rng() % 4);
    }
    const DataMatrix m(400, 3, v);
    CHECK(build_graph(m, 6) == build_graph_brute_force(m, 6));
}

TEST_CASE("approximate mode: each distance within (1+eps) of the same-rank exact one") {
    const DataMatrix m = gaussian(400, 8, 21);
    const double eps = 0.5;
    const KdTree tree(m);
    for (std::size_t i = 0; i < m.n(); i += 7) {
        const auto approx = tree.knn_query(i, 5, {eps, 0});
        const auto exact = brute_force_knn(m, i, 5);
        std::set<NodeId> distinct;
        for (std::size_t r = 0; r < 5; ++r) {
            CHECK(approx[r].index != i);
            distinct.insert(approx[r].index);
            CHECK(std::sqrt(approx[r].dist2) <= (1.0 + eps) * std::sqrt(exact[r].dist2) + 1e-12);
        }
        CHECK(distinct.size() == 5);
    }
}

TEST_CASE("budgeted search still returns k distinct neighbors") {
    const DataMatrix m = gaussian(300, 40, 2);
    GraphOptions opts;
    opts.max_checks = 20;
    const DirectedKnnGraph g = build_graph(m, 5, opts);
    CHECK(g.edge_count() == 1500);
}

TEST_CASE("blocked exhaustive path above the dimension threshold gives the same graph") {
    const DataMatrix m = gaussian(60, 30, 9);
    GraphOptions opts;
    opts.brute_force_dim_threshold = 10;
    CHECK(build_graph(m, 4, opts) == build_graph(m, 4));
}

TEST_CASE("rebuilds are bit-identical, also across worker counts") {
    const DataMatrix m = gaussian(200, 6, 4);
    GraphOptions one;
    one.workers = 1;
    GraphOptions three;
    three.workers = 3;
    CHECK(build_graph(m, 5, one) == build_graph(m, 5, three));
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(DirectedKnnGraph(3, 1, {0, 0, 1}), InvalidArgument);  // self-loop
    CHECK_THROWS_AS(DirectedKnnGraph(3, 2, {1, 1, 0, 2, 0, 1}), InvalidArgument); // duplicate
    CHECK_THROWS_AS(DirectedKnnGraph(3, 1, {1, 5, 0}), InvalidArgument);  // out of range
}

TEST_CASE("graph CSV round trip with 1-based ids") {
    const DataMatrix m = gaussian(30, 3, 8);
    const DirectedKnnGraph g = build_graph(m, 3);
    const auto p = std::filesystem::path(KNNCP_TEST_TMP) / "g.csv";
    write_graph_csv(g, p);
    CHECK(read_graph_csv(p) == g);
    const DirectedKnnGraph small = parse_graph_csv("source,target\n1,2\n2,1\n3,2\n");
    CHECK(small.n() == 3);
    CHECK(small.has_edge(2, 1));
    CHECK_THROWS_AS(parse_graph_csv("source,target\n1,1\n2,1\n"), ParseError);
    CHECK_THROWS_AS(parse_graph_csv("1,x\n"), ParseError);
}

}
