#pragma once

#include <knncp/knn_graph.hpp>

#include <array>
#include <cstdint>
#include <vector>

// Brute-force classification of ordered pairs and triples of edges (drawn with
// replacement) into their node-sharing configurations. The closed-form counts
// in edge_stats / analytic_pvalue are checked against these.
namespace knncp::configs {

struct Edge {
    NodeId from;
    NodeId to;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// 1..7, numbered as in PairConfigCounts.
int classify_pair(Edge a, Edge b);

/// Label 1..24 of the unordered shape of {a, b, c}:
///  1 (e,e,e)                  2 (e,e,reverse e)
///  3 (e,e,f), e feeds f       8 (e,e,f), f feeds e
///  4 (e,e,f) common target    7 (e,e,f) common source
/// 11 (e,e,f) disjoint
///  5 mutual pair + edge out of the pair    6 mutual pair + edge into the pair
///  9 directed 3-cycle        10 transitive triangle
/// 12 mutual pair + disjoint edge
/// 13 path a->b->c->d         14 path a->b->c<-d
/// 15 path a<-b->c<-d         16 path a<-b->c->d
/// 17 in-star of 3            18 out-star of 3
/// 19 star, 2 out 1 in        20 star, 1 out 2 in
/// 21 2-path + disjoint edge  22 out-2-star + disjoint edge
/// 23 in-2-star + disjoint edge
/// 24 three pairwise disjoint edges
int classify_triple(Edge a, Edge b, Edge c);

/// Counts over all |G|^2 ordered pairs.
std::array<std::int64_t, 7> count_pairs_brute_force(const DirectedKnnGraph& g);

/// Counts over all |G|^3 ordered triples.
std::array<std::int64_t, 24> count_triples_brute_force(const DirectedKnnGraph& g);

/// Per-configuration facts needed to turn triple counts into third moments.
struct TripleConfigInfo {
    int label;
    /// Distinct nodes touched by the three edges.
    int distinct_nodes;
    /// Fraction (num/den) of the ordered triples in this class whose third
    /// edge shares no node with the first two.
    int isolated_num;
    int isolated_den;

    friend bool operator==(const TripleConfigInfo&, const TripleConfigInfo&) = default;
};

/// Derives the table by classifying every ordered triple of the given
/// graphs. Throws std::logic_error if a class is inconsistent across graphs
/// or never observed.
std::array<TripleConfigInfo, 24> derive_triple_config_table(const std::vector<DirectedKnnGraph>& graphs);

/// Random graph with out-degree k and no self-loops, for tests and tools.
DirectedKnnGraph random_out_regular_graph(std::size_t n, std::size_t k, std::uint64_t seed);

} // namespace knncp::configs
