#pragma once

#include <knncp/matrix_io.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace knncp {

using NodeId = std::uint32_t;

/// Squared Euclidean distance, accumulated in coordinate order.
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct Neighbor {
    NodeId index = 0;
    double dist2 = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Neighbor rank order: distance first, smaller row index on ties.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) noexcept {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

struct SearchParams {
    /// 0 requests exact search; otherwise every returned neighbor is within
    /// (1 + eps) of the exact neighbor of the same rank.
    double eps = 0.0;
    /// Upper bound on distance evaluations per query once k candidates are
    /// held; 0 means unbounded. A bound voids the (1 + eps) guarantee.
    std::size_t max_checks = 0;
};

/// Axis-aligned kd-tree over the rows of a DataMatrix. Splits on the
/// coordinate of largest spread at the median; leaves hold at most
/// bucket_size rows. The tree references the matrix, which must outlive it.
class KdTree {
public:
    struct Node {
        std::uint32_t begin = 0; // range into indices()
        std::uint32_t end = 0;
        std::int32_t split_dim = -1; // -1 for a leaf
        double split_value = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;

        bool is_leaf() const noexcept { return split_dim < 0; }
    };

    KdTree(const DataMatrix& data, std::size_t bucket_size = 16);

    const DataMatrix& data() const noexcept { return data_.get(); }
    std::size_t bucket_size() const noexcept { return bucket_size_; }
    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::span<const NodeId> indices() const noexcept { return indices_; }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t leaf_count() const noexcept;

    /// k nearest rows to row query_index, excluding itself, in rank order.
    /// Throws NotEnoughNeighbors when k >= n.
    std::vector<Neighbor> knn_query(std::size_t query_index, std::size_t k,
                                    const SearchParams& params = {}) const;

private:
    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::size_t level);

    std::reference_wrapper<const DataMatrix> data_;
    std::size_t bucket_size_;
    std::vector<NodeId> indices_;
    std::vector<Node> nodes_;
    std::size_t depth_ = 0;
};

/// Exact k-NN of one row by exhaustive scan, with the same rank order.
std::vector<Neighbor> brute_force_knn(const DataMatrix& data, std::size_t query_index,
                                      std::size_t k);

/// Exhaustive k-NN for rows [first, last), scanning the data once per block of
/// queries. Same results as brute_force_knn.
std::vector<std::vector<Neighbor>> brute_force_knn_rows(const DataMatrix& data, std::size_t first,
                                                        std::size_t last, std::size_t k);

/// Directed graph with constant out-degree k: i -> j when row j is among the
/// k (approximate) nearest neighbors of row i. Node ids are 0-based.
class DirectedKnnGraph {
public:
    DirectedKnnGraph() = default;

    /// targets[i*k + r] is the r-th out-neighbor of node i. Throws
    /// InvalidArgument on self-loops, duplicate edges or out-of-range ids.
    DirectedKnnGraph(std::size_t n, std::size_t k, std::vector<NodeId> targets);

    /// Builds from an arbitrary (source, target) edge list; every node must
    /// have the same out-degree.
    static DirectedKnnGraph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t edge_count() const noexcept { return targets_.size(); }

    std::span<const NodeId> out_neighbors(std::size_t i) const noexcept {
        return {targets_.data() + i * k_, k_};
    }
    /// D_i: the nodes with an edge into i, in increasing order.
    std::span<const NodeId> in_neighbors(std::size_t i) const noexcept {
        return {in_sources_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
    }
    std::size_t in_degree(std::size_t i) const noexcept { return in_offsets_[i + 1] - in_offsets_[i]; }

    bool has_edge(std::size_t from, std::size_t to) const noexcept;

    /// Edges grouped by source, in rank order within a source.
    std::vector<std::pair<NodeId, NodeId>> edges() const;
    std::span<const NodeId> targets() const noexcept { return targets_; }

    friend bool operator==(const DirectedKnnGraph& a, const DirectedKnnGraph& b) {
        return a.n_ == b.n_ && a.k_ == b.k_ && a.targets_ == b.targets_;
    }

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<NodeId> targets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<NodeId> in_sources_;
};

struct GraphOptions {
    double eps = 0.0;
    std::size_t max_checks = 0;
    std::size_t bucket_size = 16;
    /// Above this dimension the kd-tree is skipped for a blocked exhaustive scan.
    std::size_t brute_force_dim_threshold = 4096;
    std::size_t workers = 0;
};

DirectedKnnGraph build_graph(const DataMatrix& data, std::size_t k, const GraphOptions& options = {});

/// Same contract as build_graph with eps = 0, by exhaustive scan.
DirectedKnnGraph build_graph_brute_force(const DataMatrix& data, std::size_t k, std::size_t workers = 0);

/// "source,target" lines with 1-based ids.
void write_graph_csv(const DirectedKnnGraph& graph, const std::filesystem::path& path);
DirectedKnnGraph read_graph_csv(const std::filesystem::path& path);
DirectedKnnGraph parse_graph_csv(std::string_view text);

} // namespace knncp
