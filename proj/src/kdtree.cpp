#include <knncp/knn_graph.hpp>

#include <knncp/errors.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace knncp {
namespace {

// Fixed-capacity list of the best candidates seen so far, kept in rank order.
class ResultSet {
public:
    explicit ResultSet(std::size_t k) : k_(k) { items_.reserve(k + 1); }

    bool full() const noexcept { return items_.size() == k_; }
    double worst() const noexcept {
        return full() ? items_.back().dist2 : std::numeric_limits<double>::infinity();
    }

    void offer(const Neighbor& cand) {
        if (full() && !neighbor_less(cand, items_.back())) {
            return;
        }
        const auto pos = std::upper_bound(items_.begin(), items_.end(), cand, neighbor_less);
        items_.insert(pos, cand);
        if (items_.size() > k_) {
            items_.pop_back();
        }
    }

    std::vector<Neighbor> take() { return std::move(items_); }

private:
    std::size_t k_;
    std::vector<Neighbor> items_;
};

struct QueryContext {
    const KdTree* tree;
    std::span<const double> query;
    std::size_t query_index;
    double prune_scale; // (1 + eps)^2
    std::size_t max_checks;
    std::size_t checks = 0;
    std::vector<double> offsets;
    ResultSet result;

    bool budget_spent() const noexcept {
        return max_checks > 0 && checks >= max_checks && result.full();
    }
};

void search(QueryContext& ctx, std::uint32_t node_id, double lower_bound) {
    const KdTree::Node& node = ctx.tree->nodes()[node_id];
    if (node.is_leaf()) {
        const DataMatrix& data = ctx.tree->data();
        const auto idx = ctx.tree->indices();
        for (std::uint32_t p = node.begin; p < node.end; ++p) {
            const NodeId j = idx[p];
            if (j == ctx.query_index) {
                continue;
            }
            ++ctx.checks;
            ctx.result.offer({j, squared_distance(ctx.query, data.row(j))});
        }
        return;
    }

    const auto dim = static_cast<std::size_t>(node.split_dim);
    const double diff = ctx.query[dim] - node.split_value;
    const std::uint32_t near = diff < 0 ? node.left : node.right;
    const std::uint32_t far = diff < 0 ? node.right : node.left;

    search(ctx, near, lower_bound);
    if (ctx.budget_spent()) {
        return;
    }

    const double saved = ctx.offsets[dim];
    const double far_bound = lower_bound - saved * saved + diff * diff;
    // Strict comparison: a cell at exactly the current worst distance may hold
    // a tie with a smaller row index.
    if (far_bound * ctx.prune_scale > ctx.result.worst()) {
        return;
    }
    ctx.offsets[dim] = diff;
    search(ctx, far, far_bound);
    ctx.offsets[dim] = saved;
}

} // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t d = a.size();
    double acc0 = 0.0;
    double acc1 = 0.0;
    double acc2 = 0.0;
    double acc3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= d; j += 4) {
        const double x0 = a[j] - b[j];
        const double x1 = a[j + 1] - b[j + 1];
        const double x2 = a[j + 2] - b[j + 2];
        const double x3 = a[j + 3] - b[j + 3];
        acc0 += x0 * x0;
        acc1 += x1 * x1;
        acc2 += x2 * x2;
        acc3 += x3 * x3;
    }
    for (; j < d; ++j) {
        const double x = a[j] - b[j];
        acc0 += x * x;
    }
    return (acc0 + acc1) + (acc2 + acc3);
}

KdTree::KdTree(const DataMatrix& data, std::size_t bucket_size)
    : data_(data), bucket_size_(std::max<std::size_t>(1, bucket_size)) {
    if (data.n() == 0) {
        throw InvalidArgument("kd-tree needs at least one point");
    }
    if (data.n() > std::numeric_limits<std::uint32_t>::max() / 2) {
        throw InvalidArgument("too many points for 32-bit node ids");
    }
    indices_.resize(data.n());
    std::iota(indices_.begin(), indices_.end(), NodeId{0});
    nodes_.reserve(2 * (data.n() / bucket_size_ + 1));
    build(0, static_cast<std::uint32_t>(data.n()), 0);
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t level) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, 0.0, 0, 0});
    depth_ = std::max(depth_, level);
    if (end - begin <= bucket_size_) {
        return id;
    }

    const DataMatrix& data = data_.get();
    const std::size_t d = data.d();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::uint32_t p = begin; p < end; ++p) {
        const auto row = data.row(indices_[p]);
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], row[j]);
            hi[j] = std::max(hi[j], row[j]);
        }
    }
    std::size_t dim = 0;
    double spread = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (hi[j] - lo[j] > spread) {
            spread = hi[j] - lo[j];
            dim = j;
        }
    }
    if (spread <= 0.0) {
        return id; // all rows identical
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(indices_.begin() + begin, indices_.begin() + mid, indices_.begin() + end,
                     [&](NodeId a, NodeId b) { return data(a, dim) < data(b, dim); });
    const double split = data(indices_[mid], dim);

    const std::uint32_t left = build(begin, mid, level + 1);
    const std::uint32_t right = build(mid, end, level + 1);
    Node& node = nodes_[id];
    node.split_dim = static_cast<std::int32_t>(dim);
    node.split_value = split;
    node.left = left;
    node.right = right;
    return id;
}

std::size_t KdTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& nd) { return nd.is_leaf(); }));
}

std::vector<Neighbor> KdTree::knn_query(std::size_t query_index, std::size_t k,
                                        const SearchParams& params) const {
    const DataMatrix& data = data_.get();
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(k) + " needs more than " +
                                 std::to_string(data.n()) + " observations");
    }
    if (query_index >= data.n()) {
        throw InvalidArgument("query index out of range");
    }
    if (params.eps < 0.0) {
        throw InvalidArgument("eps must be non-negative");
    }
    const double scale = (1.0 + params.eps) * (1.0 + params.eps);
    QueryContext ctx{this, data.row(query_index), query_index, scale, params.max_checks, 0,
                     std::vector<double>(data.d(), 0.0), ResultSet(k)};
    search(ctx, 0, 0.0);
    return ctx.result.take();
}

std::vector<Neighbor> brute_force_knn(const DataMatrix& data, std::size_t query_index, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(k) + " needs more than " +
                                 std::to_string(data.n()) + " observations");
    }
    ResultSet result(k);
    const auto q = data.row(query_index);
    for (std::size_t j = 0; j < data.n(); ++j) {
        if (j != query_index) {
            result.offer({static_cast<NodeId>(j), squared_distance(q, data.row(j))});
        }
    }
    return result.take();
}

} // namespace knncp

namespace knncp {

std::vector<std::vector<Neighbor>> brute_force_knn_rows(const DataMatrix& data, std::size_t first,
                                                        std::size_t last, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(k) + " needs more than " +
                                 std::to_string(data.n()) + " observations");
    }
    constexpr std::size_t kBlock = 16;
    std::vector<std::vector<Neighbor>> out;
    out.reserve(last - first);
    for (std::size_t b = first; b < last; b += kBlock) {
        const std::size_t e = std::min(last, b + kBlock);
        std::vector<ResultSet> sets(e - b, ResultSet(k));
        for (std::size_t j = 0; j < data.n(); ++j) {
            const auto row = data.row(j);
            for (std::size_t q = b; q < e; ++q) {
                if (q != j) {
                    sets[q - b].offer({static_cast<NodeId>(j), squared_distance(data.row(q), row)});
                }
            }
        }
        for (auto& s : sets) {
            out.push_back(s.take());
        }
    }
    return out;
}

} // namespace knncp
