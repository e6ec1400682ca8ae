#include <knncp/knn_graph.hpp>

#include <knncp/errors.hpp>
#include <knncp/parallel.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace knncp {

DirectedKnnGraph::DirectedKnnGraph(std::size_t n, std::size_t k, std::vector<NodeId> targets)
    : n_(n), k_(k), targets_(std::move(targets)) {
    if (targets_.size() != n_ * k_) {
        throw InvalidArgument("target list size does not match n * k");
    }
    std::vector<std::size_t> counts(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto out = out_neighbors(i);
        for (std::size_t r = 0; r < k_; ++r) {
            const NodeId j = out[r];
            if (j >= n_) {
                throw InvalidArgument("edge target out of range at node " + std::to_string(i + 1));
            }
            if (j == i) {
                throw InvalidArgument("self-loop at node " + std::to_string(i + 1));
            }
            if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(r), j) !=
                out.begin() + static_cast<std::ptrdiff_t>(r)) {
                throw InvalidArgument("duplicate edge " + std::to_string(i + 1) + "->" +
                                      std::to_string(j + 1));
            }
            ++counts[j + 1];
        }
    }
    in_offsets_.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        in_offsets_[i + 1] = in_offsets_[i] + counts[i + 1];
    }
    in_sources_.resize(targets_.size());
    std::vector<std::size_t> fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t i = 0; i < n_; ++i) {
        for (NodeId j : out_neighbors(i)) {
            in_sources_[fill[j]++] = static_cast<NodeId>(i);
        }
    }
}

DirectedKnnGraph DirectedKnnGraph::from_edges(std::size_t n,
                                              std::span<const std::pair<NodeId, NodeId>> edges) {
    if (n == 0 || edges.size() % n != 0) {
        throw InvalidArgument("edge count is not a multiple of the node count");
    }
    const std::size_t k = edges.size() / n;
    std::vector<std::vector<NodeId>> out(n);
    for (const auto& [from, to] : edges) {
        if (from >= n || to >= n) {
            throw InvalidArgument("edge endpoint out of range");
        }
        out[from].push_back(to);
    }
    std::vector<NodeId> targets;
    targets.reserve(edges.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (out[i].size() != k) {
            throw InvalidArgument("node " + std::to_string(i + 1) + " has out-degree " +
                                  std::to_string(out[i].size()) + ", expected " + std::to_string(k));
        }
        targets.insert(targets.end(), out[i].begin(), out[i].end());
    }
    return DirectedKnnGraph(n, k, std::move(targets));
}

bool DirectedKnnGraph::has_edge(std::size_t from, std::size_t to) const noexcept {
    const auto out = out_neighbors(from);
    return std::find(out.begin(), out.end(), static_cast<NodeId>(to)) != out.end();
}

std::vector<std::pair<NodeId, NodeId>> DirectedKnnGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(targets_.size());
    for (std::size_t i = 0; i < n_; ++i) {
        for (NodeId j : out_neighbors(i)) {
            out.emplace_back(static_cast<NodeId>(i), j);
        }
    }
    return out;
}

DirectedKnnGraph build_graph(const DataMatrix& data, std::size_t k, const GraphOptions& options) {
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(k) + " needs more than " +
                                 std::to_string(data.n()) + " observations");
    }
    if (data.d() > options.brute_force_dim_threshold) {
        return build_graph_brute_force(data, k, options.workers);
    }

    const KdTree tree(data, options.bucket_size);
    const SearchParams params{options.eps, options.max_checks};
    std::vector<NodeId> targets(data.n() * k);
    parallel_for(
        data.n(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto nbrs = tree.knn_query(i, k, params);
                for (std::size_t r = 0; r < k; ++r) {
                    targets[i * k + r] = nbrs[r].index;
                }
            }
        },
        options.workers);
    return DirectedKnnGraph(data.n(), k, std::move(targets));
}

DirectedKnnGraph build_graph_brute_force(const DataMatrix& data, std::size_t k, std::size_t workers) {
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(k) + " needs more than " +
                                 std::to_string(data.n()) + " observations");
    }
    std::vector<NodeId> targets(data.n() * k);
    parallel_for(
        data.n(),
        [&](std::size_t begin, std::size_t end) {
            const auto rows = brute_force_knn_rows(data, begin, end, k);
            for (std::size_t i = begin; i < end; ++i) {
                for (std::size_t r = 0; r < k; ++r) {
                    targets[i * k + r] = rows[i - begin][r].index;
                }
            }
        },
        workers);
    return DirectedKnnGraph(data.n(), k, std::move(targets));
}

void write_graph_csv(const DirectedKnnGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "source,target\n";
    for (const auto& [from, to] : graph.edges()) {
        out << from + 1 << ',' << to + 1 << '\n';
    }
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

DirectedKnnGraph parse_graph_csv(std::string_view text) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t n = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.find(',');
        unsigned long from = 0;
        unsigned long to = 0;
        bool ok = comma != std::string_view::npos;
        if (ok) {
            const auto a = std::from_chars(line.data(), line.data() + comma, from);
            const auto b = std::from_chars(line.data() + comma + 1, line.data() + line.size(), to);
            ok = a.ec == std::errc{} && a.ptr == line.data() + comma && b.ec == std::errc{} &&
                 b.ptr == line.data() + line.size();
        }
        if (!ok) {
            if (line_no == 1) {
                continue; // header
            }
            throw ParseError("graph line " + std::to_string(line_no) + ": expected 'source,target'");
        }
        if (from == 0 || to == 0) {
            throw ParseError("graph line " + std::to_string(line_no) + ": ids are 1-based");
        }
        edges.emplace_back(static_cast<NodeId>(from - 1), static_cast<NodeId>(to - 1));
        n = std::max<std::size_t>({n, from, to});
    }
    if (edges.empty()) {
        throw ParseError("graph file has no edges");
    }
    try {
        return DirectedKnnGraph::from_edges(n, edges);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("invalid graph: ") + e.what());
    }
}

DirectedKnnGraph read_graph_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_graph_csv(text);
}

} // namespace knncp
