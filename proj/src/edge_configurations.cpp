#include <knncp/edge_configurations.hpp>

#include <knncp/errors.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace knncp::configs {
namespace {

bool shares_node(Edge a, Edge b) {
    return a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to;
}

Edge reversed(Edge e) {
    return {e.to, e.from};
}

int classify_three_distinct(const std::array<Edge, 3>& e) {
    std::vector<NodeId> nodes;
    for (const Edge& x : e) {
        nodes.push_back(x.from);
        nodes.push_back(x.to);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const auto count_out = [&](NodeId v) {
        return std::count_if(e.begin(), e.end(), [&](const Edge& x) { return x.from == v; });
    };
    const auto count_in = [&](NodeId v) {
        return std::count_if(e.begin(), e.end(), [&](const Edge& x) { return x.to == v; });
    };
    const auto is_edge = [&](Edge q) { return std::find(e.begin(), e.end(), q) != e.end(); };

    int mutual_at = -1;
    for (int i = 0; i < 3; ++i) {
        if (is_edge(reversed(e[static_cast<std::size_t>(i)]))) {
            mutual_at = i;
            break;
        }
    }

    switch (nodes.size()) {
    case 3: {
        if (mutual_at >= 0) {
            const Edge m = e[static_cast<std::size_t>(mutual_at)];
            for (const Edge& x : e) {
                if (x != m && x != reversed(m)) {
                    const bool out_of_pair = x.from == m.from || x.from == m.to;
                    return out_of_pair ? 5 : 6;
                }
            }
        }
        for (NodeId v : nodes) {
            if (count_out(v) == 2) {
                return 10;
            }
        }
        return 9;
    }
    case 4: {
        if (mutual_at >= 0) {
            return 12;
        }
        for (NodeId v : nodes) {
            if (count_out(v) + count_in(v) == 3) {
                switch (count_out(v)) {
                case 0: return 17;
                case 1: return 20;
                case 2: return 19;
                default: return 18;
                }
            }
        }
        bool two_in = false;
        bool two_out = false;
        for (NodeId v : nodes) {
            two_in = two_in || count_in(v) == 2;
            two_out = two_out || count_out(v) == 2;
        }
        if (two_in && two_out) {
            return 15;
        }
        if (two_in) {
            return 14;
        }
        if (two_out) {
            return 16;
        }
        return 13;
    }
    case 5: {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                if (!shares_node(e[i], e[j])) {
                    continue;
                }
                if (e[i].to == e[j].from || e[j].to == e[i].from) {
                    return 21;
                }
                return e[i].from == e[j].from ? 22 : 23;
            }
        }
        break;
    }
    case 6:
        return 24;
    default:
        break;
    }
    throw std::logic_error("unclassifiable edge triple");
}

} // namespace

int classify_pair(Edge a, Edge b) {
    if (a == b) {
        return 1;
    }
    if (b == reversed(a)) {
        return 2;
    }
    if (a.to == b.from) {
        return 3;
    }
    if (b.to == a.from) {
        return 4;
    }
    if (a.from == b.from) {
        return 5;
    }
    if (a.to == b.to) {
        return 6;
    }
    return 7;
}

int classify_triple(Edge a, Edge b, Edge c) {
    if (a == b && b == c) {
        return 1;
    }
    if (a == b || b == c || a == c) {
        const Edge twice = (a == b || a == c) ? a : b;
        const Edge once = (a == b) ? c : (a == c ? b : a);
        switch (classify_pair(twice, once)) {
        case 2: return 2;
        case 3: return 3;
        case 4: return 8;
        case 5: return 7;
        case 6: return 4;
        default: return 11;
        }
    }
    return classify_three_distinct({a, b, c});
}

std::array<std::int64_t, 7> count_pairs_brute_force(const DirectedKnnGraph& g) {
    std::array<std::int64_t, 7> counts{};
    const auto edges = g.edges();
    for (const auto& [i, j] : edges) {
        for (const auto& [u, v] : edges) {
            ++counts[static_cast<std::size_t>(classify_pair({i, j}, {u, v}) - 1)];
        }
    }
    return counts;
}

std::array<std::int64_t, 24> count_triples_brute_force(const DirectedKnnGraph& g) {
    std::array<std::int64_t, 24> counts{};
    const auto edges = g.edges();
    for (const auto& [a0, a1] : edges) {
        for (const auto& [b0, b1] : edges) {
            for (const auto& [c0, c1] : edges) {
                ++counts[static_cast<std::size_t>(classify_triple({a0, a1}, {b0, b1}, {c0, c1}) - 1)];
            }
        }
    }
    return counts;
}

std::array<TripleConfigInfo, 24> derive_triple_config_table(const std::vector<DirectedKnnGraph>& graphs) {
    std::array<int, 24> nodes{};
    std::array<std::int64_t, 24> total{};
    std::array<std::int64_t, 24> isolated{};
    for (const auto& g : graphs) {
        const auto edges = g.edges();
        for (const auto& [a0, a1] : edges) {
            for (const auto& [b0, b1] : edges) {
                for (const auto& [c0, c1] : edges) {
                    const Edge a{a0, a1};
                    const Edge b{b0, b1};
                    const Edge c{c0, c1};
                    const auto l = static_cast<std::size_t>(classify_triple(a, b, c) - 1);
                    std::vector<NodeId> vs{a0, a1, b0, b1, c0, c1};
                    std::sort(vs.begin(), vs.end());
                    const int distinct =
                        static_cast<int>(std::unique(vs.begin(), vs.end()) - vs.begin());
                    if (nodes[l] != 0 && nodes[l] != distinct) {
                        throw std::logic_error("configuration " + std::to_string(l + 1) +
                                               " mixes node counts");
                    }
                    nodes[l] = distinct;
                    ++total[l];
                    if (!shares_node(c, a) && !shares_node(c, b)) {
                        ++isolated[l];
                    }
                }
            }
        }
    }

    std::array<TripleConfigInfo, 24> table{};
    for (std::size_t l = 0; l < 24; ++l) {
        if (total[l] == 0) {
            throw std::logic_error("configuration " + std::to_string(l + 1) + " never observed");
        }
        const std::int64_t g = std::gcd(isolated[l], total[l]);
        std::int64_t num = isolated[l] / g;
        std::int64_t den = total[l] / g;
        if (num == 0) {
            den = 1;
        }
        table[l] = {static_cast<int>(l + 1), nodes[l], static_cast<int>(num), static_cast<int>(den)};
    }
    return table;
}

DirectedKnnGraph random_out_regular_graph(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k == 0 || k >= n) {
        throw InvalidArgument("need 1 <= k < n");
    }
    std::mt19937_64 rng(seed);
    std::vector<NodeId> targets;
    targets.reserve(n * k);
    std::vector<NodeId> pool(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                pool[w++] = static_cast<NodeId>(j);
            }
        }
        // partial Fisher-Yates
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t span = pool.size() - r;
            const std::size_t pick = r + static_cast<std::size_t>(rng() % span);
            std::swap(pool[r], pool[pick]);
            targets.push_back(pool[r]);
        }
    }
    return DirectedKnnGraph(n, k, std::move(targets));
}

} // namespace knncp::configs
