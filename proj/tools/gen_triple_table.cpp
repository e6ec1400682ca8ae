// Emits include/knncp/triple_config_table.hpp: for each of the 24 edge-triple
// configurations, the number of distinct nodes and the fraction of ordered
// triples whose third edge is disjoint from the other two. Both are read off
// by classifying every ordered triple of a batch of random digraphs.
//
//   gen_triple_table > include/knncp/triple_config_table.hpp

#include <knncp/edge_configurations.hpp>

#include <cstdio>
#include <exception>

int main() {
    using namespace knncp::configs;
    try {
        std::vector<knncp::DirectedKnnGraph> graphs;
        std::uint64_t seed = 1;
        for (std::size_t n : {6, 7, 8, 9, 10}) {
            for (std::size_t k : {1, 2, 3}) {
                graphs.push_back(random_out_regular_graph(n, k, seed++));
            }
        }
        const auto table = derive_triple_config_table(graphs);

        std::printf("#pragma once\n\n");
        std::printf("// Generated by tools/gen_triple_table.cpp; do not edit by hand.\n\n");
        std::printf("#include <knncp/edge_configurations.hpp>\n\n#include <array>\n\n");
        std::printf("namespace knncp {\n\n");
        std::printf("// {label, distinct nodes, isolated third edge num, den}\n");
        std::printf("inline constexpr std::array<configs::TripleConfigInfo, 24> kTripleConfigTable{{\n");
        for (const auto& row : table) {
            std::printf("    {%d, %d, %d, %d},\n", row.label, row.distinct_nodes, row.isolated_num,
                        row.isolated_den);
        }
        std::printf("}};\n\n} // namespace knncp\n");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gen_triple_table: %s\n", e.what());
        return 1;
    }
    return 0;
}
