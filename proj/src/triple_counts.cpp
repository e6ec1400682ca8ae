#include <knncp/analytic_pvalue.hpp>

#include <knncp/checked.hpp>

namespace knncp {

TripleConfigCounts triple_config_counts(const DirectedKnnGraph& g, const PairConfigCounts& pairs) {
    using namespace checked;
    const std::size_t n_nodes = g.n();
    const auto n = static_cast<std::int64_t>(n_nodes);
    const auto k = static_cast<std::int64_t>(g.k());
    const std::int64_t nk = mul(n, k);

    TripleConfigCounts out;

    // out_mark[x] == i+1 iff i -> x; in_mark[x] == i+1 iff x -> i.
    std::vector<std::size_t> out_mark(n_nodes, 0);
    std::vector<std::size_t> in_mark(n_nodes, 0);
    std::int64_t mutual_sum = 0;
    std::int64_t cycles = 0;
    std::int64_t shortcuts = 0;
    std::int64_t end_in = 0;
    std::int64_t star_in = 0;
    std::int64_t in_triples = 0; // sum_i C(|D_i|, 3)

    for (std::size_t i = 0; i < n_nodes; ++i) {
        for (NodeId x : g.out_neighbors(i)) {
            out_mark[x] = i + 1;
        }
        for (NodeId x : g.in_neighbors(i)) {
            in_mark[x] = i + 1;
        }
        const auto deg_i = static_cast<std::int64_t>(g.in_degree(i));

        for (NodeId j : g.out_neighbors(i)) {
            const auto deg_j = static_cast<std::int64_t>(g.in_degree(j));
            // G^(2): (i,j),(j,i)
            if (in_mark[j] == i + 1) {
                mutual_sum = add(mutual_sum, deg_i + deg_j - 2);
            }
            // G^(3): (i,j),(j,v) with v != i
            for (NodeId v : g.out_neighbors(j)) {
                if (v == i) {
                    continue;
                }
                cycles += in_mark[v] == i + 1 ? 1 : 0;
                shortcuts += out_mark[v] == i + 1 ? 1 : 0;
                end_in = add(end_in, static_cast<std::int64_t>(g.in_degree(v)) - 1);
            }
        }
        // G^(5): (i,j),(i,v), j != v: k(k-1) ordered pairs per source.
        star_in = add(star_in, mul(k * (k - 1), deg_i));
        in_triples = add(in_triples, mul(deg_i, deg_i - 1, deg_i - 2) / 6);
    }

    out.mutual_in_degree_sum = mutual_sum;
    out.path_closing_cycles = cycles;
    out.path_shortcuts = shortcuts;
    out.path_end_in_degree = end_in;
    out.out_star_in_degree = star_in;

    const std::int64_t c2 = pairs[2];
    const std::int64_t c3 = pairs[3];
    const std::int64_t c5 = pairs[5];
    const std::int64_t c6 = pairs[6];
    const std::int64_t c7 = pairs[7];

    std::array<std::int64_t, 25> N{}; // 1-based
    N[1] = nk;
    N[2] = mul(3, c2);
    N[3] = mul(3, c3);
    N[4] = mul(3, c6);
    N[5] = mul(6, c2, k - 1);
    N[6] = mul(3, mutual_sum);
    N[7] = mul(3, c5);
    N[8] = mul(3, c3);
    N[9] = mul(2, cycles);
    N[10] = mul(6, shortcuts);
    N[11] = mul(3, c7);
    N[12] = sub(mul(3, c2, nk - 2), add(N[5], N[6]));
    N[13] = sub(mul(6, k, c3), add(N[6], mul(3, N[9])));
    N[14] = sub(mul(6, end_in), N[10]);
    N[15] = sub(mul(6, k - 1, c6), N[10]);
    N[16] = sub(mul(6, k, c5), add(N[5], N[10]));
    N[17] = mul(6, in_triples);
    N[18] = mul(6, n, k * (k - 1) * (k - 2) / 6);
    N[19] = sub(mul(3, star_in), N[5]);
    N[20] = sub(mul(3, k, c6), N[6]);

    std::int64_t s21 = add(N[5], N[6]);
    for (std::int64_t term : {N[10], N[14], N[16], mul(3, N[9]), mul(2, N[13]), mul(2, N[19]),
                              mul(2, N[20])}) {
        s21 = add(s21, term);
    }
    N[21] = sub(mul(6, c3, nk - 2), s21);

    std::int64_t s22 = add(N[5], N[10]);
    for (std::int64_t term : {N[15], N[16], N[19], mul(3, N[18])}) {
        s22 = add(s22, term);
    }
    N[22] = sub(mul(3, c5, nk - 2), s22);

    std::int64_t s23 = add(N[6], N[10]);
    for (std::int64_t term : {N[14], N[15], N[20], mul(3, N[17])}) {
        s23 = add(s23, term);
    }
    N[23] = sub(mul(3, c6, nk - 2), s23);

    std::int64_t rest = mul(nk, nk, nk);
    for (int l = 1; l <= 23; ++l) {
        rest = sub(rest, N[static_cast<std::size_t>(l)]);
    }
    N[24] = rest;

    for (std::size_t l = 0; l < 24; ++l) {
        out.counts[l] = N[l + 1];
    }
    return out;
}

} // namespace knncp
