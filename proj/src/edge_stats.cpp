#include <knncp/edge_stats.hpp>

#include <knncp/checked.hpp>
#include <knncp/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace knncp {
namespace {

EdgeCountProfile profile_from_buckets(std::size_t n, const std::vector<std::int64_t>& closes_at,
                                      const std::vector<std::int64_t>& opens_at) {
    // closes_at[h]: edges whose later endpoint is at time h (counted in r1 for t >= h).
    // opens_at[l]: edges whose earlier endpoint is at time l (counted in r2 for t < l).
    EdgeCountProfile p;
    p.n = n;
    p.r1.resize(n - 1);
    p.r2.resize(n - 1);
    std::int64_t run = 0;
    for (std::size_t t = 1; t < n; ++t) {
        run += closes_at[t];
        p.r1[t - 1] = run;
    }
    run = 0;
    for (std::size_t t = n - 1; t >= 1; --t) {
        run += opens_at[t + 1];
        p.r2[t - 1] = run;
    }
    return p;
}

} // namespace

EdgeCountProfile edge_count_profile(const DirectedKnnGraph& g) {
    const std::size_t n = g.n();
    std::vector<std::int64_t> closes_at(n + 1, 0);
    std::vector<std::int64_t> opens_at(n + 2, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (NodeId j : g.out_neighbors(i)) {
            const std::size_t a = i + 1;
            const std::size_t b = static_cast<std::size_t>(j) + 1;
            ++closes_at[std::max(a, b)];
            ++opens_at[std::min(a, b)];
        }
    }
    return profile_from_buckets(n, closes_at, opens_at);
}

EdgeCountProfile edge_count_profile(const DirectedKnnGraph& g, std::span<const NodeId> time_of_node) {
    const std::size_t n = g.n();
    if (time_of_node.size() != n) {
        throw InvalidArgument("time labelling has the wrong length");
    }
    std::vector<std::int64_t> closes_at(n + 1, 0);
    std::vector<std::int64_t> opens_at(n + 2, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = static_cast<std::size_t>(time_of_node[i]) + 1;
        for (NodeId j : g.out_neighbors(i)) {
            const std::size_t b = static_cast<std::size_t>(time_of_node[j]) + 1;
            ++closes_at[std::max(a, b)];
            ++opens_at[std::min(a, b)];
        }
    }
    return profile_from_buckets(n, closes_at, opens_at);
}

PairConfigCounts pair_config_counts(const DirectedKnnGraph& g) {
    using namespace checked;
    PairConfigCounts out;
    out.n = g.n();
    out.k = g.k();
    const auto n = static_cast<std::int64_t>(g.n());
    const auto k = static_cast<std::int64_t>(g.k());
    const std::int64_t nk = mul(n, k);

    // c2: ordered pairs of mutually opposite edges. mark[x] == i+1 iff i -> x.
    std::vector<std::size_t> mark(g.n(), 0);
    std::int64_t mutual = 0;
    std::int64_t in_square = 0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        for (NodeId x : g.out_neighbors(i)) {
            mark[x] = i + 1;
        }
        for (NodeId j : g.in_neighbors(i)) {
            mutual += mark[j] == i + 1 ? 1 : 0;
        }
        const auto deg = static_cast<std::int64_t>(g.in_degree(i));
        in_square = add(in_square, mul(deg, deg - 1));
    }

    out.c[0] = nk;
    out.c[1] = mutual;
    out.c[2] = sub(mul(nk, k), mutual); // sum_i sum_{j in D_i} (k - 1{(i,j) in G})
    out.c[3] = out.c[2];
    out.c[4] = mul(nk, k - 1);
    out.c[5] = in_square;
    std::int64_t rest = mul(nk, nk);
    for (std::size_t m = 0; m < 6; ++m) {
        rest = sub(rest, out.c[m]);
    }
    out.c[6] = rest;
    return out;
}

NullFractions null_fractions(std::size_t n_, std::size_t t_) {
    const auto n = static_cast<long double>(n_);
    const auto t = static_cast<long double>(t_);
    const long double s = n - t;
    const long double n2 = n * (n - 1);
    const long double n3 = n2 * (n - 2);
    const long double n4 = n3 * (n - 3);
    NullFractions f{};
    f.p1 = t * (t - 1) / n2;
    f.p2 = t * (t - 1) * (t - 2) / n3;
    f.p3 = t * (t - 1) * (t - 2) * (t - 3) / n4;
    f.q1 = s * (s - 1) / n2;
    f.q2 = s * (s - 1) * (s - 2) / n3;
    f.q3 = s * (s - 1) * (s - 2) * (s - 3) / n4;
    f.r = t * (t - 1) * s * (s - 1) / n4;
    return f;
}

MomentRow null_moments(const PairConfigCounts& counts, std::size_t n, std::size_t t) {
    const NullFractions f = null_fractions(n, t);
    const auto nk = static_cast<long double>(counts.edges());
    const auto d1 = static_cast<long double>(counts.d1());
    const auto d2 = static_cast<long double>(counts.d2());
    const auto d3 = static_cast<long double>(counts.d3());

    MomentRow row;
    row.mean1 = nk * f.p1;
    row.mean2 = nk * f.q1;
    row.second1 = d1 * f.p1 + d2 * f.p2 + d3 * f.p3;
    row.second2 = d1 * f.q1 + d2 * f.q2 + d3 * f.q3;
    row.var1 = row.second1 - row.mean1 * row.mean1;
    row.var2 = row.second2 - row.mean2 * row.mean2;
    row.cov12 = d3 * f.r - row.mean1 * row.mean2;
    return row;
}

ScanWindow default_window(std::size_t n) {
    // R_w(1) = R1(1) = 0 identically, so t = 1 and t = n - 1 never carry information.
    const auto n0 = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
    const std::size_t n1 = n >= n0 + 2 ? std::min(n - n0, n - 2) : 0;
    return {n0, n1};
}

void validate_window(const ScanWindow& window, std::size_t n) {
    if (window.n0 < 1 || window.n1 > n - 1 || window.n0 > window.n1) {
        throw InvalidArgument("scan window [" + std::to_string(window.n0) + ", " +
                              std::to_string(window.n1) + "] is not inside [1, " +
                              std::to_string(n - 1) + "]");
    }
}

MomentTable::MomentTable(const PairConfigCounts& counts, ScanWindow window)
    : n_(counts.n), window_(window) {
    validate_window(window_, n_);
    entries_.reserve(window_.size());
    const auto n = static_cast<long double>(n_);
    for (std::size_t t = window_.n0; t <= window_.n1; ++t) {
        Entry e;
        e.moments = null_moments(counts, n_, t);
        const MomentRow& m = e.moments;
        const long double a = (n - static_cast<long double>(t) - 1) / (n - 2);
        const long double b = (static_cast<long double>(t) - 1) / (n - 2);
        const long double var_w = a * a * m.var1 + b * b * m.var2 + 2 * a * b * m.cov12;
        const long double var_diff = m.var1 + m.var2 - 2 * m.cov12;
        const long double scale = std::max<long double>(1, m.second1 + m.second2);
        if (var_w <= kDegenerateVarianceThreshold * scale) {
            throw DegenerateVariance(t, "var(R_w) vanishes at t = " + std::to_string(t));
        }
        if (var_diff <= kDegenerateVarianceThreshold * scale) {
            throw DegenerateVariance(
                t, "var(R_diff) vanishes at t = " + std::to_string(t) +
                       "; every in-degree equals k, so R_diff is constant");
        }
        e.weight1 = static_cast<double>(a);
        e.weight2 = static_cast<double>(b);
        e.mean_w = static_cast<double>(a * m.mean1 + b * m.mean2);
        e.sd_w = static_cast<double>(std::sqrt(var_w));
        e.mean_diff = static_cast<double>(m.mean1 - m.mean2);
        e.sd_diff = static_cast<double>(std::sqrt(var_diff));
        entries_.push_back(e);
    }
}

ScanProcesses scan_processes(const EdgeCountProfile& profile, const MomentTable& moments) {
    if (profile.n != moments.n()) {
        throw InvalidArgument("profile and moment table disagree on n");
    }
    const ScanWindow w = moments.window();
    ScanProcesses out;
    out.window = w;
    out.z_w.reserve(w.size());
    out.z_diff.reserve(w.size());
    out.m.reserve(w.size());
    out.max_stat = -std::numeric_limits<double>::infinity();
    for (std::size_t t = w.n0; t <= w.n1; ++t) {
        const std::int64_t r1 = profile.within_before(t);
        const std::int64_t r2 = profile.within_after(t);
        const double zw = moments.z_w(t, r1, r2);
        const double zd = moments.z_diff(t, r1, r2);
        const double m = std::max(zw, std::abs(zd));
        out.z_w.push_back(zw);
        out.z_diff.push_back(zd);
        out.m.push_back(m);
        if (m > out.max_stat) {
            out.max_stat = m;
            out.tau_hat = t;
        }
    }
    return out;
}

double scan_maximum(const EdgeCountProfile& profile, const MomentTable& moments) {
    const ScanWindow w = moments.window();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = w.n0; t <= w.n1; ++t) {
        const std::int64_t r1 = profile.within_before(t);
        const std::int64_t r2 = profile.within_after(t);
        best = std::max({best, moments.z_w(t, r1, r2), std::abs(moments.z_diff(t, r1, r2))});
    }
    return best;
}

} // namespace knncp
