#include <doctest.h>

#include "oracles.hpp"

#include <knncp/analytic_pvalue.hpp>
#include <knncp/edge_configurations.hpp>
#include <knncp/errors.hpp>
#include <knncp/permutation.hpp>

#include <random>

using namespace knncp;
using configs::random_out_regular_graph;

namespace {

DirectedKnnGraph gaussian_graph(std::size_t n, std::size_t d, std::size_t k, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (double& x : v) {
        x = g(rng);
    }
    return build_graph(DataMatrix(n, d, v), k);
}

// Standardized third moment of a R1 + b R2 from raw moments.
long double gamma_of(const std::array<std::array<long double, 4>, 4>& e, long double a, long double b) {
    const long double mean = a * e[1][0] + b * e[0][1];
    const long double second = a * a * e[2][0] + 2 * a * b * e[1][1] + b * b * e[0][2];
    const long double third = a * a * a * e[3][0] + 3 * a * a * b * e[2][1] + 3 * a * b * b * e[1][2] + b * b * b * e[0][3];
    const long double var = second - mean * mean;
    return (third - 3 * mean * second + 2 * mean * mean * mean) / std::pow(var, 1.5L);
}

} // namespace

TEST_SUITE("analytic_pvalue") {

TEST_CASE("raw moments equal exhaustive enumeration for small graphs") {
    for (unsigned seed = 1; seed <= 6; ++seed) {
        const std::size_t n = 5 + seed % 3;
        const std::size_t k = 1 + seed % 2;
        const auto g = random_out_regular_graph(n, k, seed);
        const auto pairs = pair_config_counts(g);
        const auto triples = triple_config_counts(g, pairs);
        const auto ex = oracle::exhaustive_moments(n, g.edges());
        for (std::size_t t = 1; t < n; ++t) {
            const RawMoments m = raw_moments(pairs, triples, n, t);
            const auto& e = ex.raw[t - 1];
            CAPTURE(seed);
            CAPTURE(t);
            CHECK(oracle::close_rel(m.m10, e[1][0], 1e-10L));
            CHECK(oracle::close_rel(m.m01, e[0][1], 1e-10L));
            CHECK(oracle::close_rel(m.m20, e[2][0], 1e-10L));
            CHECK(oracle::close_rel(m.m11, e[1][1], 1e-10L));
            CHECK(oracle::close_rel(m.m02, e[0][2], 1e-10L));
            CHECK(oracle::close_rel(m.m30, e[3][0], 1e-10L));
            CHECK(oracle::close_rel(m.m21, e[2][1], 1e-10L));
            CHECK(oracle::close_rel(m.m12, e[1][2], 1e-10L));
            CHECK(oracle::close_rel(m.m03, e[0][3], 1e-10L));
        }
    }
}

TEST_CASE("n = 6, k = 1, t = 3: skewness equals exhaustive enumeration") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const auto g = random_out_regular_graph(6, 1, seed * 31);
        const auto pairs = pair_config_counts(g);
        const auto triples = triple_config_counts(g, pairs);
        const auto ex = oracle::exhaustive_moments(6, g.edges());
        Skewness s;
        try {
            s = third_moments(triples, pairs, 6, 3);
        } catch (const DegenerateVariance&) {
            continue; // regular graph drawn
        }
        const auto& e = ex.raw[2];
        CHECK(std::abs(s.gamma_w - static_cast<double>(gamma_of(e, 2.0L / 4, 2.0L / 4))) <= 1e-10);
        CHECK(std::abs(s.gamma_diff - static_cast<double>(gamma_of(e, 1, -1))) <= 1e-10);
    }
}

TEST_CASE("n = 200, k = 3, t = 100: skewness within 4 Monte-Carlo SE of 1e6 permutations") {
    const auto g = gaussian_graph(200, 5, 3, 8);
    const auto pairs = pair_config_counts(g);
    const Skewness s = third_moments(triple_config_counts(g, pairs), pairs, 200, 100);
    const MomentTable table(pairs, {100, 100});
    const std::size_t reps = 1000000;
    long double sw = 0, sw2 = 0, sd = 0, sd2 = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        auto eng = replicate_engine(17, r);
        const EdgeCountProfile p = edge_count_profile(g, random_time_labels(200, eng));
        const double zw = table.z_w(100, p.within_before(100), p.within_after(100));
        const double zd = table.z_diff(100, p.within_before(100), p.within_after(100));
        const long double cw = static_cast<long double>(zw) * zw * zw;
        const long double cd = static_cast<long double>(zd) * zd * zd;
        sw += cw;
        sw2 += cw * cw;
        sd += cd;
        sd2 += cd * cd;
    }
    const long double mw = sw / reps, md = sd / reps;
    const long double se_w = std::sqrt((sw2 / reps - mw * mw) / reps);
    const long double se_d = std::sqrt((sd2 / reps - md * md) / reps);
    CHECK(std::fabs(mw - s.gamma_w) <= 4 * se_w);
    CHECK(std::fabs(md - s.gamma_diff) <= 4 * se_d);
}

TEST_CASE("gamma_diff(t) = -gamma_diff(n - t)") {
    const auto g = gaussian_graph(120, 3, 4, 3);
    const auto pairs = pair_config_counts(g);
    const auto triples = triple_config_counts(g, pairs);
    for (std::size_t t : {10u, 30u, 59u, 60u}) {
        const double a = third_moments(triples, pairs, 120, t).gamma_diff;
        const double b = third_moments(triples, pairs, 120, 120 - t).gamma_diff;
        CHECK(a == doctest::Approx(-b).epsilon(1e-9));
    }
}

TEST_CASE("nu: limit 1 at 0, strictly decreasing, tends to 0") {
    CHECK(nu(0.0) == 1.0);
    CHECK(nu(1e-9) == doctest::Approx(1.0).epsilon(1e-9));
    double prev = nu(1e-6);
    for (double x = 0.01; x <= 50.0; x += 0.01) {
        const double v = nu(x);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(nu(1e4) < 1e-3);
    CHECK(nu(1e4) > 0.0);
}

TEST_CASE("normal pdf and cdf") {
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-12));
}

TEST_CASE("C functions: closed forms, symmetry, degenerate endpoints") {
    CHECK(c_functions(1000, 500).c_diff == doctest::Approx(2.0 / 1000));
    for (std::size_t t = 2; t < 999; t += 37) {
        CHECK(c_functions(1000, t).c_diff == doctest::Approx(c_functions(1000, 1000 - t).c_diff));
        CHECK(c_functions(1000, t).c_w == doctest::Approx(c_functions(1000, 1000 - t).c_w));
        CHECK(c_functions(1000, t).c_w > 0.0);
    }
    CHECK_THROWS_AS(c_functions(1000, 1), DegenerateDenominator);
    CHECK_THROWS_AS(c_functions(1000, 999), DegenerateDenominator);
}

TEST_CASE("n = 1000, t = 250: C functions match permutation finite differences within 10%") {
    const auto g = gaussian_graph(1000, 5, 3, 4);
    const std::size_t t = 250;
    const std::size_t h = 10;
    const MomentTable table(pair_config_counts(g), {t - h, t});
    const std::size_t reps = 100000;
    std::vector<double> a(reps), b(reps), c(reps), d(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        auto eng = replicate_engine(23, r);
        const EdgeCountProfile p = edge_count_profile(g, random_time_labels(1000, eng));
        a[r] = table.z_w(t - h, p.within_before(t - h), p.within_after(t - h));
        b[r] = table.z_w(t, p.within_before(t), p.within_after(t));
        c[r] = table.z_diff(t - h, p.within_before(t - h), p.within_after(t - h));
        d[r] = table.z_diff(t, p.within_before(t), p.within_after(t));
    }
    const auto corr = [&](const std::vector<double>& x, const std::vector<double>& y) {
        long double mx = 0, my = 0;
        for (std::size_t i = 0; i < reps; ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= reps;
        my /= reps;
        long double sxx = 0, syy = 0, sxy = 0;
        for (std::size_t i = 0; i < reps; ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        return static_cast<double>(sxy / std::sqrt(sxx * syy));
    };
    const CFunctions cf = c_functions(1000, t);
    CHECK((1.0 - corr(a, b)) / h == doctest::Approx(cf.c_w).epsilon(0.10));
    CHECK((1.0 - corr(c, d)) / h == doctest::Approx(cf.c_diff).epsilon(0.10));
}

TEST_CASE("skewness correction") {
    double v = 0;
    CHECK(skewness_correction(3.0, 0.0, v));
    CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(skewness_correction(3.0, 0.05, v));
    CHECK(v > 0.0);
    CHECK_FALSE(skewness_correction(3.0, -0.2, v));
    CHECK(v == 1.0);
}

TEST_CASE("tail probability: clamped, decreasing in b, vanishing as b grows") {
    const auto g = gaussian_graph(400, 5, 3, 5);
    const auto pairs = pair_config_counts(g);
    const TailContext ctx(pairs, triple_config_counts(g, pairs), default_window(400));
    double prev = 1.0;
    for (double b = 1.0; b <= 8.0; b += 0.05) {
        const TailApproximation ta = tail_probability(ctx, b);
        CHECK(ta.p_w >= 0.0);
        CHECK(ta.p_w <= 1.0);
        CHECK(ta.p_diff >= 0.0);
        CHECK(ta.p_diff <= 1.0);
        CHECK(ta.p_m >= 0.0);
        CHECK(ta.p_m <= 1.0);
        CHECK(ta.p_m <= prev);
        if (ta.p_m > 0.0 && ta.p_m < 1.0) {
            CHECK(ta.p_m < prev);
        }
        prev = ta.p_m;
    }
    CHECK(tail_probability(ctx, 40.0).p_m < 1e-300);
}

TEST_CASE("zero skewness reduces to the uncorrected approximation") {
    const auto g = gaussian_graph(300, 5, 3, 6);
    const auto pairs = pair_config_counts(g);
    const ScanWindow w{20, 280};
    const TailContext plain = TailContext::without_skewness(pairs, w);
    const double b = 3.1;
    double sw = 0, sd = 0;
    for (std::size_t t = w.n0; t <= w.n1; ++t) {
        const CFunctions c = c_functions(300, t);
        sw += c.c_w * nu(std::sqrt(2 * b * b * c.c_w));
        sd += c.c_diff * nu(std::sqrt(2 * b * b * c.c_diff));
    }
    const double pw = b * normal_pdf(b) * sw;
    const double pd = 2 * b * normal_pdf(b) * sd;
    const TailApproximation ta = tail_probability(plain, b);
    CHECK(ta.p_w == doctest::Approx(pw).epsilon(1e-12));
    CHECK(ta.p_diff == doctest::Approx(pd).epsilon(1e-12));
    CHECK(ta.p_m == doctest::Approx(1 - (1 - pw) * (1 - pd)).epsilon(1e-12));
    CHECK(ta.flagged_w == 0);
}

TEST_CASE("t = 1 and t = n - 1 are degenerate before C_w is reached") {
    const auto g = gaussian_graph(50, 3, 3, 7);
    const auto pairs = pair_config_counts(g);
    const auto triples = triple_config_counts(g, pairs);
    CHECK_THROWS_AS(TailContext(pairs, triples, {1, 48}), DegenerateVariance);
    CHECK_THROWS_AS(TailContext(pairs, triples, {2, 49}), DegenerateVariance);
    const TailContext ctx(pairs, triples, {2, 48});
    CHECK(tail_probability(ctx, 3.0).skipped_t == 0);
}

TEST_CASE("critical value: monotone in alpha, NoRoot when unreachable") {
    const auto g = gaussian_graph(500, 10, 3, 9);
    const auto pairs = pair_config_counts(g);
    const TailContext ctx(pairs, triple_config_counts(g, pairs), {50, 450});
    const double b05 = critical_value(ctx, 0.05);
    const double b50 = critical_value(ctx, 0.5);
    const double b01 = critical_value(ctx, 0.01);
    CHECK(b50 < b05);
    CHECK(b05 < b01);
    CHECK(tail_probability(ctx, b05).p_m == doctest::Approx(0.05).epsilon(1e-3));
    CHECK_THROWS_AS(critical_value(ctx, 1e-200), NoRoot);
    CHECK_THROWS_AS(critical_value(ctx, 1.5), InvalidArgument);
}

}
