#include <knncp/analytic_pvalue.hpp>

#include <knncp/errors.hpp>
#include <knncp/triple_config_table.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace knncp {
namespace {

// Probability that x given nodes all land at times <= t and y other given
// nodes all land at times > t, under a uniform random ordering of n nodes.
long double side_probability(std::size_t n, std::size_t t, std::size_t x, std::size_t y) {
    if (x > t || y > n - t) {
        return 0;
    }
    long double p = 1;
    std::size_t slot = 0;
    for (std::size_t i = 0; i < x; ++i, ++slot) {
        p *= static_cast<long double>(t - i) / static_cast<long double>(n - slot);
    }
    for (std::size_t i = 0; i < y; ++i, ++slot) {
        p *= static_cast<long double>(n - t - i) / static_cast<long double>(n - slot);
    }
    return p;
}

struct Standardized {
    long double variance;
    long double third_central;
};

// Moments of a R1 + b R2.
Standardized combine(const RawMoments& m, long double a, long double b) {
    const long double mean = a * m.m10 + b * m.m01;
    const long double second = a * a * m.m20 + 2 * a * b * m.m11 + b * b * m.m02;
    const long double third =
        a * a * a * m.m30 + 3 * a * a * b * m.m21 + 3 * a * b * b * m.m12 + b * b * b * m.m03;
    return {second - mean * mean, third - 3 * mean * second + 2 * mean * mean * mean};
}

} // namespace

RawMoments raw_moments(const PairConfigCounts& pairs, const TripleConfigCounts& triples,
                       std::size_t n, std::size_t t) {
    const MomentRow second = null_moments(pairs, n, t);
    RawMoments m;
    m.m10 = second.mean1;
    m.m01 = second.mean2;
    m.m20 = second.second1;
    m.m02 = second.second2;
    m.m11 = static_cast<long double>(pairs.d3()) * null_fractions(n, t).r;

    for (const auto& info : kTripleConfigTable) {
        const std::int64_t count = triples[info.label];
        if (count == 0) {
            continue;
        }
        const auto w = static_cast<long double>(count);
        const auto nodes = static_cast<std::size_t>(info.distinct_nodes);
        m.m30 += w * side_probability(n, t, nodes, 0);
        m.m03 += w * side_probability(n, t, 0, nodes);
        if (info.isolated_num != 0) {
            const long double share = w * info.isolated_num / info.isolated_den;
            m.m21 += share * side_probability(n, t, nodes - 2, 2);
            m.m12 += share * side_probability(n, t, 2, nodes - 2);
        }
    }
    return m;
}

Skewness third_moments(const TripleConfigCounts& triples, const PairConfigCounts& pairs,
                       std::size_t n, std::size_t t) {
    const RawMoments m = raw_moments(pairs, triples, n, t);
    const auto nl = static_cast<long double>(n);
    const auto tl = static_cast<long double>(t);
    const long double a = (nl - tl - 1) / (nl - 2);
    const long double b = (tl - 1) / (nl - 2);
    const long double scale = std::max<long double>(1, m.m20 + m.m02);

    const Standardized w = combine(m, a, b);
    const Standardized diff = combine(m, 1, -1);
    if (w.variance <= kDegenerateVarianceThreshold * scale) {
        throw DegenerateVariance(t, "var(R_w) vanishes at t = " + std::to_string(t));
    }
    if (diff.variance <= kDegenerateVarianceThreshold * scale) {
        throw DegenerateVariance(t, "var(R_diff) vanishes at t = " + std::to_string(t));
    }
    return {static_cast<double>(w.third_central / std::pow(w.variance, 1.5L)),
            static_cast<double>(diff.third_central / std::pow(diff.variance, 1.5L))};
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double nu(double x) {
    if (x <= 0.0) {
        return 1.0;
    }
    const double h = 0.5 * x;
    // Phi(h) - 0.5 = erf(h / sqrt 2) / 2 keeps precision for small x.
    const double centered = 0.5 * std::erf(h / std::numbers::sqrt2);
    return (2.0 / x) * centered / (h * normal_cdf(h) + normal_pdf(h));
}

CFunctions c_functions(std::size_t n_, std::size_t t_) {
    if (t_ == 0 || t_ >= n_) {
        throw DegenerateDenominator("t = " + std::to_string(t_) + " outside [1, n-1]");
    }
    const auto n = static_cast<double>(n_);
    const auto t = static_cast<double>(t_);
    // t^2 - nt + n - 1 = (t - 1)(t - n + 1)
    if (t_ == 1 || t_ == n_ - 1) {
        throw DegenerateDenominator("C_w(t) has a zero denominator at t = " + std::to_string(t_));
    }
    const double quad = (t - 1.0) * (t - n + 1.0);
    CFunctions c;
    c.c_w = n * (n - 1.0) * (2.0 * t * t / n - 2.0 * t + 1.0) / (2.0 * t * (n - t) * quad);
    c.c_diff = n / (2.0 * t * (n - t));
    return c;
}

bool skewness_correction(double b, double gamma, double& value) {
    value = 1.0;
    const double disc = 1.0 + 2.0 * b * gamma;
    if (disc <= 0.0) {
        return false;
    }
    const double root = std::sqrt(disc);
    // (-1 + sqrt(1 + 2 b gamma)) / gamma, rearranged to stay finite as gamma -> 0.
    const double theta = 2.0 * b / (1.0 + root);
    const double shift = b - theta;
    value = std::exp(0.5 * shift * shift + gamma * theta * theta * theta / 6.0) / std::sqrt(root);
    return true;
}

TailContext::TailContext(const PairConfigCounts& pairs, const TripleConfigCounts& triples,
                         ScanWindow window)
    : n_(pairs.n), window_(window) {
    validate_window(window_, n_);
    points_.reserve(window_.size());
    for (std::size_t t = window_.n0; t <= window_.n1; ++t) {
        Point p;
        p.t = t;
        p.gamma = third_moments(triples, pairs, n_, t);
        try {
            p.c = c_functions(n_, t);
            p.usable_w = p.c.c_w > 0 && std::isfinite(p.c.c_w);
            p.usable_diff = p.c.c_diff > 0;
        } catch (const DegenerateDenominator&) {
            p.c.c_diff = static_cast<double>(n_) / (2.0 * static_cast<double>(t * (n_ - t)));
            p.usable_diff = true;
        }
        points_.push_back(p);
    }
}

TailContext TailContext::without_skewness(const PairConfigCounts& pairs, ScanWindow window) {
    TailContext ctx(pairs.n, window);
    validate_window(window, pairs.n);
    for (std::size_t t = window.n0; t <= window.n1; ++t) {
        Point p;
        p.t = t;
        try {
            p.c = c_functions(pairs.n, t);
            p.usable_w = p.c.c_w > 0 && std::isfinite(p.c.c_w);
            p.usable_diff = p.c.c_diff > 0;
        } catch (const DegenerateDenominator&) {
            p.c.c_diff = static_cast<double>(pairs.n) / (2.0 * static_cast<double>(t * (pairs.n - t)));
            p.usable_diff = true;
        }
        ctx.points_.push_back(p);
    }
    return ctx;
}

TailApproximation tail_probability(const TailContext& ctx, double b) {
    TailApproximation out;
    out.b = b;
    if (b <= 0.0) {
        out.p_w = out.p_diff = out.p_m = 1.0;
        return out;
    }
    double sum_w = 0.0;
    double sum_diff = 0.0;
    for (const auto& p : ctx.points()) {
        if (p.usable_w) {
            double s = 1.0;
            if (!skewness_correction(b, p.gamma.gamma_w, s)) {
                ++out.flagged_w;
            }
            sum_w += s * p.c.c_w * nu(std::sqrt(2.0 * b * b * p.c.c_w));
        } else {
            ++out.skipped_t;
        }
        if (p.usable_diff) {
            double s = 1.0;
            if (!skewness_correction(b, p.gamma.gamma_diff, s)) {
                ++out.flagged_diff;
            }
            sum_diff += s * p.c.c_diff * nu(std::sqrt(2.0 * b * b * p.c.c_diff));
        }
    }
    const double lead = b * normal_pdf(b);
    out.p_w = std::clamp(lead * sum_w, 0.0, 1.0);
    out.p_diff = std::clamp(2.0 * lead * sum_diff, 0.0, 1.0);
    // 1 - (1 - p_w)(1 - p_diff) without cancellation in the far tail.
    out.p_m = std::clamp(-std::expm1(std::log1p(-out.p_w) + std::log1p(-out.p_diff)), 0.0, 1.0);
    return out;
}

double critical_value(const TailContext& ctx, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    const auto p_at = [&](double b) { return tail_probability(ctx, b).p_m; };
    double lo = 1.0;
    double hi = 10.0;
    if (!(p_at(lo) >= alpha && p_at(hi) <= alpha)) {
        lo = 0.1;
        hi = 20.0;
        if (!(p_at(lo) >= alpha && p_at(hi) <= alpha)) {
            throw NoRoot("alpha = " + std::to_string(alpha) + " is not reached for b in [0.1, 20]");
        }
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        if (p_at(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace knncp
