#include <knncp/detector.hpp>

#include <knncp/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace knncp {

std::vector<Interval> seeded_intervals(std::size_t n, std::size_t min_seg, std::size_t max_depth) {
    std::vector<Interval> out;
    if (n == 0) {
        return out;
    }
    out.push_back({0, n, 0});
    const std::size_t shortest = std::max<std::size_t>(2 * min_seg, 2 * kMinObservations);
    for (std::size_t level = 1; level <= max_depth && level < 64; ++level) {
        const std::size_t len = n >> level;
        if (len < shortest) {
            break;
        }
        const std::size_t count = 2 * ((n + len - 1) / len) - 1;
        const double shift = static_cast<double>(n - len) / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) {
            const auto begin = static_cast<std::size_t>(std::floor(static_cast<double>(i) * shift + 0.5));
            const Interval iv{std::min(begin, n - len), std::min(begin, n - len) + len, level};
            if (out.back().begin != iv.begin || out.back().end != iv.end) {
                out.push_back(iv);
            }
        }
    }
    return out;
}

namespace {

struct Candidate {
    Interval interval;
    ScanReport report;
    std::size_t tau = 0;
    double p = 1.0;
};

bool stronger(const Candidate& a, const Candidate& b) {
    if (a.p != b.p) {
        return a.p < b.p;
    }
    if (a.report.max_stat != b.report.max_stat) {
        return a.report.max_stat > b.report.max_stat;
    }
    return a.interval.begin < b.interval.begin;
}

} // namespace

SegmentationResult detect_multiple(const DataMatrix& data, const SegmentationOptions& options) {
    require_min_observations(data);
    const std::size_t n = data.n();
    SegmentationResult result;
    result.schedule = seeded_intervals(n, options.min_seg, options.max_depth);
    result.alpha_per_test = options.detect.alpha;
    if (options.bonferroni && !result.schedule.empty()) {
        result.alpha_per_test /= static_cast<double>(result.schedule.size());
    }

    std::vector<Candidate> candidates;
    for (std::size_t idx = 0; idx < result.schedule.size(); ++idx) {
        const Interval& iv = result.schedule[idx];
        const std::size_t len = iv.length();
        const std::string where = "[" + std::to_string(iv.begin + 1) + ", " + std::to_string(iv.end) + "]";
        if (options.detect.k >= len) {
            result.diagnostics.push_back("interval " + where + " skipped: shorter than k + 1");
            continue;
        }
        ScanWindow window = default_window(len);
        window.n0 = std::max(window.n0, options.min_seg);
        window.n1 = len > window.n0 ? std::min(window.n1, len - window.n0) : 0;
        if (window.empty()) {
            result.diagnostics.push_back("interval " + where + " skipped: empty candidate window");
            continue;
        }
        DetectOptions local = options.detect;
        local.window = window;
        local.alpha = result.alpha_per_test;
        local.seed = options.detect.seed + idx;
        local.keep_trace = false;
        try {
            ScanReport report = detect_single(data.slice_rows(iv.begin, iv.end), local);
            if (report.tested && report.rejected) {
                const double p = *report.decision_p();
                const std::size_t tau = iv.begin + report.tau_hat;
                candidates.push_back({iv, std::move(report), tau, p});
            }
        } catch (const DegenerateVariance& e) {
            result.diagnostics.push_back("interval " + where + " skipped: " + e.what());
        }
    }

    // Greedy: accept the strongest candidate, then keep only candidates whose
    // interval lies inside one of the two flanks it creates.
    std::vector<Interval> regions{{0, n, 0}};
    for (;;) {
        const Candidate* best = nullptr;
        for (const Candidate& c : candidates) {
            const bool inside = std::any_of(regions.begin(), regions.end(), [&](const Interval& r) {
                return c.interval.begin >= r.begin && c.interval.end <= r.end;
            });
            const bool spaced = std::all_of(result.change_points.begin(), result.change_points.end(),
                                            [&](const ChangePoint& cp) {
                                                const std::size_t gap = c.tau > cp.tau ? c.tau - cp.tau : cp.tau - c.tau;
                                                return gap >= options.min_seg;
                                            });
            if (inside && spaced && (best == nullptr || stronger(c, *best))) {
                best = &c;
            }
        }
        if (best == nullptr) {
            break;
        }
        result.change_points.push_back({best->tau, best->interval, best->report});
        const std::size_t tau = best->tau;
        for (std::size_t r = 0; r < regions.size(); ++r) {
            if (regions[r].begin < tau && tau < regions[r].end) {
                const Interval right{tau, regions[r].end, 0};
                regions[r].end = tau;
                regions.push_back(right);
                break;
            }
        }
    }
    std::sort(result.change_points.begin(), result.change_points.end(),
              [](const ChangePoint& a, const ChangePoint& b) { return a.tau < b.tau; });
    return result;
}

} // namespace knncp
