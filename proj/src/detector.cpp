#include <knncp/detector.hpp>

#include <knncp/analytic_pvalue.hpp>
#include <knncp/errors.hpp>
#include <knncp/permutation.hpp>

#include <chrono>
#include <string>

namespace knncp {

DetectMode parse_detect_mode(std::string_view name) {
    if (name == "auto") {
        return DetectMode::automatic;
    }
    if (name == "analytic") {
        return DetectMode::analytic;
    }
    if (name == "permutation") {
        return DetectMode::permutation;
    }
    if (name == "both") {
        return DetectMode::both;
    }
    throw InvalidArgument("unknown mode '" + std::string(name) + "' (auto, analytic, permutation, both)");
}

std::string_view to_string(DetectMode mode) {
    switch (mode) {
    case DetectMode::automatic:
        return "auto";
    case DetectMode::analytic:
        return "analytic";
    case DetectMode::permutation:
        return "permutation";
    case DetectMode::both:
        return "both";
    }
    return "auto";
}

ScanReport detect_on_graph(const DirectedKnnGraph& graph, std::size_t d, const DetectOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const std::size_t n = graph.n();

    ScanReport report;
    report.n = n;
    report.d = d;
    report.k = graph.k();
    report.eps = options.graph.eps;
    report.seed = options.seed;
    report.alpha = options.alpha;
    report.mode = options.mode;
    if (report.mode == DetectMode::automatic) {
        report.mode = n >= kAnalyticMinLength ? DetectMode::analytic : DetectMode::permutation;
    }
    const bool analytic = report.mode == DetectMode::analytic || report.mode == DetectMode::both;
    const bool permutation = report.mode == DetectMode::permutation || report.mode == DetectMode::both;
    if (permutation) {
        report.permutations = options.permutations;
    }

    if (n < kMinObservations) {
        throw TooFewObservations("need at least " + std::to_string(kMinObservations) +
                                 " observations, got " + std::to_string(n));
    }
    report.window = options.window ? *options.window : default_window(n);
    if (report.window.empty()) {
        report.reason = "empty candidate window";
        return report;
    }
    validate_window(report.window, n);

    const PairConfigCounts pairs = pair_config_counts(graph);
    std::optional<MomentTable> moments;
    try {
        moments.emplace(pairs, report.window);
    } catch (const DegenerateVariance& e) {
        throw DegenerateVariance(e.t(), std::string(e.what()) +
                                            " (in-degrees all equal k; perturb k or the data)");
    }

    const EdgeCountProfile profile = edge_count_profile(graph);
    ScanProcesses scan = scan_processes(profile, *moments);
    report.tested = true;
    report.tau_hat = scan.tau_hat;
    report.max_stat = scan.max_stat;

    if (analytic) {
        const TripleConfigCounts triples = triple_config_counts(graph, pairs);
        const TailContext ctx(pairs, triples, report.window);
        const TailApproximation tail = tail_probability(ctx, report.max_stat);
        report.p_analytic = tail.p_m;
        report.skipped_t = tail.skipped_t;
        report.flagged_t = tail.flagged_w + tail.flagged_diff;
    }
    if (permutation) {
        PermutationPlan plan;
        plan.replicates = options.permutations;
        plan.seed = options.seed;
        plan.window = report.window;
        plan.workers = options.graph.workers;
        const PermutationPValue pv = pvalue_from_maxima(permutation_maxima(graph, *moments, plan), report.max_stat);
        report.p_perm = pv.p;
        report.se = pv.se;
    }
    report.rejected = *report.decision_p() <= report.alpha;

    if (options.keep_trace) {
        report.profile = profile;
        report.trace = std::move(scan);
    }
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
}

ScanReport detect_single(const DataMatrix& data, const DetectOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    require_min_observations(data);
    if (options.k == 0 || options.k >= data.n()) {
        throw NotEnoughNeighbors("k = " + std::to_string(options.k) + " needs 1 <= k <= n - 1 = " +
                                 std::to_string(data.n() - 1));
    }
    const DirectedKnnGraph graph = build_graph(data, options.k, options.graph);
    ScanReport report = detect_on_graph(graph, data.d(), options);
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace knncp
