#pragma once

#include <knncp/edge_stats.hpp>
#include <knncp/knn_graph.hpp>
#include <knncp/matrix_io.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace knncp {

enum class DetectMode { automatic, analytic, permutation, both };

DetectMode parse_detect_mode(std::string_view name);
std::string_view to_string(DetectMode mode);

/// Sequences at least this long default to the analytic p-value.
inline constexpr std::size_t kAnalyticMinLength = 500;

struct DetectOptions {
    std::size_t k = 5;
    GraphOptions graph;
    /// Unset: default_window(n).
    std::optional<ScanWindow> window;
    double alpha = 0.05;
    DetectMode mode = DetectMode::automatic;
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    bool keep_trace = false;
};

struct ScanReport {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t k = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    DetectMode mode = DetectMode::analytic; // resolved, never automatic
    ScanWindow window;
    std::size_t permutations = 0;

    bool tested = false;
    std::string reason; // why tested is false
    std::size_t tau_hat = 0;
    double max_stat = 0.0;
    std::optional<double> p_analytic;
    std::optional<double> p_perm;
    std::optional<double> se;
    bool rejected = false;

    std::size_t skipped_t = 0;
    std::size_t flagged_t = 0;
    std::optional<std::string> degenerate;
    double runtime_ms = 0.0;

    std::optional<EdgeCountProfile> profile;
    std::optional<ScanProcesses> trace;

    /// The p-value the rejection decision uses.
    std::optional<double> decision_p() const { return p_perm ? p_perm : p_analytic; }
};

/// Builds the graph, scans the window and attaches the requested p-values.
/// A degenerate graph throws DegenerateVariance carrying a remediation hint.
ScanReport detect_single(const DataMatrix& data, const DetectOptions& options);

/// Same on a supplied graph; d is recorded in the report only.
ScanReport detect_on_graph(const DirectedKnnGraph& graph, std::size_t d, const DetectOptions& options);

/// Seeded-interval schedule entry, 0-based half-open rows [begin, end).
struct Interval {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t level = 0;

    std::size_t length() const noexcept { return end - begin; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct SegmentationOptions {
    DetectOptions detect;
    /// Minimum distance between change-points and from an interval boundary.
    std::size_t min_seg = 30;
    /// Number of halvings of the interval length below the full sequence.
    std::size_t max_depth = 8;
    bool bonferroni = false;
};

struct ChangePoint {
    std::size_t tau = 0; // 1-based: the last observation before the change
    Interval interval;
    ScanReport report;
};

struct SegmentationResult {
    std::vector<ChangePoint> change_points; // increasing tau
    std::vector<Interval> schedule;
    double alpha_per_test = 0.0;
    std::vector<std::string> diagnostics;
};

/// Lengths n, n/2, n/4, ... down to 2 min_seg (and at most max_depth halvings);
/// level l holds 2 ceil(n / len) - 1 evenly shifted intervals of length len.
std::vector<Interval> seeded_intervals(std::size_t n, std::size_t min_seg, std::size_t max_depth);

SegmentationResult detect_multiple(const DataMatrix& data, const SegmentationOptions& options);

} // namespace knncp
