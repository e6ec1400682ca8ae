#pragma once

#include <knncp/detector.hpp>

#include <filesystem>
#include <string>

namespace knncp {

inline constexpr int kReportSchemaVersion = 1;

struct ReportOptions {
    /// runtime_ms is wall-clock, so it is left out unless asked for; without
    /// it identical runs produce identical bytes.
    bool timing = false;
};

std::string report_json(const ScanReport& report, const ReportOptions& options = {});
std::string segmentation_json(const SegmentationResult& result, const DataMatrix& data,
                              const SegmentationOptions& options, const ReportOptions& report_options = {});

/// Writes text to path; throws IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

void write_report(const ScanReport& report, const std::filesystem::path& path,
                  const ReportOptions& options = {});

/// Per-t CSV "t,r1,r2,z_w,z_diff,m" over the window. Needs keep_trace.
std::string trace_csv(const ScanReport& report);
void write_trace(const ScanReport& report, const std::filesystem::path& path);

/// "<0.001" below 1e-3, otherwise three decimals.
std::string format_pvalue(double p);

} // namespace knncp
