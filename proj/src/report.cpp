#include <knncp/report.hpp>

#include <knncp/errors.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>

namespace knncp {
namespace {

using nlohmann::ordered_json;

ordered_json params_json(const ScanReport& r) {
    ordered_json p;
    p["k"] = r.k;
    p["eps"] = r.eps;
    p["n0"] = r.window.n0;
    p["n1"] = r.window.n1;
    p["alpha"] = r.alpha;
    p["mode"] = std::string(to_string(r.mode));
    if (r.permutations > 0) {
        p["permutations"] = r.permutations;
    }
    p["seed"] = r.seed;
    return p;
}

ordered_json result_json(const ScanReport& r) {
    ordered_json res;
    res["tested"] = r.tested;
    if (!r.tested) {
        res["reason"] = r.reason;
        return res;
    }
    res["tau_hat"] = r.tau_hat;
    res["max_stat"] = r.max_stat;
    if (r.p_analytic) {
        res["p_analytic"] = *r.p_analytic;
    }
    if (r.p_perm) {
        res["p_perm"] = *r.p_perm;
    }
    if (r.se) {
        res["se"] = *r.se;
    }
    res["rejected"] = r.rejected;
    return res;
}

ordered_json diagnostics_json(const ScanReport& r, const ReportOptions& options) {
    ordered_json d;
    d["skipped_t"] = r.skipped_t;
    d["flagged_t"] = r.flagged_t;
    if (r.degenerate) {
        d["degenerate"] = *r.degenerate;
    }
    if (options.timing) {
        d["runtime_ms"] = r.runtime_ms;
    }
    return d;
}

ordered_json report_object(const ScanReport& r, const ReportOptions& options) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = {{"n", r.n}, {"d", r.d}};
    j["params"] = params_json(r);
    j["result"] = result_json(r);
    j["diagnostics"] = diagnostics_json(r, options);
    return j;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string report_json(const ScanReport& report, const ReportOptions& options) {
    return report_object(report, options).dump() + "\n";
}

std::string segmentation_json(const SegmentationResult& result, const DataMatrix& data,
                              const SegmentationOptions& options, const ReportOptions& report_options) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = {{"n", data.n()}, {"d", data.d()}};
    ordered_json p;
    p["k"] = options.detect.k;
    p["eps"] = options.detect.graph.eps;
    p["alpha"] = options.detect.alpha;
    p["alpha_per_test"] = result.alpha_per_test;
    p["mode"] = std::string(to_string(options.detect.mode));
    p["seed"] = options.detect.seed;
    p["min_seg"] = options.min_seg;
    p["max_depth"] = options.max_depth;
    p["bonferroni"] = options.bonferroni;
    j["params"] = p;
    ordered_json cps = ordered_json::array();
    for (const ChangePoint& cp : result.change_points) {
        ordered_json c;
        c["tau"] = cp.tau;
        c["interval"] = {cp.interval.begin + 1, cp.interval.end};
        c["result"] = result_json(cp.report);
        c["params"] = params_json(cp.report);
        cps.push_back(c);
    }
    j["result"] = {{"tested", true}, {"change_points", cps}};
    ordered_json schedule = ordered_json::array();
    for (const Interval& iv : result.schedule) {
        schedule.push_back({iv.begin + 1, iv.end});
    }
    ordered_json diag;
    diag["intervals"] = schedule.size();
    diag["messages"] = result.diagnostics;
    (void)report_options;
    j["diagnostics"] = diag;
    j["schedule"] = schedule;
    return j.dump() + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

void write_report(const ScanReport& report, const std::filesystem::path& path, const ReportOptions& options) {
    write_text(path, report_json(report, options));
}

std::string trace_csv(const ScanReport& report) {
    if (!report.trace || !report.profile) {
        throw InvalidArgument("report carries no per-t trace");
    }
    std::string out = "t,r1,r2,z_w,z_diff,m\n";
    const ScanProcesses& s = *report.trace;
    for (std::size_t t = s.window.n0; t <= s.window.n1; ++t) {
        const std::size_t i = t - s.window.n0;
        out += std::to_string(t) + ',' + std::to_string(report.profile->within_before(t)) + ',' +
               std::to_string(report.profile->within_after(t)) + ',' + shortest(s.z_w[i]) + ',' +
               shortest(s.z_diff[i]) + ',' + shortest(s.m[i]) + '\n';
    }
    return out;
}

void write_trace(const ScanReport& report, const std::filesystem::path& path) {
    write_text(path, trace_csv(report));
}

std::string format_pvalue(double p) {
    if (p < 1e-3) {
        return "<0.001";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", p);
    return buf;
}

} // namespace knncp
