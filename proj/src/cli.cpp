#include <knncp/cli.hpp>

#include <knncp/analytic_pvalue.hpp>
#include <knncp/detector.hpp>
#include <knncp/errors.hpp>
#include <knncp/parallel.hpp>
#include <knncp/permutation.hpp>
#include <knncp/report.hpp>
#include <knncp/simlab.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace knncp {
namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct InputFlags {
    std::string input;
    std::string format = "csv";
    std::string graph_in;
};

struct GraphFlags {
    std::size_t k = 5;
    double eps = 0.0;
    std::size_t max_checks = 0;
};

struct WindowFlags {
    std::optional<std::size_t> n0;
    std::optional<std::size_t> n1;
};

void add_input(CLI::App* cmd, InputFlags& f, bool allow_graph) {
    cmd->add_option("--input", f.input, "observation matrix, one row per time point");
    cmd->add_option("--format", f.format, "csv or raw")->capture_default_str();
    if (allow_graph) {
        cmd->add_option("--graph-in", f.graph_in, "precomputed edge CSV (source,target; 1-based)");
    }
}

void add_graph(CLI::App* cmd, GraphFlags& f) {
    cmd->add_option("--k", f.k, "neighbors per observation")->capture_default_str();
    cmd->add_option("--eps", f.eps, "approximation factor; 0 is exact")->capture_default_str();
    cmd->add_option("--max-checks", f.max_checks, "distance evaluations per query; 0 is unbounded")
        ->capture_default_str();
}

void add_window(CLI::App* cmd, WindowFlags& f) {
    cmd->add_option("--n0", f.n0, "first candidate time (default ceil(0.05 n))");
    cmd->add_option("--n1", f.n1, "last candidate time (default n - n0)");
}

void check_graph_flags(const GraphFlags& f) {
    if (f.k == 0) {
        throw UsageError("--k must be at least 1");
    }
    if (!(f.eps >= 0.0) || !std::isfinite(f.eps)) {
        throw UsageError("--eps must be a finite value >= 0");
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }
}

GraphOptions graph_options(const GraphFlags& f) {
    GraphOptions g;
    g.eps = f.eps;
    g.max_checks = f.max_checks;
    return g;
}

std::optional<ScanWindow> resolve_window(const WindowFlags& f, std::size_t n) {
    if (!f.n0 && !f.n1) {
        return std::nullopt;
    }
    ScanWindow w = default_window(n);
    if (f.n0) {
        w.n0 = *f.n0;
        w.n1 = n > w.n0 ? n - w.n0 : 0;
    }
    if (f.n1) {
        w.n1 = *f.n1;
    }
    if (w.n0 < 1 || w.n1 > n - 1 || w.n0 > w.n1) {
        throw UsageError("window [" + std::to_string(w.n0) + ", " + std::to_string(w.n1) +
                         "] must satisfy 1 <= n0 <= n1 <= n - 1 = " + std::to_string(n - 1));
    }
    return w;
}

DataMatrix load_input(const InputFlags& f) {
    if (f.input.empty()) {
        throw UsageError("--input is required");
    }
    MatrixFormat format;
    try {
        format = parse_matrix_format(f.format);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return load_matrix(f.input, format);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void print_report(const ScanReport& r, std::ostream& out) {
    out << "n = " << r.n << ", d = " << r.d << ", k = " << r.k << ", window [" << r.window.n0 << ", "
        << r.window.n1 << "], mode " << to_string(r.mode) << '\n';
    if (!r.tested) {
        out << "not tested: " << r.reason << '\n';
        return;
    }
    out << "tau_hat = " << r.tau_hat << ", max_stat = " << fixed(r.max_stat, 4) << '\n';
    if (r.p_analytic) {
        out << "p_analytic = " << format_pvalue(*r.p_analytic) << '\n';
    }
    if (r.p_perm) {
        out << "p_perm = " << format_pvalue(*r.p_perm) << " (se " << fixed(*r.se, 4) << ", "
            << r.permutations << " permutations)\n";
    }
    out << (r.rejected ? "change-point detected" : "no change-point") << " at alpha = " << r.alpha << '\n';
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

struct DetectFlags {
    InputFlags input;
    GraphFlags graph;
    WindowFlags window;
    double alpha = 0.05;
    std::string mode = "auto";
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    bool multiple = false;
    std::size_t min_seg = 30;
    std::size_t max_depth = 8;
    bool bonferroni = false;
    std::string json;
    std::string trace;
    bool timing = false;
};

int cmd_detect(const DetectFlags& f, std::ostream& out, std::ostream& err) {
    check_graph_flags(f.graph);
    check_alpha(f.alpha);
    if (f.permutations == 0) {
        throw UsageError("--permutations must be at least 1");
    }
    DetectOptions opts;
    opts.k = f.graph.k;
    opts.graph = graph_options(f.graph);
    opts.alpha = f.alpha;
    opts.permutations = f.permutations;
    opts.seed = f.seed;
    opts.keep_trace = !f.trace.empty();
    try {
        opts.mode = parse_detect_mode(f.mode);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    ReportOptions ropts;
    ropts.timing = f.timing;

    if (f.multiple) {
        if (!f.input.graph_in.empty()) {
            throw UsageError("--multiple rebuilds graphs per interval and cannot use --graph-in");
        }
        const DataMatrix data = load_input(f.input);
        SegmentationOptions sopts;
        sopts.detect = opts;
        sopts.min_seg = f.min_seg;
        sopts.max_depth = f.max_depth;
        sopts.bonferroni = f.bonferroni;
        const SegmentationResult res = detect_multiple(data, sopts);
        out << res.change_points.size() << " change-point(s) from " << res.schedule.size()
            << " seeded intervals (alpha per test " << res.alpha_per_test << ")\n";
        for (const ChangePoint& cp : res.change_points) {
            out << "  tau = " << cp.tau << " in [" << cp.interval.begin + 1 << ", " << cp.interval.end
                << "], p = " << format_pvalue(*cp.report.decision_p()) << '\n';
        }
        for (const std::string& d : res.diagnostics) {
            err << "note: " << d << '\n';
        }
        if (!f.json.empty()) {
            write_or_print(f.json, segmentation_json(res, data, sopts, ropts), out);
        }
        return kExitOk;
    }

    std::optional<DataMatrix> data;
    std::optional<DirectedKnnGraph> graph;
    std::size_t n = 0;
    if (!f.input.graph_in.empty()) {
        graph = read_graph_csv(f.input.graph_in);
        n = graph->n();
        if (!f.input.input.empty()) {
            data = load_input(f.input);
            if (data->n() != n) {
                throw UsageError("--graph-in has " + std::to_string(n) + " nodes but --input has " +
                                 std::to_string(data->n()) + " rows");
            }
        }
    } else {
        data = load_input(f.input);
        n = data->n();
    }
    opts.window = resolve_window(f.window, n);

    ScanReport report;
    try {
        report = graph ? detect_on_graph(*graph, data ? data->d() : 0, opts) : detect_single(*data, opts);
    } catch (const DegenerateVariance& e) {
        if (!f.json.empty()) {
            ScanReport failed;
            failed.n = n;
            failed.d = data ? data->d() : 0;
            failed.k = graph ? graph->k() : opts.k;
            failed.eps = opts.graph.eps;
            failed.seed = opts.seed;
            failed.alpha = opts.alpha;
            failed.window = opts.window ? *opts.window : default_window(n);
            failed.reason = "degenerate variance";
            failed.degenerate = e.what();
            write_or_print(f.json, report_json(failed, ropts), out);
        }
        throw;
    }
    if (f.json != "-") {
        print_report(report, out);
    }
    if (!f.json.empty()) {
        write_or_print(f.json, report_json(report, ropts), out);
    }
    if (!f.trace.empty() && report.tested) {
        write_trace(report, f.trace);
    }
    return kExitOk;
}

struct CritvalFlags {
    InputFlags input;
    GraphFlags graph;
    WindowFlags window;
    std::vector<double> alphas{0.05};
    std::string mode = "analytic";
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
};

int cmd_critval(const CritvalFlags& f, std::ostream& out) {
    check_graph_flags(f.graph);
    for (double a : f.alphas) {
        check_alpha(a);
    }
    DetectMode mode;
    try {
        mode = parse_detect_mode(f.mode);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (mode == DetectMode::automatic) {
        mode = DetectMode::analytic;
    }
    DirectedKnnGraph graph;
    if (!f.input.graph_in.empty()) {
        graph = read_graph_csv(f.input.graph_in);
    } else {
        const DataMatrix data = load_input(f.input);
        if (f.graph.k >= data.n()) {
            throw UsageError("--k must be below n = " + std::to_string(data.n()));
        }
        graph = build_graph(data, f.graph.k, graph_options(f.graph));
    }
    const std::size_t n = graph.n();
    const ScanWindow window = resolve_window(f.window, n).value_or(default_window(n));
    const PairConfigCounts pairs = pair_config_counts(graph);
    out << "n = " << n << ", k = " << graph.k() << ", window [" << window.n0 << ", " << window.n1 << "]\n";

    std::vector<double> maxima;
    if (mode != DetectMode::analytic) {
        PermutationPlan plan;
        plan.replicates = f.permutations;
        plan.seed = f.seed;
        plan.window = window;
        maxima = permutation_maxima(graph, plan);
    }
    std::optional<TailContext> ctx;
    if (mode != DetectMode::permutation) {
        ctx.emplace(pairs, triple_config_counts(graph, pairs), window);
    }
    for (double alpha : f.alphas) {
        out << "alpha = " << alpha;
        if (ctx) {
            out << "  analytic " << fixed(critical_value(*ctx, alpha), 4);
        }
        if (!maxima.empty()) {
            out << "  permutation " << fixed(quantile_from_maxima(maxima, alpha), 4);
        }
        out << '\n';
    }
    return kExitOk;
}

struct GraphCmdFlags {
    InputFlags input;
    GraphFlags graph;
    std::string out_path;
};

int cmd_graph(const GraphCmdFlags& f, std::ostream& out) {
    check_graph_flags(f.graph);
    if (f.out_path.empty()) {
        throw UsageError("--out is required");
    }
    const DataMatrix data = load_input(f.input);
    if (f.graph.k >= data.n()) {
        throw UsageError("--k must be below n = " + std::to_string(data.n()));
    }
    const DirectedKnnGraph graph = build_graph(data, f.graph.k, graph_options(f.graph));
    write_graph_csv(graph, f.out_path);
    out << "wrote " << graph.edge_count() << " edges (n = " << graph.n() << ", k = " << graph.k() << ")\n";
    return kExitOk;
}

struct SimulateFlags {
    std::string config;
    std::string preset;
    double scale = 1.0;
    std::optional<std::size_t> replicates;
    std::optional<std::uint64_t> seed;
    std::string out_path = "-";
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
    simlab::StudyConfig cfg;
    try {
        if (!f.config.empty() == !f.preset.empty()) {
            throw UsageError("give exactly one of --config or --preset");
        }
        if (!f.preset.empty()) {
            cfg = simlab::study_preset(f.preset);
        } else {
            std::ifstream in(f.config);
            if (!in) {
                throw IoError("cannot read '" + f.config + "'");
            }
            std::stringstream buf;
            buf << in.rdbuf();
            cfg = simlab::parse_study_config(buf.str());
        }
        if (f.replicates) {
            cfg.replicates = *f.replicates;
        }
        if (f.seed) {
            cfg.seed = *f.seed;
        }
        simlab::scale_replicates(cfg, f.scale);
        // Resolve every scenario before any simulation runs.
        if (cfg.study == "power" || cfg.study == "type2") {
            for (const std::string& s : cfg.scenarios) {
                const auto at = s.find('@');
                const std::string name = s.substr(0, at);
                const std::size_t d = at == std::string::npos ? 25 : std::stoul(s.substr(at + 1));
                if (name == "S2w") {
                    simlab::power_scenario_s2_weibull(d);
                } else if (cfg.study == "power") {
                    simlab::power_scenario(name, d);
                } else {
                    simlab::type2_scenario(name, d);
                }
            }
        } else if (cfg.study == "sensitivity") {
            for (const std::string& c : cfg.changes) {
                simlab::parse_change_type(c);
            }
        }
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    } catch (const std::logic_error& e) {
        throw UsageError(std::string("bad scenario dimension: ") + e.what());
    }

    std::string csv;
    if (cfg.study == "size") {
        csv = simlab::size_csv(simlab::run_size_study(cfg));
    } else if (cfg.study == "power") {
        csv = simlab::count_csv(simlab::run_power_study(cfg), "rejections");
    } else if (cfg.study == "type2") {
        csv = simlab::count_csv(simlab::run_type2_study(cfg), "not_rejected");
    } else {
        csv = simlab::curve_csv(simlab::run_sensitivity_study(cfg));
    }
    write_or_print(f.out_path, csv, out);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"kNN-graph change-point detection"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "worker threads (default: KNNCP_THREADS or all cores)");

    DetectFlags detect;
    CLI::App* d = app.add_subcommand("detect", "test for a change-point and report its location");
    add_input(d, detect.input, true);
    add_graph(d, detect.graph);
    add_window(d, detect.window);
    d->add_option("--alpha", detect.alpha, "significance level")->capture_default_str();
    d->add_option("--mode", detect.mode, "auto, analytic, permutation or both")->capture_default_str();
    d->add_option("--permutations", detect.permutations, "permutation replicates")->capture_default_str();
    d->add_option("--seed", detect.seed, "permutation seed")->capture_default_str();
    d->add_flag("--multiple", detect.multiple, "estimate several change-points by seeded binary segmentation");
    d->add_option("--min-seg", detect.min_seg, "minimum spacing of change-points")->capture_default_str();
    d->add_option("--max-depth", detect.max_depth, "interval halvings in the seeded schedule")
        ->capture_default_str();
    d->add_flag("--bonferroni", detect.bonferroni, "divide alpha by the number of seeded intervals");
    d->add_option("--json", detect.json, "JSON report path ('-' for stdout)");
    d->add_option("--trace", detect.trace, "per-t CSV path");
    d->add_flag("--timing", detect.timing, "include runtime_ms in the JSON report");
    d->add_option("--threads", threads, "worker threads");

    CritvalFlags critval;
    CLI::App* c = app.add_subcommand("critval", "critical value of the scan statistic for a graph");
    add_input(c, critval.input, true);
    add_graph(c, critval.graph);
    add_window(c, critval.window);
    c->add_option("--alpha", critval.alphas, "significance level(s)")->capture_default_str();
    c->add_option("--mode", critval.mode, "analytic, permutation or both")->capture_default_str();
    c->add_option("--permutations", critval.permutations, "permutation replicates")->capture_default_str();
    c->add_option("--seed", critval.seed, "permutation seed")->capture_default_str();
    c->add_option("--threads", threads, "worker threads");

    GraphCmdFlags graph;
    CLI::App* g = app.add_subcommand("graph", "build the k-NN graph and write it as an edge CSV");
    add_input(g, graph.input, false);
    add_graph(g, graph.graph);
    g->add_option("--out", graph.out_path, "edge CSV path");
    g->add_option("--threads", threads, "worker threads");

    SimulateFlags sim;
    CLI::App* s = app.add_subcommand("simulate", "run a size, power, type II or sensitivity study");
    s->add_option("--config", sim.config, "key = value study file");
    s->add_option("--preset", sim.preset, "named study preset");
    s->add_option("--scale", sim.scale, "replicate multiplier")->capture_default_str();
    s->add_option("--replicates", sim.replicates, "replicates per cell");
    s->add_option("--seed", sim.seed, "base seed");
    s->add_option("--out", sim.out_path, "CSV path ('-' for stdout)")->capture_default_str();
    s->add_option("--threads", threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (threads > 0) {
            set_default_workers(threads);
        }
        if (d->parsed()) {
            return cmd_detect(detect, out, err);
        }
        if (c->parsed()) {
            return cmd_critval(critval, out);
        }
        if (g->parsed()) {
            return cmd_graph(graph, out);
        }
        return cmd_simulate(sim, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotEnoughNeighbors& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnknownFamily& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace knncp
