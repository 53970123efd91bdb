#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vads/vads.hpp"

namespace {

using namespace vads;
using nlohmann::json;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string extension(const std::string& path) { return std::filesystem::path(path).extension().string(); }

Dataset load_dataset(const std::string& path, Metric metric) {
    const auto ext = extension(path);
    if (ext == ".vads") return io::read_vads(path);
    if (ext == ".fvecs") return io::read_fvecs(path, metric);
    if (ext == ".bin" || ext == ".fbin") return io::read_bin(path, metric);
    throw UsageError("unrecognized dataset extension '" + ext + "' (expected .vads, .fvecs or .bin)");
}

std::vector<Point> load_points(const std::string& path, Metric metric) {
    const Dataset qs = load_dataset(path, metric);
    std::vector<Point> out;
    for (std::size_t i = 0; i < qs.size(); ++i) out.emplace_back(qs.point(i).begin(), qs.point(i).end());
    return out;
}

// ---------------------------------------------------------------------------

struct GenOpts {
    std::string family = "diskann-hard";
    std::size_t n = 1000;
    double alpha = 2.0;
    double eps = 0.005;
    double scale = 1.0;
    std::optional<double> answer_gap;
    bool ratio = false;
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    std::size_t queries = 100;
    std::string metric = "l2";
    std::size_t depth = 5;
    std::string out = "instance";
};

int cmd_gen(const GenOpts& o) {
    InstanceSpec spec;
    spec.family = parse_family(o.family);
    spec.n = o.n;
    spec.alpha = o.alpha;
    spec.epsilon = o.eps;
    spec.scale = o.scale;
    spec.answer_gap = o.answer_gap;
    spec.seed = o.seed;
    spec.dim = o.dim;
    spec.num_queries = o.queries;
    spec.metric = parse_metric(o.metric);
    spec.truth_depth = o.depth;
    auto inst = generate(spec);
    if (o.ratio) {
        if (o.answer_gap) throw UsageError("--ratio and --answer-gap are mutually exclusive");
        inst = with_default_ratio_modifier(inst);
    }
    save_instance(o.out, inst);
    if (inst.meta.contains("warnings")) {
        for (const auto& w : inst.meta["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    }
    std::cout << json{{"prefix", o.out},
                      {"n", inst.dataset.size()},
                      {"dim", inst.dataset.dim()},
                      {"queries", inst.queries.size()},
                      {"ground_truth", inst.ground_truth}}
                     .dump()
              << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

struct BuildOpts {
    std::string data;
    std::string metric = "l2";
    std::string mode = "fast";
    double alpha = 2.0;
    std::optional<std::size_t> r;
    std::size_t l = 125;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    bool allow_alpha_one = false;
    std::string out = "graph.vapg";
    std::optional<std::string> log;
};

int cmd_build(const BuildOpts& o) {
    const Dataset ds = load_dataset(o.data, parse_metric(o.metric));
    BuildParams p;
    p.alpha = o.alpha;
    p.r = o.r;
    p.l_build = o.l;
    p.seed = o.seed;
    p.workers = o.workers;
    p.allow_alpha_one = o.allow_alpha_one;
    BuildLog log;
    const auto g = parse_build_mode(o.mode) == BuildMode::Slow ? build_slow(ds, p, &log) : build_fast(ds, p, &log);
    io::write_graph(o.out, g);
    const std::string log_path = o.log.value_or(o.out + ".log.jsonl");
    auto ls = io::open_out(log_path);
    log.write_jsonl(ls);
    io::check_written(ls, log_path);
    std::cout << json{{"graph", o.out},
                      {"log", log_path},
                      {"n", g.size()},
                      {"edges", g.edge_count()},
                      {"max_out_degree", g.max_out_degree()}}
                     .dump()
              << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

struct QueryOpts {
    std::string graph;
    std::string data;
    std::string metric = "l2";
    std::string queries;
    std::optional<std::string> gt;
    std::size_t l = 1;
    std::size_t k = 1;
    std::optional<VertexId> start;
    std::optional<std::string> trace;
};

int cmd_query(const QueryOpts& o) {
    const Dataset ds = load_dataset(o.data, parse_metric(o.metric));
    const ProximityGraph g = io::read_graph(o.graph);
    const auto queries = load_points(o.queries, ds.metric());
    std::optional<std::vector<std::vector<VertexId>>> gt;
    if (o.gt) {
        gt = io::read_ivecs(*o.gt);
        if (gt->size() != queries.size()) throw FormatError("ground truth rows do not match query count");
    }
    const VertexId s = o.start ? *o.start : medoid(ds);
    std::optional<std::ofstream> trace_out;
    if (o.trace) trace_out = io::open_out(*o.trace);

    SearchScratch scratch;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto trace = greedy_search(ds, g, s, queries[qi], {o.l, o.k}, scratch);
        json results = json::array();
        for (const auto& nb : top_k(trace, std::min(o.k, trace.result.size())))
            results.push_back({{"index", nb.index}, {"distance", nb.distance}});
        json rec{{"query", qi}, {"start", s}, {"scanned", trace.steps()}, {"results", results}};
        if (gt) {
            const auto& truth = (*gt)[qi];
            const std::size_t depth = std::min(o.k, truth.size());
            const auto steps = steps_to_first_topk(trace, std::span<const VertexId>(truth.data(), depth));
            rec["steps_to_first_topk"] = steps ? json(*steps) : json("inf");
            std::vector<VertexId> returned;
            for (const auto& r : results) returned.push_back(r["index"].get<VertexId>());
            if (depth > 0) rec["recall_at_k"] = recall_at_k(returned, truth, depth);
            const double true_d = ds.distance_to(truth.front(), queries[qi]);
            if (true_d > 0.0) rec["approx_ratio"] = approx_ratio(trace.result.front().distance, true_d);
        }
        std::cout << rec.dump() << '\n';
        if (trace_out) write_trace_jsonl(*trace_out, trace, qi);
    }
    if (trace_out) io::check_written(*trace_out, *o.trace);
    return kOk;
}

// ---------------------------------------------------------------------------

struct SweepOpts {
    std::optional<std::string> config;
    std::vector<std::string> overrides;  // key=value, applied after the config file
    std::string out = "sweep";
};

int cmd_sweep(const SweepOpts& o) {
    SweepConfig cfg;
    if (o.config) {
        auto is = io::open_in(*o.config);
        cfg = parse_sweep_config(is);
    }
    bool sizes_given = false;
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        apply_sweep_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        sizes_given = sizes_given || kv.substr(0, eq) == "sizes";
    }
    if (o.config) {
        auto is = io::open_in(*o.config);
        for (std::string line; std::getline(is, line);) {
            if (detail::trim(line).rfind("sizes", 0) == 0) sizes_given = true;
        }
    }
    if (!sizes_given) cfg.sizes = default_sizes(cfg.mode);
    if (const char* w = std::getenv("VADS_WORKERS")) {
        try {
            cfg.workers = std::stoull(w);
        } catch (const std::exception&) {
            throw UsageError("VADS_WORKERS must be a non-negative integer");
        }
    }
    const std::size_t largest = *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
    if ((cfg.mode == BuildMode::Slow && largest > 20000) || largest > 200000) {
        std::cerr << "warning: n=" << largest << " exceeds the desk-scale default; expect long runtimes\n";
    }
    const auto res = run_sweep(cfg);
    const auto files = emit_heatmap(res, o.out);
    std::size_t failed = 0;
    for (const auto& row : res.cells)
        for (const auto& c : row) failed += c.error.has_value();
    std::cout << json{{"files", files}, {"seconds", res.seconds}, {"failed_cells", failed}}.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
    std::string graph;
    std::optional<std::string> data;
    std::optional<std::string> instance;
    std::string metric = "l2";
    std::string check = "reachability";
    double alpha = 2.0;
    double tol = 0.0;
};

int cmd_verify(const VerifyOpts& o) {
    const ProximityGraph g = io::read_graph(o.graph);
    std::optional<GeneratedInstance> inst;
    if (o.instance) inst = load_instance(*o.instance);
    auto dataset = [&]() -> Dataset {
        if (inst) return inst->dataset;
        if (o.data) return load_dataset(*o.data, parse_metric(o.metric));
        throw UsageError("verify needs --data or --instance");
    };
    json report;
    bool ok = true;
    if (o.check == "reachability") {
        const auto rep = check_alpha_shortcut_reachable(dataset(), g, o.alpha, o.tol);
        report = rep.to_json();
        ok = rep.ok;
    } else if (o.check == "degree") {
        report = check_degree_bound(dataset(), g, o.alpha).to_json();
    } else if (o.check == "lemma38" || o.check == "lemmaB1") {
        if (!inst) throw UsageError("--check " + o.check + " needs --instance");
        const auto rep = o.check == "lemma38" ? check_funnel_structure(*inst, g) : check_line_structure(*inst, g);
        report = rep.to_json();
        ok = rep.ok;
    } else {
        throw UsageError("unknown check '" + o.check + "'");
    }
    report["alpha"] = o.alpha;
    std::cout << report.dump(2) << '\n';
    return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

struct ExportOpts {
    std::string in;
    std::string out;
    std::string metric = "l2";
    bool downcast_warn = false;
};

int cmd_export(const ExportOpts& o) {
    const auto in_ext = extension(o.in);
    const auto out_ext = extension(o.out);
    if (in_ext == ".vapg") {
        const auto g = io::read_graph(o.in);
        if (out_ext == ".csv") {
            auto os = io::open_out(o.out);
            io::write_adjacency_csv(os, g);
            io::check_written(os, o.out);
        } else if (out_ext == ".vapg") {
            io::write_graph(o.out, g);
        } else {
            throw UsageError("graphs export to .csv or .vapg");
        }
        return kOk;
    }
    if (in_ext == ".ivecs") {
        if (out_ext != ".ivecs") throw UsageError("ivecs files export only to .ivecs");
        io::write_ivecs(o.out, io::read_ivecs(o.in));
        return kOk;
    }
    const Dataset ds = load_dataset(o.in, parse_metric(o.metric));
    if (out_ext == ".vads") {
        io::write_vads(o.out, ds);
        return kOk;
    }
    if (out_ext != ".fvecs" && out_ext != ".bin" && out_ext != ".fbin") {
        throw UsageError("unrecognized output extension '" + out_ext + "'");
    }
    const auto lossy = io::downcast_report(ds);
    if (!lossy.lossless() && !o.downcast_warn) {
        throw UsageError(std::to_string(lossy.lossy_coordinates) +
                         " coordinates are not exactly representable as 32-bit floats; "
                         "pass --downcast-warn to export anyway");
    }
    if (out_ext == ".fvecs") io::write_fvecs(o.out, ds);
    else io::write_bin(o.out, ds);
    if (!lossy.lossless()) {
        std::cerr << "warning: " << lossy.lossy_coordinates << " coordinates lost precision in the 32-bit export\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based nearest neighbor indices and adversarial instances"};
    app.require_subcommand(1);
    int rc = kOk;

    GenOpts gen;
    auto* g = app.add_subcommand("gen", "Generate an instance with queries and ground truth");
    g->add_option("--family", gen.family, "line|funnel|diskann-hard|chain-hard|kdt-hard|uniform")->capture_default_str();
    g->add_option("--n", gen.n, "Target size (line: n = 2k)")->capture_default_str();
    g->add_option("--alpha", gen.alpha)->capture_default_str();
    g->add_option("--eps", gen.eps)->capture_default_str();
    g->add_option("--scale", gen.scale)->capture_default_str();
    g->add_option("--answer-gap", gen.answer_gap, "Distance between answer and query after modification");
    g->add_flag("--ratio", gen.ratio, "Apply the default ratio-experiment modification");
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--dim", gen.dim, "uniform only")->capture_default_str();
    g->add_option("--queries", gen.queries, "uniform only")->capture_default_str();
    g->add_option("--metric", gen.metric, "uniform only: l1|l2")->capture_default_str();
    g->add_option("--depth", gen.depth, "Ground-truth ids per query")->capture_default_str();
    g->add_option("--out", gen.out, "Output prefix")->capture_default_str();
    g->callback([&] { rc = cmd_gen(gen); });

    BuildOpts build;
    auto* b = app.add_subcommand("build", "Build a proximity graph");
    b->add_option("--data", build.data, "Dataset (.vads, .fvecs, .bin)")->required();
    b->add_option("--metric", build.metric, "Metric for .fvecs/.bin input")->capture_default_str();
    b->add_option("--mode", build.mode, "slow|fast")->capture_default_str();
    b->add_option("--alpha", build.alpha)->capture_default_str();
    b->add_option("--R", build.r, "Degree limit (required for fast)");
    b->add_option("--L", build.l, "Queue length for the fast build")->capture_default_str();
    b->add_option("--seed", build.seed)->capture_default_str();
    b->add_option("--workers", build.workers, "Slow-build threads (0 = all cores)")->capture_default_str();
    b->add_flag("--allow-alpha-one", build.allow_alpha_one);
    b->add_option("--out", build.out)->capture_default_str();
    b->add_option("--log", build.log, "Build log path (default <out>.log.jsonl)");
    b->callback([&] { rc = cmd_build(build); });

    QueryOpts query;
    auto* q = app.add_subcommand("query", "Run greedy search for each query");
    q->add_option("--graph", query.graph)->required();
    q->add_option("--data", query.data)->required();
    q->add_option("--metric", query.metric)->capture_default_str();
    q->add_option("--queries", query.queries)->required();
    q->add_option("--gt", query.gt, "Ground truth .ivecs for recall and steps");
    q->add_option("--L", query.l)->capture_default_str();
    q->add_option("--k", query.k)->capture_default_str();
    q->add_option("--start", query.start, "Start vertex (default: medoid)");
    q->add_option("--trace", query.trace, "Write a JSON-lines scan trace");
    q->callback([&] { rc = cmd_query(query); });

    SweepOpts sweep;
    auto* s = app.add_subcommand("sweep", "Run an (n x L) sweep and emit heatmaps");
    s->add_option("--config", sweep.config, "key=value config file");
    s->add_option("--set", sweep.overrides, "key=value override (repeatable)");
    s->add_option("--out", sweep.out, "Output prefix")->capture_default_str();
    for (const char* key : {"family", "sizes", "fractions", "k", "repeats", "mode", "alpha", "R", "L", "seed",
                            "workers", "eps", "instance_alpha"}) {
        s->add_option_function<std::string>(
            std::string("--") + key,
            [&sweep, key](const std::string& v) { sweep.overrides.push_back(std::string(key) + "=" + v); },
            std::string("Same as --set ") + key + "=...");
    }
    s->add_flag_callback("--ratio", [&] { sweep.overrides.push_back("ratio=1"); },
                         "Apply the default ratio-experiment modification");
    s->callback([&] { rc = cmd_sweep(sweep); });

    VerifyOpts verify;
    auto* v = app.add_subcommand("verify", "Check structural properties of a graph");
    v->add_option("--graph", verify.graph)->required();
    v->add_option("--data", verify.data);
    v->add_option("--instance", verify.instance, "Instance prefix (needed for lemma38/lemmaB1)");
    v->add_option("--metric", verify.metric)->capture_default_str();
    v->add_option("--check", verify.check, "reachability|degree|lemma38|lemmaB1")->capture_default_str();
    v->add_option("--alpha", verify.alpha)->capture_default_str();
    v->add_option("--tol", verify.tol)->capture_default_str();
    v->callback([&] { rc = cmd_verify(verify); });

    ExportOpts exp;
    auto* e = app.add_subcommand("export", "Convert between native and external formats");
    e->add_option("--in", exp.in)->required();
    e->add_option("--out", exp.out)->required();
    e->add_option("--metric", exp.metric, "Metric recorded when reading .fvecs/.bin")->capture_default_str();
    e->add_flag("--downcast-warn", exp.downcast_warn, "Allow lossy 64-to-32-bit export with a warning");
    e->callback([&] { rc = cmd_export(exp); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    } catch (const vads::IoError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kIo;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    }
    return rc;
}
