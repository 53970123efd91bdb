#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "vads/construction.hpp"
#include "vads/error.hpp"
#include "vads/instances.hpp"
#include "vads/metric.hpp"
#include "vads/search.hpp"

namespace vads {

/// |top-k(returned) ∩ top-k(truth)| / k
inline double recall_at_k(std::span<const VertexId> returned, std::span<const VertexId> truth, std::size_t k) {
    if (k == 0) throw InvalidArgument("recall depth k must be >= 1");
    if (truth.size() < k) throw InvalidArgument("ground truth shorter than k");
    const auto r_end = returned.begin() + static_cast<std::ptrdiff_t>(std::min(k, returned.size()));
    const auto t_end = truth.begin() + static_cast<std::ptrdiff_t>(k);
    std::size_t hits = 0;
    for (auto it = returned.begin(); it != r_end; ++it) {
        if (std::find(truth.begin(), t_end, *it) != t_end) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// returned / true, clamped below at 1.
inline double approx_ratio(double returned_top1_dist, double true_nn_dist) {
    if (!(true_nn_dist > 0.0)) throw DegenerateDataset("query coincides with a data point; ratio undefined");
    return std::max(1.0, returned_top1_dist / true_nn_dist);
}

enum class BuildMode { Slow, Fast };

inline BuildMode parse_build_mode(std::string_view s) {
    if (s == "slow") return BuildMode::Slow;
    if (s == "fast") return BuildMode::Fast;
    throw InvalidArgument("unknown build mode '" + std::string(s) + "' (expected slow or fast)");
}

inline std::string_view to_string(BuildMode m) { return m == BuildMode::Slow ? "slow" : "fast"; }

inline std::vector<double> default_l_fractions() {
    return {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10,
            0.11, 0.12, 0.15, 0.18, 0.20, 0.30, 0.40, 0.50};
}

inline std::vector<std::size_t> default_sizes(BuildMode mode) {
    std::vector<std::size_t> out;
    const std::size_t step = mode == BuildMode::Fast ? 10000 : 1000;
    for (std::size_t i = 1; i <= 20; ++i) out.push_back(i * step);
    return out;
}

struct SweepConfig {
    std::vector<std::size_t> sizes = default_sizes(BuildMode::Fast);
    std::vector<double> l_fractions = default_l_fractions();
    std::size_t k = 5;
    std::size_t repeats = 1;
    BuildMode mode = BuildMode::Fast;
    BuildParams build{2.0, 70, 125, 0};
    InstanceSpec instance;  ///< family and family parameters; n is taken from `sizes`
    bool ratio_modifier = false;  ///< apply the default scale/answer-gap modification
    std::uint64_t seed = 0;
    std::size_t workers = 1;

    void validate() const {
        if (sizes.empty()) throw InvalidArgument("sweep needs at least one size");
        if (l_fractions.empty()) throw InvalidArgument("sweep needs at least one L fraction");
        for (double p : l_fractions)
            if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("L fractions must lie in (0, 1]");
        if (repeats == 0) throw InvalidArgument("repeats must be >= 1");
        if (k == 0) throw InvalidArgument("k must be >= 1");
        build.validate();
    }
};

struct CellResult {
    std::size_t n = 0;  ///< actual dataset size
    double l_fraction = 0.0;
    std::size_t l = 0;
    double recall_at_k = 0.0;
    double avg_approx_ratio = 1.0;
    double mean_steps_to_first_topk = std::numeric_limits<double>::infinity();
    double mean_scanned = 0.0;
    std::size_t repeats = 0;
    std::optional<std::string> error;

    friend bool operator==(const CellResult&, const CellResult&) = default;
};

/// cells[f][s]: fraction index f (as configured), size index s.
struct SweepResult {
    std::vector<std::size_t> sizes;
    std::vector<double> l_fractions;
    std::vector<std::vector<CellResult>> cells;
    double seconds = 0.0;
    nlohmann::json config;
};

inline std::size_t queue_length_for(double fraction, std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
}

namespace detail {

struct CellSums {
    double recall = 0.0;
    double ratio = 0.0;
    double steps = 0.0;
    double scanned = 0.0;
    std::size_t samples = 0;
    std::optional<std::string> error;
};

inline ProximityGraph build_with(BuildMode mode, const Dataset& ds, const BuildParams& p) {
    return mode == BuildMode::Slow ? build_slow(ds, p) : build_fast(ds, p);
}

/// One (instance, graph) evaluated at every L fraction.
inline std::vector<CellSums> evaluate_graph(const GeneratedInstance& inst, const ProximityGraph& g,
                                            const std::vector<double>& fractions, std::size_t k) {
    const VertexId start = medoid(inst.dataset);
    SearchScratch scratch;
    std::vector<CellSums> out(fractions.size());
    for (std::size_t f = 0; f < fractions.size(); ++f) {
        const std::size_t l = queue_length_for(fractions[f], inst.dataset.size());
        for (std::size_t qi = 0; qi < inst.queries.size(); ++qi) {
            const auto& q = inst.queries[qi];
            const auto& truth = inst.ground_truth[qi];
            const std::size_t depth = std::min(k, truth.size());
            const auto trace = greedy_search(inst.dataset, g, start, q, {l, depth}, scratch);
            std::vector<VertexId> returned;
            for (std::size_t i = 0; i < std::min(depth, trace.result.size()); ++i)
                returned.push_back(trace.result[i].index);
            out[f].recall += recall_at_k(returned, truth, depth);
            const double true_d = inst.dataset.distance_to(truth.front(), q);
            out[f].ratio += approx_ratio(trace.result.front().distance, true_d);
            const auto steps = steps_to_first_topk(
                trace, std::span<const VertexId>(truth.data(), depth));
            out[f].steps += steps ? static_cast<double>(*steps) : std::numeric_limits<double>::infinity();
            out[f].scanned += static_cast<double>(trace.steps());
            ++out[f].samples;
        }
    }
    return out;
}

}  // namespace detail

/// Runs every (size, repeat) job, evaluates every L fraction against the same
/// graph, and averages over repeats and queries. Results do not depend on the
/// worker count.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::optional<GeneratedInstance>> instances(cfg.sizes.size());
    std::vector<std::string> gen_errors(cfg.sizes.size());
    for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
        try {
            InstanceSpec spec = cfg.instance;
            spec.n = cfg.sizes[s];
            if (spec.family == Family::KdtHard || spec.family == Family::Uniform) {
                spec.seed = derive_seed(cfg.seed, 1000 + s);
            }
            auto inst = generate(spec);
            if (cfg.ratio_modifier) inst = with_default_ratio_modifier(inst);
            instances[s] = std::move(inst);
        } catch (const std::exception& e) {
            gen_errors[s] = e.what();
        }
    }

    const std::size_t repeats = cfg.mode == BuildMode::Slow ? 1 : cfg.repeats;
    struct Job {
        std::size_t size_index;
        std::size_t repeat;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.sizes.size(); ++s)
        for (std::size_t r = 0; r < repeats; ++r) jobs.push_back({s, r});
    std::vector<std::vector<detail::CellSums>> job_results(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto [s, r] = jobs[j];
            if (!instances[s]) {
                job_results[j].assign(cfg.l_fractions.size(), {});
                for (auto& c : job_results[j]) c.error = gen_errors[s];
                continue;
            }
            try {
                BuildParams bp = cfg.build;
                bp.seed = derive_seed(cfg.seed, (s << 20) + r);
                bp.workers = 1;
                const auto g = detail::build_with(cfg.mode, instances[s]->dataset, bp);
                job_results[j] = detail::evaluate_graph(*instances[s], g, cfg.l_fractions, cfg.k);
            } catch (const std::exception& e) {
                job_results[j].assign(cfg.l_fractions.size(), {});
                for (auto& c : job_results[j]) c.error = e.what();
            }
        }
    };
    const std::size_t nworkers = std::max<std::size_t>(1, std::min(cfg.workers, jobs.size()));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    }

    SweepResult res;
    res.sizes = cfg.sizes;
    res.l_fractions = cfg.l_fractions;
    res.cells.assign(cfg.l_fractions.size(), std::vector<CellResult>(cfg.sizes.size()));
    for (std::size_t f = 0; f < cfg.l_fractions.size(); ++f) {
        for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
            CellResult& cell = res.cells[f][s];
            cell.l_fraction = cfg.l_fractions[f];
            cell.n = instances[s] ? instances[s]->dataset.size() : cfg.sizes[s];
            cell.l = queue_length_for(cell.l_fraction, cell.n);
            detail::CellSums total;
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (jobs[j].size_index != s) continue;
                const auto& part = job_results[j][f];
                if (part.error && !total.error) total.error = part.error;
                total.recall += part.recall;
                total.ratio += part.ratio;
                total.steps += part.steps;
                total.scanned += part.scanned;
                total.samples += part.samples;
            }
            cell.repeats = repeats;
            cell.error = total.error;
            if (total.samples > 0) {
                const double m = static_cast<double>(total.samples);
                cell.recall_at_k = total.recall / m;
                cell.avg_approx_ratio = total.ratio / m;
                cell.mean_steps_to_first_topk = total.steps / m;
                cell.mean_scanned = total.scanned / m;
            }
        }
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.config = {{"family", std::string(to_string(cfg.instance.family))},
                  {"sizes", cfg.sizes},
                  {"l_fractions", cfg.l_fractions},
                  {"k", cfg.k},
                  {"repeats", cfg.repeats},
                  {"mode", std::string(to_string(cfg.mode))},
                  {"alpha", cfg.build.alpha},
                  {"R", cfg.build.r ? nlohmann::json(*cfg.build.r) : nlohmann::json(nullptr)},
                  {"L_build", cfg.build.l_build},
                  {"ratio_modifier", cfg.ratio_modifier},
                  {"seed", cfg.seed},
                  {"workers", cfg.workers}};
    return res;
}

/// (fraction, n) pairs where recall drops as L grows for a fixed n.
inline std::vector<std::pair<double, std::size_t>> recall_monotonicity_violations(const SweepResult& res) {
    std::vector<std::size_t> order(res.l_fractions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return res.l_fractions[a] < res.l_fractions[b]; });
    std::vector<std::pair<double, std::size_t>> out;
    for (std::size_t s = 0; s < res.sizes.size(); ++s) {
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (res.cells[order[i]][s].recall_at_k < res.cells[order[i - 1]][s].recall_at_k) {
                out.emplace_back(res.l_fractions[order[i]], res.cells[order[i]][s].n);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output: long-format CSV, metric grid CSV, 8-bit PGM heatmap, summary JSON.

inline constexpr const char* kSweepCsvHeader =
    "n,l_fraction,L,recall_at_k,avg_approx_ratio,mean_steps_to_first_topk,mean_scanned,repeats";

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Row order of every heatmap output: fractions descending, sizes ascending.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> display_order(const SweepResult& res) {
    std::vector<std::size_t> rows(res.l_fractions.size()), cols(res.sizes.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    std::stable_sort(rows.begin(), rows.end(),
                     [&](auto a, auto b) { return res.l_fractions[a] > res.l_fractions[b]; });
    std::stable_sort(cols.begin(), cols.end(), [&](auto a, auto b) { return res.sizes[a] < res.sizes[b]; });
    return {rows, cols};
}

inline double metric_value(const CellResult& c, const std::string& metric) {
    if (metric == "recall") return c.recall_at_k;
    if (metric == "ratio") return c.avg_approx_ratio;
    throw InvalidArgument("unknown heatmap metric '" + metric + "' (expected recall or ratio)");
}

inline std::uint8_t pixel_value(double v, const std::string& metric, double max_ratio) {
    double x = 0.0;
    if (metric == "recall") {
        x = v;
    } else if (max_ratio > 1.0) {
        x = std::log(std::max(v, 1.0)) / std::log(max_ratio);
    }
    x = std::clamp(x, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * x));
}

}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    os << kSweepCsvHeader << '\n';
    const auto [rows, cols] = detail::display_order(res);
    for (auto f : rows) {
        for (auto s : cols) {
            const auto& c = res.cells[f][s];
            os << c.n << ',' << detail::fmt_double(c.l_fraction) << ',' << c.l << ','
               << detail::fmt_double(c.recall_at_k) << ',' << detail::fmt_double(c.avg_approx_ratio) << ','
               << detail::fmt_double(c.mean_steps_to_first_topk) << ',' << detail::fmt_double(c.mean_scanned) << ','
               << c.repeats << '\n';
        }
    }
}

inline std::vector<CellResult> read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kSweepCsvHeader) throw FormatError("unexpected sweep CSV header");
    std::vector<CellResult> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
        if (f.size() != 8) throw FormatError("sweep CSV row needs 8 fields: " + line);
        try {
            CellResult c;
            c.n = std::stoull(f[0]);
            c.l_fraction = std::strtod(f[1].c_str(), nullptr);
            c.l = std::stoull(f[2]);
            c.recall_at_k = std::strtod(f[3].c_str(), nullptr);
            c.avg_approx_ratio = std::strtod(f[4].c_str(), nullptr);
            c.mean_steps_to_first_topk = std::strtod(f[5].c_str(), nullptr);
            c.mean_scanned = std::strtod(f[6].c_str(), nullptr);
            c.repeats = std::stoull(f[7]);
            out.push_back(c);
        } catch (const std::logic_error&) {
            throw FormatError("malformed sweep CSV row: " + line);
        }
    }
    return out;
}

/// Metric grid: first column the L fraction, one column per n.
inline void write_grid_csv(std::ostream& os, const SweepResult& res, const std::string& metric) {
    const auto [rows, cols] = detail::display_order(res);
    os << "l_fraction";
    for (auto s : cols) os << ',' << res.sizes[s];
    os << '\n';
    for (auto f : rows) {
        os << detail::fmt_double(res.l_fractions[f]);
        for (auto s : cols) os << ',' << detail::fmt_double(detail::metric_value(res.cells[f][s], metric));
        os << '\n';
    }
}

/// Binary 8-bit PGM. Recall maps linearly to [0, 255]; ratios map by
/// log(ratio) / log(max ratio in the sweep).
inline void write_pgm(std::ostream& os, const SweepResult& res, const std::string& metric) {
    if (res.cells.empty() || res.cells.front().empty()) throw InvalidArgument("empty sweep matrix");
    const auto [rows, cols] = detail::display_order(res);
    double max_ratio = 1.0;
    for (const auto& row : res.cells)
        for (const auto& c : row) max_ratio = std::max(max_ratio, c.avg_approx_ratio);
    os << "P5 " << cols.size() << ' ' << rows.size() << " 255\n";
    for (auto f : rows) {
        for (auto s : cols) {
            os.put(static_cast<char>(detail::pixel_value(detail::metric_value(res.cells[f][s], metric), metric,
                                                         max_ratio)));
        }
    }
}

inline nlohmann::json sweep_summary(const SweepResult& res) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& row : res.cells) {
        for (const auto& c : row) {
            if (c.error) cells.push_back({{"n", c.n}, {"l_fraction", c.l_fraction}, {"error", *c.error}});
        }
    }
    nlohmann::json mono = nlohmann::json::array();
    for (const auto& [p, n] : recall_monotonicity_violations(res)) mono.push_back({{"l_fraction", p}, {"n", n}});
    return {{"config", res.config},
            {"wall_seconds", res.seconds},
            {"failed_cells", cells},
            {"recall_monotonicity_violations", mono}};
}

/// Writes <prefix>.csv, <prefix>_<metric>_grid.csv, <prefix>_<metric>.pgm for
/// recall and ratio, and <prefix>.json. Returns the paths written.
inline std::vector<std::string> emit_heatmap(const SweepResult& res, const std::string& prefix) {
    if (res.cells.empty() || res.cells.front().empty()) throw InvalidArgument("empty sweep matrix");
    std::vector<std::string> written;
    auto open = [&](const std::string& path) {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path + "' for writing");
        written.push_back(path);
        return os;
    };
    {
        auto os = open(prefix + ".csv");
        write_sweep_csv(os, res);
        io::check_written(os, prefix + ".csv");
    }
    for (const std::string metric : {"recall", "ratio"}) {
        const std::string grid = prefix + "_" + metric + "_grid.csv";
        auto gs = open(grid);
        write_grid_csv(gs, res, metric);
        io::check_written(gs, grid);
        const std::string pgm = prefix + "_" + metric + ".pgm";
        auto ps = open(pgm);
        write_pgm(ps, res, metric);
        io::check_written(ps, pgm);
    }
    {
        auto os = open(prefix + ".json");
        os << sweep_summary(res).dump(2) << '\n';
        io::check_written(os, prefix + ".json");
    }
    return written;
}

// ---------------------------------------------------------------------------
// key=value sweep configuration. Keys mirror the CLI flags.

namespace detail {

template <typename T>
std::vector<T> parse_list(const std::string& v) {
    std::vector<T> out;
    std::stringstream ss(v);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (tok.empty()) continue;
        if constexpr (std::is_floating_point_v<T>) {
            out.push_back(std::stod(tok));
        } else {
            out.push_back(static_cast<T>(std::stod(tok)));
        }
    }
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void apply_sweep_option(SweepConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "family") cfg.instance.family = parse_family(value);
        else if (key == "sizes") cfg.sizes = detail::parse_list<std::size_t>(value);
        else if (key == "fractions" || key == "l_fractions") cfg.l_fractions = detail::parse_list<double>(value);
        else if (key == "k") cfg.k = std::stoull(value);
        else if (key == "repeats") cfg.repeats = std::stoull(value);
        else if (key == "mode") cfg.mode = parse_build_mode(value);
        else if (key == "alpha") cfg.build.alpha = std::stod(value);
        else if (key == "R") cfg.build.r = value == "none" ? std::nullopt : std::optional<std::size_t>(std::stoull(value));
        else if (key == "L") cfg.build.l_build = std::stoull(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "workers") cfg.workers = std::stoull(value);
        else if (key == "ratio") cfg.ratio_modifier = value == "1" || value == "true" || value == "yes";
        else if (key == "eps") cfg.instance.epsilon = std::stod(value);
        else if (key == "instance_alpha") cfg.instance.alpha = std::stod(value);
        else throw InvalidArgument("unknown sweep config key '" + key + "'");
    } catch (const std::logic_error&) {
        throw InvalidArgument("bad value '" + value + "' for sweep config key '" + key + "'");
    }
}

inline SweepConfig parse_sweep_config(std::istream& is, SweepConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(lineno) + " is not key=value");
        }
        apply_sweep_option(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace vads
