#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "vads/error.hpp"
#include "vads/graph.hpp"
#include "vads/metric.hpp"
#include "vads/rng.hpp"
#include "vads/search.hpp"

namespace vads {

struct BuildParams {
    double alpha = 2.0;
    std::optional<std::size_t> r;  ///< degree limit; empty means unlimited
    std::size_t l_build = 125;     ///< queue length for the incremental build
    std::uint64_t seed = 0;
    bool allow_alpha_one = false;  ///< alpha == 1 is accepted only with this set
    std::size_t workers = 0;       ///< slow build fan-out; 0 picks hardware concurrency

    void validate() const {
        if (!(alpha > 1.0) && !(allow_alpha_one && alpha == 1.0)) {
            throw InvalidArgument("alpha must be > 1 (got " + std::to_string(alpha) + ")");
        }
        if (r && *r == 0) throw InvalidArgument("degree limit R must be positive");
        if (l_build == 0) throw InvalidArgument("l_build must be >= 1");
    }
};

struct PassLog {
    std::string phase;
    int pass = 0;
    double seconds = 0.0;
    std::size_t distance_evals = 0;
    std::vector<std::size_t> degree_histogram;
};

struct BuildLog {
    std::vector<PassLog> passes;

    void write_jsonl(std::ostream& os) const {
        for (const auto& p : passes) {
            nlohmann::json j{{"phase", p.phase},
                             {"pass", p.pass},
                             {"seconds", p.seconds},
                             {"distance_evals", p.distance_evals},
                             {"max_degree", p.degree_histogram.empty() ? 0 : p.degree_histogram.size() - 1},
                             {"degree_histogram", p.degree_histogram}};
            os << j.dump() << '\n';
        }
    }
};

namespace detail {

/// Greedy selection over candidates already sorted by (distance to i, index).
/// A candidate w is kept iff every previously kept v satisfies
/// D(v, w) * alpha > D(i, w); selection stops once `limit` are kept.
inline std::vector<VertexId> select_sorted(const Dataset& ds, std::span<const Neighbor> sorted, double alpha,
                                           std::size_t limit, std::size_t& evals) {
    std::vector<VertexId> kept;
    for (const Neighbor& w : sorted) {
        if (kept.size() >= limit) break;
        bool keep = true;
        // Recently kept vertices are farther out and prune far candidates most often.
        for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
            ++evals;
            if (ds.distance(*it, w.index) * alpha <= w.distance) {
                keep = false;
                break;
            }
        }
        if (keep) kept.push_back(w.index);
    }
    return kept;
}

inline std::size_t limit_of(std::optional<std::size_t> r) {
    return r.value_or(std::numeric_limits<std::size_t>::max());
}

}  // namespace detail

/// RobustPruning: merges `candidates` with the current out-list of i, drops i,
/// and greedily keeps the closest survivor while discarding every remaining
/// candidate it alpha-dominates. Replaces N_out(i) with the result.
inline std::vector<VertexId> robust_prune(const Dataset& ds, ProximityGraph& g, VertexId i,
                                          std::span<const VertexId> candidates, double alpha,
                                          std::optional<std::size_t> r, std::size_t* distance_evals = nullptr) {
    ds.check_vertex(i);
    if (g.size() != ds.size()) throw InvalidArgument("graph and dataset sizes differ");
    if (alpha < 1.0) throw InvalidArgument("alpha must be >= 1");
    if (r && *r == 0) throw InvalidArgument("degree limit must be positive");

    std::vector<VertexId> pool(candidates.begin(), candidates.end());
    const auto current = g.out_neighbors(i);
    pool.insert(pool.end(), current.begin(), current.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    std::vector<Neighbor> sorted;
    sorted.reserve(pool.size());
    for (VertexId v : pool) {
        ds.check_vertex(v);
        if (v != i) sorted.push_back({v, ds.distance(i, v)});
    }
    std::sort(sorted.begin(), sorted.end(), closer);

    std::size_t evals = sorted.size();
    auto kept = detail::select_sorted(ds, sorted, alpha, detail::limit_of(r), evals);
    if (distance_evals) *distance_evals += evals;
    g.set_out_neighbors(i, kept);
    return kept;
}

/// Slow preprocessing: every vertex is pruned against the whole vertex set.
/// Vertices are independent, so the work is split across worker threads.
inline ProximityGraph build_slow(const Dataset& ds, const BuildParams& params, BuildLog* log = nullptr) {
    params.validate();
    const std::size_t n = ds.size();
    if (n < 2) throw InvalidArgument("build_slow needs at least two points");
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::vector<VertexId>> lists(n);
    std::size_t workers = params.workers ? params.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    std::vector<std::size_t> evals(workers, 0);

    auto work = [&](std::size_t w) {
        std::vector<Neighbor> sorted(n - 1);
        for (std::size_t i = w; i < n; i += workers) {
            std::size_t k = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) sorted[k++] = {static_cast<VertexId>(j), ds.distance(i, j)};
            }
            evals[w] += n - 1;
            std::sort(sorted.begin(), sorted.end(), closer);
            lists[i] = detail::select_sorted(ds, sorted, params.alpha, detail::limit_of(params.r), evals[w]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    ProximityGraph g(n, params.r);
    for (std::size_t i = 0; i < n; ++i) g.set_out_neighbors(static_cast<VertexId>(i), std::move(lists[i]));

    if (log) {
        PassLog p{"slow", 1, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                  std::accumulate(evals.begin(), evals.end(), std::size_t{0}), g.degree_histogram()};
        log->passes.push_back(std::move(p));
    }
    return g;
}

/// Fast preprocessing: start from a random R-out graph, then make two passes
/// over random permutations. Each vertex is pruned against the visited list of
/// a greedy search for its own point, and back-edges are added (re-pruning any
/// neighbor whose degree overflows R). Strictly sequential.
inline ProximityGraph build_fast(const Dataset& ds, const BuildParams& params, BuildLog* log = nullptr) {
    params.validate();
    if (!params.r) throw InvalidArgument("build_fast requires a degree limit R");
    const std::size_t n = ds.size();
    const std::size_t r = *params.r;
    if (r >= n) {
        throw InvalidArgument("build_fast needs R < n (R=" + std::to_string(r) + ", n=" + std::to_string(n) + ")");
    }

    auto t0 = std::chrono::steady_clock::now();
    ProximityGraph g = new_random_regular(n, r, derive_seed(params.seed, 0));
    const VertexId start = medoid(ds);
    if (log) {
        log->passes.push_back({"init", 0,
                               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), n,
                               g.degree_histogram()});
    }

    SearchScratch scratch;
    const SearchParams sp{params.l_build, 1};
    std::vector<VertexId> perm(n);
    for (int pass = 1; pass <= 2; ++pass) {
        t0 = std::chrono::steady_clock::now();
        std::size_t evals = 0;
        std::iota(perm.begin(), perm.end(), VertexId{0});
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(pass)));
        shuffle(std::span<VertexId>(perm), rng);

        for (VertexId v : perm) {
            const SearchTrace trace = greedy_search(ds, g, start, ds.point(v), sp, scratch);
            evals += trace.distance_evals;
            robust_prune(ds, g, v, trace.scan_order, params.alpha, r, &evals);
            const std::vector<VertexId> nbrs(g.out_neighbors(v).begin(), g.out_neighbors(v).end());
            for (VertexId j : nbrs) {
                g.add_edge(j, v);
                if (g.out_degree(j) > r) {
                    const std::vector<VertexId> own(g.out_neighbors(j).begin(), g.out_neighbors(j).end());
                    robust_prune(ds, g, j, own, params.alpha, r, &evals);
                }
            }
        }
        if (log) {
            log->passes.push_back({"fast", pass,
                                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                                   evals, g.degree_histogram()});
        }
    }
    g.set_degree_limit(r);
    return g;
}

}  // namespace vads
