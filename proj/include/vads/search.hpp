#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vads/error.hpp"
#include "vads/graph.hpp"
#include "vads/metric.hpp"

namespace vads {

struct SearchParams {
    std::size_t l = 1;  ///< queue length limit L
    std::size_t k = 1;  ///< answers requested

    void validate() const {
        if (l == 0) throw InvalidArgument("queue length L must be >= 1");
        if (k == 0) throw InvalidArgument("k must be >= 1");
    }
};

/// Record of one greedy search run.
struct SearchTrace {
    std::vector<VertexId> scan_order;      ///< vertices in the order they were scanned
    std::vector<double> scan_distance;     ///< distance to the query, parallel to scan_order
    std::vector<Neighbor> result;          ///< scanned vertices sorted by (distance, index)
    std::size_t distance_evals = 0;

    std::size_t steps() const { return scan_order.size(); }
};

/// Reusable per-thread marks so that repeated searches over the same graph do
/// not reallocate O(n) state. Marks are epoch-stamped.
class SearchScratch {
public:
    void prepare(std::size_t n) {
        if (in_frontier_.size() != n) {
            in_frontier_.assign(n, 0);
            scanned_.assign(n, 0);
            epoch_ = 0;
        }
        if (++epoch_ == 0) {
            std::fill(in_frontier_.begin(), in_frontier_.end(), 0);
            std::fill(scanned_.begin(), scanned_.end(), 0);
            epoch_ = 1;
        }
    }

    bool in_frontier(VertexId v) const { return in_frontier_[v] == epoch_; }
    void set_in_frontier(VertexId v, bool on) { in_frontier_[v] = on ? epoch_ : 0; }
    bool scanned(VertexId v) const { return scanned_[v] == epoch_; }
    void set_scanned(VertexId v) { scanned_[v] = epoch_; }

private:
    std::vector<std::uint32_t> in_frontier_;
    std::vector<std::uint32_t> scanned_;
    std::uint32_t epoch_ = 0;
};

namespace detail {

struct ByDistance {
    bool operator()(const Neighbor& a, const Neighbor& b) const { return closer(a, b); }
};

}  // namespace detail

/// Bounded-queue best-first search.
///
/// The frontier A starts as {s}. Each step scans the unscanned frontier vertex
/// closest to q, merges its out-neighbors into A, and then truncates A to its L
/// closest members (ties by smaller index). Scanned vertices stay in A until
/// truncated and a vertex evicted before being scanned may re-enter later. The
/// run ends when every frontier vertex has been scanned; the full scanned list
/// is returned sorted by distance.
inline SearchTrace greedy_search(const Dataset& ds, const ProximityGraph& g, VertexId s, PointView q,
                                 const SearchParams& params, SearchScratch& scratch) {
    params.validate();
    ds.check_query(q);
    if (g.size() != ds.size()) throw InvalidArgument("graph and dataset sizes differ");
    ds.check_vertex(s);

    scratch.prepare(ds.size());
    SearchTrace trace;
    std::set<Neighbor, detail::ByDistance> frontier;
    std::set<Neighbor, detail::ByDistance> unscanned;

    const Neighbor start{s, ds.distance_to(s, q)};
    ++trace.distance_evals;
    frontier.insert(start);
    unscanned.insert(start);
    scratch.set_in_frontier(s, true);

    auto evict_last = [&] {
        auto last = std::prev(frontier.end());
        if (!scratch.scanned(last->index)) unscanned.erase(*last);
        scratch.set_in_frontier(last->index, false);
        frontier.erase(last);
    };

    while (!unscanned.empty()) {
        const Neighbor v = *unscanned.begin();
        unscanned.erase(unscanned.begin());
        scratch.set_scanned(v.index);
        trace.scan_order.push_back(v.index);
        trace.scan_distance.push_back(v.distance);

        // Truncating after every insertion keeps the same L closest as
        // truncating once per scan, since the order is total.
        for (VertexId w : g.out_neighbors(v.index)) {
            if (scratch.in_frontier(w)) continue;
            const Neighbor cand{w, ds.distance_to(w, q)};
            ++trace.distance_evals;
            if (frontier.size() >= params.l && !closer(cand, *std::prev(frontier.end()))) continue;
            frontier.insert(cand);
            scratch.set_in_frontier(w, true);
            if (!scratch.scanned(w)) unscanned.insert(cand);
            if (frontier.size() > params.l) evict_last();
        }
    }

    trace.result.reserve(trace.scan_order.size());
    for (std::size_t i = 0; i < trace.scan_order.size(); ++i) {
        trace.result.push_back({trace.scan_order[i], trace.scan_distance[i]});
    }
    std::sort(trace.result.begin(), trace.result.end(), closer);
    return trace;
}

inline SearchTrace greedy_search(const Dataset& ds, const ProximityGraph& g, VertexId s, PointView q,
                                 const SearchParams& params) {
    SearchScratch scratch;
    return greedy_search(ds, g, s, q, params, scratch);
}

/// First k entries of the sorted visited list.
inline std::vector<Neighbor> top_k(const SearchTrace& trace, std::size_t k) {
    if (k == 0 || k > trace.result.size()) {
        throw InvalidArgument("top_k: k=" + std::to_string(k) + " but only " +
                              std::to_string(trace.result.size()) + " vertices were scanned");
    }
    return {trace.result.begin(), trace.result.begin() + static_cast<std::ptrdiff_t>(k)};
}

/// 1-based position in the scan order of the first vertex from `true_topk`,
/// or nullopt if none of them was scanned.
inline std::optional<std::size_t> steps_to_first_topk(const SearchTrace& trace,
                                                       std::span<const VertexId> true_topk) {
    for (std::size_t i = 0; i < trace.scan_order.size(); ++i) {
        if (std::find(true_topk.begin(), true_topk.end(), trace.scan_order[i]) != true_topk.end()) {
            return i + 1;
        }
    }
    return std::nullopt;
}

/// JSON-lines trace: one record per scan.
inline void write_trace_jsonl(std::ostream& os, const SearchTrace& trace, std::size_t query_index = 0) {
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < trace.scan_order.size(); ++i) {
        os << "{\"query\":" << query_index << ",\"step\":" << (i + 1) << ",\"vertex\":" << trace.scan_order[i]
           << ",\"distance\":" << trace.scan_distance[i] << "}\n";
    }
    os.precision(old_precision);
}

}  // namespace vads
