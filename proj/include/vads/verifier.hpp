#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "vads/error.hpp"
#include "vads/graph.hpp"
#include "vads/instances.hpp"
#include "vads/metric.hpp"

namespace vads {

struct ReachabilityReport {
    bool ok = true;
    std::size_t violations = 0;
    std::vector<std::pair<VertexId, VertexId>> witnesses;  ///< first violating (p, q) pairs

    nlohmann::json to_json() const {
        nlohmann::json w = nlohmann::json::array();
        for (const auto& [p, q] : witnesses) w.push_back({p, q});
        return {{"check", "reachability"}, {"ok", ok}, {"violations", violations}, {"witnesses", w}};
    }
};

/// Exhaustive alpha-shortcut reachability: for every ordered pair p != q,
/// either (p, q) is an edge or some out-neighbor p' of p has
/// D(p', q) * alpha <= D(p, q) + tol. O(n^2 * max degree).
inline ReachabilityReport check_alpha_shortcut_reachable(const Dataset& ds, const ProximityGraph& g, double alpha,
                                                         double tol = 0.0, std::size_t max_witnesses = 100) {
    if (alpha < 1.0) throw InvalidArgument("alpha must be >= 1");
    if (g.size() != ds.size()) throw InvalidArgument("graph and dataset sizes differ");
    const std::size_t n = ds.size();
    ReachabilityReport rep;
    std::vector<char> is_nbr(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        const auto nbrs = g.out_neighbors(static_cast<VertexId>(p));
        for (VertexId w : nbrs) is_nbr[w] = 1;
        for (std::size_t q = 0; q < n; ++q) {
            if (q == p || is_nbr[q]) continue;
            const double dpq = ds.distance(p, q);
            bool covered = false;
            for (VertexId w : nbrs) {
                if (ds.distance(w, q) * alpha <= dpq + tol) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                ++rep.violations;
                if (rep.witnesses.size() < max_witnesses) {
                    rep.witnesses.emplace_back(static_cast<VertexId>(p), static_cast<VertexId>(q));
                }
            }
        }
        for (VertexId w : nbrs) is_nbr[w] = 0;
    }
    rep.ok = rep.violations == 0;
    return rep;
}

struct DegreeReport {
    std::size_t max_degree = 0;
    double mean_degree = 0.0;
    double aspect_ratio = 1.0;
    double log_delta = 0.0;  ///< log2 of the aspect ratio
    double ratio = 0.0;      ///< max_degree / log_delta (0 when log_delta is 0)

    nlohmann::json to_json() const {
        return {{"check", "degree"},       {"ok", true},          {"max_degree", max_degree},
                {"mean_degree", mean_degree}, {"aspect_ratio", aspect_ratio}, {"log2_delta", log_delta},
                {"ratio", ratio}};
    }
};

/// Degree statistics for trend inspection. There is no pass/fail threshold.
inline DegreeReport check_degree_bound(const Dataset& ds, const ProximityGraph& g, double alpha) {
    if (alpha < 1.0) throw InvalidArgument("alpha must be >= 1");
    DegreeReport rep;
    rep.max_degree = g.max_out_degree();
    rep.mean_degree = static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
    if (ds.size() >= 2) {
        const auto st = compute_stats(ds);
        rep.aspect_ratio = st.aspect_ratio;
        rep.log_delta = std::log2(st.aspect_ratio);
        rep.ratio = rep.log_delta > 0.0 ? static_cast<double>(rep.max_degree) / rep.log_delta : 0.0;
    }
    return rep;
}

/// Named boolean properties with free-form detail.
struct PropertyReport {
    std::string check;
    bool ok = true;
    std::vector<std::pair<std::string, bool>> properties;
    nlohmann::json details = nlohmann::json::object();

    void record(std::string name, bool holds) {
        ok = ok && holds;
        properties.emplace_back(std::move(name), holds);
    }

    bool holds(const std::string& name) const {
        for (const auto& [k, v] : properties)
            if (k == name) return v;
        throw InvalidArgument("no property named " + name);
    }

    nlohmann::json to_json() const {
        nlohmann::json props = nlohmann::json::object();
        for (const auto& [k, v] : properties) props[k] = v;
        return {{"check", check}, {"ok", ok}, {"properties", props}, {"details", details}};
    }
};

/// Structure of the slow-built graph on the funnel instance:
///   (1) every p in P links to p' and not to a,
///   (2) the subgraph induced by P is strongly connected,
///   (3) the medoid lies in P.
inline PropertyReport check_funnel_structure(const GeneratedInstance& inst, const ProximityGraph& g) {
    if (inst.spec.family != Family::FunnelAlpha) throw InvalidArgument("lemma38 check needs a funnel instance");
    if (g.size() != inst.dataset.size()) throw InvalidArgument("graph and dataset sizes differ");
    const IndexRange grid = inst.region("P");
    const VertexId relay = inst.region("p_prime").begin;
    const VertexId answer = inst.region("a").begin;

    PropertyReport rep;
    rep.check = "lemma38";
    std::size_t missing_relay = 0, direct_answer = 0;
    nlohmann::json bad = nlohmann::json::array();
    for (VertexId p = grid.begin; p < grid.end; ++p) {
        const bool has_relay = g.has_edge(p, relay);
        const bool has_answer = g.has_edge(p, answer);
        missing_relay += !has_relay;
        direct_answer += has_answer;
        if ((!has_relay || has_answer) && bad.size() < 20) bad.push_back(p);
    }
    rep.record("relay_edges_and_no_answer_edges", missing_relay == 0 && direct_answer == 0);
    rep.details["grid_vertices_missing_relay_edge"] = missing_relay;
    rep.details["grid_vertices_with_answer_edge"] = direct_answer;
    rep.details["offending_vertices"] = bad;

    const auto ids = grid.ids();
    rep.record("grid_strongly_connected", is_strongly_connected_subset(g, ids));

    const VertexId s = medoid(inst.dataset);
    rep.record("medoid_in_grid", grid.contains(s));
    rep.details["medoid"] = s;
    return rep;
}

/// Structure of the slow-built graph on the geometric line instance (1-based
/// positions i in [1, 2k], vertex id i-1):
///   (1) every i > k links to k and to no j < k,
///   (2) for j < i <= k, (i, j) is an edge iff j = i - 1,
/// plus the mirror images of both for the right half.
inline PropertyReport check_line_structure(const GeneratedInstance& inst, const ProximityGraph& g) {
    if (inst.spec.family != Family::LineDelta) throw InvalidArgument("lemmaB1 check needs a line instance");
    if (g.size() != inst.dataset.size()) throw InvalidArgument("graph and dataset sizes differ");
    const std::size_t n = g.size();
    const std::size_t k = n / 2;
    auto edge = [&](std::size_t i, std::size_t j) {  // 1-based
        return g.has_edge(static_cast<VertexId>(i - 1), static_cast<VertexId>(j - 1));
    };

    PropertyReport rep;
    rep.check = "lemmaB1";
    nlohmann::json failures = nlohmann::json::array();
    auto note = [&](const char* what, std::size_t i, std::size_t j) {
        if (failures.size() < 20) failures.push_back({{"property", what}, {"i", i}, {"j", j}});
    };

    bool p1 = true, p2 = true, m1 = true, m2 = true;
    for (std::size_t i = k + 1; i <= n; ++i) {
        if (!edge(i, k)) { p1 = false; note("1", i, k); }
        for (std::size_t j = 1; j < k; ++j)
            if (edge(i, j)) { p1 = false; note("1", i, j); }
    }
    for (std::size_t i = 1; i <= k; ++i) {
        for (std::size_t j = 1; j < i; ++j)
            if (edge(i, j) != (j == i - 1)) { p2 = false; note("2", i, j); }
    }
    // Mirror: position i maps to n + 1 - i.
    for (std::size_t i = 1; i <= k; ++i) {
        if (!edge(i, k + 1)) { m1 = false; note("1-mirror", i, k + 1); }
        for (std::size_t j = k + 2; j <= n; ++j)
            if (edge(i, j)) { m1 = false; note("1-mirror", i, j); }
    }
    for (std::size_t i = k + 1; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j)
            if (edge(i, j) != (j == i + 1)) { m2 = false; note("2-mirror", i, j); }
    }
    rep.record("right_half_links_only_k", p1);
    rep.record("left_half_only_previous", p2);
    rep.record("left_half_links_only_k_plus_1", m1);
    rep.record("right_half_only_next", m2);
    rep.details["k"] = k;
    rep.details["failures"] = failures;
    return rep;
}

}  // namespace vads
