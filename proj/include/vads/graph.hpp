#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "vads/error.hpp"
#include "vads/io.hpp"
#include "vads/metric.hpp"
#include "vads/rng.hpp"

namespace vads {

/// Directed out-adjacency over vertices [0, n). Out-lists keep insertion order,
/// never contain self-loops or duplicates, and respect the degree limit when one
/// is set.
class ProximityGraph {
public:
    explicit ProximityGraph(std::size_t n, std::optional<std::size_t> degree_limit = std::nullopt)
        : out_(n), degree_limit_(degree_limit) {
        if (degree_limit_ && *degree_limit_ == 0) throw InvalidArgument("degree limit must be positive");
    }

    std::size_t size() const { return out_.size(); }
    std::optional<std::size_t> degree_limit() const { return degree_limit_; }

    std::span<const VertexId> out_neighbors(VertexId v) const {
        check(v);
        return out_[v];
    }

    std::size_t out_degree(VertexId v) const {
        check(v);
        return out_[v].size();
    }

    std::size_t max_out_degree() const {
        std::size_t m = 0;
        for (const auto& l : out_) m = std::max(m, l.size());
        return m;
    }

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& l : out_) e += l.size();
        return e;
    }

    bool has_edge(VertexId u, VertexId v) const {
        check(u);
        check(v);
        return std::find(out_[u].begin(), out_[u].end(), v) != out_[u].end();
    }

    void set_out_neighbors(VertexId v, std::vector<VertexId> nbrs) {
        check(v);
        validate_list(v, nbrs);
        out_[v] = std::move(nbrs);
    }

    /// Appends (u, v); an existing edge is left alone.
    void add_edge(VertexId u, VertexId v) {
        check(u);
        check(v);
        if (u == v) throw InvalidArgument("self-loop " + std::to_string(u));
        auto& l = out_[u];
        if (std::find(l.begin(), l.end(), v) != l.end()) return;
        if (degree_limit_ && l.size() >= *degree_limit_) {
            throw InvalidArgument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") would exceed degree limit");
        }
        l.push_back(v);
    }

    /// Sets or clears the degree limit; every current out-list must already comply.
    void set_degree_limit(std::optional<std::size_t> r) {
        if (r) {
            if (*r == 0) throw InvalidArgument("degree limit must be positive");
            if (max_out_degree() > *r) throw InvalidArgument("existing out-degree exceeds new limit");
        }
        degree_limit_ = r;
    }

    std::vector<std::size_t> degree_histogram() const {
        std::vector<std::size_t> h(max_out_degree() + 1, 0);
        for (const auto& l : out_) ++h[l.size()];
        return h;
    }

    friend bool operator==(const ProximityGraph&, const ProximityGraph&) = default;

private:
    void check(VertexId v) const {
        if (v >= out_.size()) {
            throw InvalidArgument("vertex " + std::to_string(v) + " out of range (n=" +
                                  std::to_string(out_.size()) + ")");
        }
    }

    void validate_list(VertexId v, const std::vector<VertexId>& nbrs) const {
        if (degree_limit_ && nbrs.size() > *degree_limit_) {
            throw InvalidArgument("out-list of " + std::to_string(v) + " exceeds degree limit");
        }
        std::unordered_set<VertexId> seen;
        for (VertexId w : nbrs) {
            check(w);
            if (w == v) throw InvalidArgument("self-loop " + std::to_string(v));
            if (!seen.insert(w).second) {
                throw InvalidArgument("duplicate neighbor " + std::to_string(w) + " in out-list of " +
                                      std::to_string(v));
            }
        }
    }

    std::vector<std::vector<VertexId>> out_;
    std::optional<std::size_t> degree_limit_;
};

/// Directed r-out graph: each vertex draws r distinct out-neighbors uniformly
/// from the other n-1 vertices (Floyd's sampling), independently per vertex.
inline ProximityGraph new_random_regular(std::size_t n, std::size_t r, std::uint64_t seed) {
    if (r == 0 || r >= n) {
        throw InvalidArgument("random regular graph needs 0 < r < n (r=" + std::to_string(r) +
                              ", n=" + std::to_string(n) + ")");
    }
    ProximityGraph g(n);
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    const std::uint64_t others = n - 1;
    for (std::size_t v = 0; v < n; ++v) {
        chosen.clear();
        std::vector<VertexId> list;
        list.reserve(r);
        for (std::uint64_t j = others - r; j < others; ++j) {
            std::uint64_t t = uniform_index(rng, j + 1);
            if (!chosen.insert(t).second) {
                t = j;
                chosen.insert(t);
            }
            // Skip over v itself so the draw ranges over the other n-1 vertices.
            list.push_back(static_cast<VertexId>(t >= v ? t + 1 : t));
        }
        g.set_out_neighbors(static_cast<VertexId>(v), std::move(list));
    }
    return g;
}

/// True iff the subgraph induced by `subset` is strongly connected.
inline bool is_strongly_connected_subset(const ProximityGraph& g, std::span<const VertexId> subset) {
    if (subset.empty()) throw InvalidArgument("subset must be nonempty");
    std::vector<std::int32_t> local(g.size(), -1);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] >= g.size()) throw InvalidArgument("subset vertex out of range");
        local[subset[i]] = static_cast<std::int32_t>(i);
    }
    const std::size_t m = subset.size();
    std::vector<std::vector<std::uint32_t>> fwd(m), rev(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (VertexId w : g.out_neighbors(subset[i])) {
            if (local[w] >= 0) {
                fwd[i].push_back(static_cast<std::uint32_t>(local[w]));
                rev[static_cast<std::size_t>(local[w])].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
    auto reaches_all = [m](const std::vector<std::vector<std::uint32_t>>& adj) {
        std::vector<char> seen(m, 0);
        std::vector<std::uint32_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == m;
    };
    return reaches_all(fwd) && reaches_all(rev);
}

// ---------------------------------------------------------------------------
// Native graph format:
//   "VAPG" | u32 version | u32 n | u32 R (0 = none) | per vertex: u32 deg, deg*u32

namespace io {

inline constexpr std::uint32_t kGraphVersion = 1;
inline constexpr char kGraphMagic[4] = {'V', 'A', 'P', 'G'};

inline void write_graph(std::ostream& os, const ProximityGraph& g) {
    os.write(kGraphMagic, 4);
    le::put_u32(os, kGraphVersion);
    le::put_u32(os, static_cast<std::uint32_t>(g.size()));
    le::put_u32(os, static_cast<std::uint32_t>(g.degree_limit().value_or(0)));
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto nbrs = g.out_neighbors(static_cast<VertexId>(v));
        le::put_u32(os, static_cast<std::uint32_t>(nbrs.size()));
        for (VertexId w : nbrs) le::put_u32(os, w);
    }
}

inline ProximityGraph read_graph(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kGraphMagic, 4) != 0) {
        throw FormatError("not a VAPG graph (bad magic)");
    }
    const auto version = le::get_u32(is, "version");
    if (version != kGraphVersion) throw FormatError("unsupported VAPG version " + std::to_string(version));
    const auto n = le::get_u32(is, "n");
    const auto r = le::get_u32(is, "degree limit");
    ProximityGraph g(n, r == 0 ? std::nullopt : std::optional<std::size_t>(r));
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto deg = le::get_u32(is, "out-degree");
        if (deg >= n && n > 0) throw FormatError("out-degree larger than vertex count");
        std::vector<VertexId> nbrs(deg);
        for (auto& w : nbrs) w = le::get_u32(is, "neighbor id");
        try {
            g.set_out_neighbors(v, std::move(nbrs));
        } catch (const InvalidArgument& e) {
            throw FormatError(std::string("invalid adjacency in VAPG file: ") + e.what());
        }
    }
    if (!le::at_eof(is)) throw FormatError("trailing bytes after VAPG payload");
    return g;
}

inline void write_graph(const std::string& path, const ProximityGraph& g) {
    auto os = open_out(path);
    write_graph(os, g);
    check_written(os, path);
}

inline ProximityGraph read_graph(const std::string& path) {
    auto is = open_in(path);
    return read_graph(is);
}

/// One line per edge: "source,target". For debugging and plotting.
inline void write_adjacency_csv(std::ostream& os, const ProximityGraph& g) {
    os << "source,target\n";
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (VertexId w : g.out_neighbors(static_cast<VertexId>(v))) os << v << ',' << w << '\n';
    }
}

}  // namespace io
}  // namespace vads
