#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vads/error.hpp"

namespace vads {

using VertexId = std::uint32_t;
using Point = std::vector<double>;
using PointView = std::span<const double>;

enum class Metric : std::uint8_t { L1 = 0, L2 = 1 };

inline std::string_view to_string(Metric m) {
    return m == Metric::L1 ? "l1" : "l2";
}

inline Metric parse_metric(std::string_view s) {
    if (s == "l1" || s == "L1") return Metric::L1;
    if (s == "l2" || s == "L2") return Metric::L2;
    throw InvalidArgument("unknown metric '" + std::string(s) + "' (expected l1 or l2)");
}

namespace detail {

inline double distance_unchecked(PointView a, PointView b, Metric m) {
    double acc = 0.0;
    if (m == Metric::L1) {
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace detail

inline double distance(PointView a, PointView b, Metric m) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    return detail::distance_unchecked(a, b, m);
}

/// A dataset index paired with its distance to some reference point.
struct Neighbor {
    VertexId index = 0;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Strict weak order by distance, then by index.
inline bool closer(const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
}

/// Immutable point set under a fixed metric. Points are stored row-major;
/// the 0-based row number is the vertex id used by every graph over it.
class Dataset {
public:
    Dataset(std::size_t dim, Metric metric, std::vector<double> coords)
        : dim_(dim), metric_(metric), coords_(std::move(coords)) {
        if (dim_ == 0) throw InvalidArgument("dataset dimension must be >= 1");
        if (coords_.empty() || coords_.size() % dim_ != 0) {
            throw InvalidArgument("dataset needs at least one point and n*dim coordinates");
        }
        if (coords_.size() / dim_ > std::numeric_limits<VertexId>::max()) {
            throw InvalidArgument("dataset too large for 32-bit vertex ids");
        }
        for (double c : coords_) {
            if (!std::isfinite(c)) throw InvalidArgument("dataset coordinates must be finite");
        }
    }

    static Dataset from_points(const std::vector<Point>& points, Metric metric) {
        if (points.empty()) throw InvalidArgument("dataset needs at least one point");
        const std::size_t dim = points.front().size();
        std::vector<double> flat;
        flat.reserve(points.size() * dim);
        for (const auto& p : points) {
            if (p.size() != dim) throw InvalidArgument("all points must share one dimension");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return Dataset(dim, metric, std::move(flat));
    }

    std::size_t size() const { return coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    Metric metric() const { return metric_; }
    std::span<const double> coords() const { return coords_; }

    PointView point(std::size_t i) const {
        return PointView(coords_).subspan(i * dim_, dim_);
    }

    double distance(std::size_t i, std::size_t j) const {
        return detail::distance_unchecked(point(i), point(j), metric_);
    }

    double distance_to(std::size_t i, PointView q) const {
        return detail::distance_unchecked(point(i), q, metric_);
    }

    void check_query(PointView q) const {
        if (q.size() != dim_) {
            throw InvalidArgument("query dimension " + std::to_string(q.size()) +
                                  " does not match dataset dimension " + std::to_string(dim_));
        }
    }

    void check_vertex(std::size_t v) const {
        if (v >= size()) {
            throw InvalidArgument("vertex " + std::to_string(v) + " out of range (n=" +
                                  std::to_string(size()) + ")");
        }
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t dim_;
    Metric metric_;
    std::vector<double> coords_;
};

struct DatasetStats {
    double d_max = 0.0;
    double d_min = 0.0;
    double aspect_ratio = 1.0;
    std::pair<VertexId, VertexId> max_pair{};
    std::pair<VertexId, VertexId> min_pair{};
};

/// Exact minimum and maximum pairwise distance by exhaustive enumeration.
inline DatasetStats compute_stats(const Dataset& ds) {
    const std::size_t n = ds.size();
    if (n < 2) throw InvalidArgument("aspect ratio needs at least two points");
    DatasetStats st;
    st.d_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = ds.distance(i, j);
            if (d > st.d_max) {
                st.d_max = d;
                st.max_pair = {static_cast<VertexId>(i), static_cast<VertexId>(j)};
            }
            if (d < st.d_min) {
                st.d_min = d;
                st.min_pair = {static_cast<VertexId>(i), static_cast<VertexId>(j)};
            }
        }
    }
    if (st.d_min <= 0.0) {
        throw DegenerateDataset("points " + std::to_string(st.min_pair.first) + " and " +
                                std::to_string(st.min_pair.second) + " coincide");
    }
    st.aspect_ratio = st.d_max / st.d_min;
    return st;
}

/// Exact k nearest neighbors of q, ascending by distance, ties by index.
inline std::vector<Neighbor> brute_force_knn(const Dataset& ds, PointView q, std::size_t k) {
    ds.check_query(q);
    if (k == 0 || k > ds.size()) {
        throw InvalidArgument("k=" + std::to_string(k) + " must be in [1, n=" +
                              std::to_string(ds.size()) + "]");
    }
    std::vector<Neighbor> all(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        all[i] = {static_cast<VertexId>(i), ds.distance_to(i, q)};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    return all;
}

inline Point centroid(const Dataset& ds) {
    Point c(ds.dim(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto p = ds.point(i);
        for (std::size_t d = 0; d < ds.dim(); ++d) c[d] += p[d];
    }
    for (double& x : c) x /= static_cast<double>(ds.size());
    return c;
}

/// Vertex closest to the coordinate-wise mean; this is the search entry point.
inline VertexId medoid(const Dataset& ds) {
    const Point c = centroid(ds);
    VertexId best = 0;
    double best_d = ds.distance_to(0, c);
    for (std::size_t i = 1; i < ds.size(); ++i) {
        const double d = ds.distance_to(i, c);
        if (d < best_d) {
            best_d = d;
            best = static_cast<VertexId>(i);
        }
    }
    return best;
}

}  // namespace vads
