#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vads/error.hpp"
#include "vads/io.hpp"
#include "vads/metric.hpp"
#include "vads/rng.hpp"

namespace vads {

enum class Family { LineDelta, FunnelAlpha, DiskannHard, ChainHard, KdtHard, Uniform };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::LineDelta: return "line";
        case Family::FunnelAlpha: return "funnel";
        case Family::DiskannHard: return "diskann-hard";
        case Family::ChainHard: return "chain-hard";
        case Family::KdtHard: return "kdt-hard";
        case Family::Uniform: return "uniform";
    }
    return "unknown";
}

inline Family parse_family(std::string_view s) {
    for (Family f : {Family::LineDelta, Family::FunnelAlpha, Family::DiskannHard, Family::ChainHard,
                     Family::KdtHard, Family::Uniform}) {
        if (s == to_string(f)) return f;
    }
    throw InvalidArgument("unknown instance family '" + std::string(s) + "'");
}

/// Declarative description of an instance. Fields not used by a family are ignored.
struct InstanceSpec {
    Family family = Family::DiskannHard;
    std::size_t n = 1000;                ///< target size (LineDelta: k = n / 2)
    double alpha = 2.0;                  ///< LineDelta, FunnelAlpha
    double epsilon = 0.005;              ///< FunnelAlpha
    double scale = 1.0;                  ///< global coordinate multiplier
    std::optional<double> answer_gap;    ///< distance between answer and query after modification
    std::uint64_t seed = 0;              ///< KdtHard, Uniform
    std::size_t dim = 2;                 ///< Uniform
    std::size_t num_queries = 100;       ///< Uniform
    Metric metric = Metric::L2;          ///< Uniform
    std::size_t truth_depth = 5;         ///< ground-truth ids stored per query
};

struct IndexRange {
    VertexId begin = 0;
    VertexId end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(VertexId v) const { return v >= begin && v < end; }
    std::vector<VertexId> ids() const {
        std::vector<VertexId> out(size());
        for (VertexId v = begin; v < end; ++v) out[v - begin] = v;
        return out;
    }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct GeneratedInstance {
    InstanceSpec spec;
    Dataset dataset;
    std::vector<Point> queries;
    std::vector<std::vector<VertexId>> ground_truth;  ///< per query, ascending true neighbors
    std::map<std::string, IndexRange> regions;        ///< named contiguous vertex blocks
    nlohmann::json meta;

    const IndexRange& region(const std::string& name) const {
        auto it = regions.find(name);
        if (it == regions.end()) {
            throw InvalidArgument("instance has no region '" + name + "'");
        }
        return it->second;
    }
};

inline std::vector<std::vector<VertexId>> compute_ground_truth(const Dataset& ds, const std::vector<Point>& queries,
                                                               std::size_t depth) {
    depth = std::min(depth, ds.size());
    std::vector<std::vector<VertexId>> gt;
    gt.reserve(queries.size());
    for (const auto& q : queries) {
        std::vector<VertexId> row;
        for (const auto& nb : brute_force_knn(ds, q, depth)) row.push_back(nb.index);
        gt.push_back(std::move(row));
    }
    return gt;
}

namespace detail {

/// Accumulates points region by region.
class Layout {
public:
    explicit Layout(std::size_t dim) : dim_(dim) {}

    void begin(const std::string& name) {
        current_ = name;
        start_ = size();
    }

    void end() { regions_[current_] = {static_cast<VertexId>(start_), static_cast<VertexId>(size())}; }

    void add(std::initializer_list<double> p) {
        coords_.insert(coords_.end(), p.begin(), p.end());
    }

    void add(const Point& p) { coords_.insert(coords_.end(), p.begin(), p.end()); }

    std::size_t size() const { return coords_.size() / dim_; }

    Dataset finish(Metric m) { return Dataset(dim_, m, std::move(coords_)); }
    std::map<std::string, IndexRange> regions() const { return regions_; }

private:
    std::size_t dim_;
    std::vector<double> coords_;
    std::map<std::string, IndexRange> regions_;
    std::string current_;
    std::size_t start_ = 0;
};

inline std::size_t nearest_square_side(double target) {
    if (target < 1.0) return 1;
    const auto s = static_cast<std::size_t>(std::floor(std::sqrt(target)));
    const double lo = static_cast<double>(s * s);
    const double hi = static_cast<double>((s + 1) * (s + 1));
    return (target - lo <= hi - target) ? std::max<std::size_t>(s, 1) : s + 1;
}

enum class Corner { BottomRight, UpperRight, BottomLeft };

/// side x side unit grid anchored at (cx, cy) by the given corner.
inline void add_grid(Layout& out, std::size_t side, double cx, double cy, Corner corner, double spacing = 1.0) {
    const double sx = corner == Corner::BottomLeft ? 1.0 : -1.0;
    const double sy = corner == Corner::UpperRight ? -1.0 : 1.0;
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            out.add({cx + sx * spacing * static_cast<double>(c), cy + sy * spacing * static_cast<double>(r)});
        }
    }
}

/// The 4 extra Recall@5 targets around the answer point, at distance `radius`
/// from a. Their directions fan out at -50, -20, 20 and 50 degrees around the
/// direction pointing away from both q and `away`, so every satellite is
/// strictly farther than a from q and from points on the `away` side.
inline std::vector<Point> satellites(const Point& a, const Point& q, const Point& away, double radius = 1e-3) {
    auto unit = [&](const Point& p) {
        const double dx = p[0] - a[0], dy = p[1] - a[1];
        const double len = std::hypot(dx, dy);
        return std::array<double, 2>{dx / len, dy / len};
    };
    const auto uq = unit(q);
    const auto um = unit(away);
    const double bx0 = -(uq[0] + um[0]), by0 = -(uq[1] + um[1]);
    const double blen = std::hypot(bx0, by0);
    const double bx = bx0 / blen, by = by0 / blen;
    std::vector<Point> out;
    for (double deg : {-50.0, -20.0, 20.0, 50.0}) {
        const double t = deg * std::numbers::pi / 180.0;
        const double dx = bx * std::cos(t) - by * std::sin(t);
        const double dy = bx * std::sin(t) + by * std::cos(t);
        if (dx * uq[0] + dy * uq[1] >= 0.0 || dx * um[0] + dy * um[1] >= 0.0) {
            throw std::logic_error("satellite direction not separated from query or far side");
        }
        out.push_back({a[0] + radius * dx, a[1] + radius * dy});
    }
    return out;
}

inline void expect_truth(const GeneratedInstance& inst, std::size_t query, const std::vector<VertexId>& expected,
                         bool as_set) {
    const auto& row = inst.ground_truth.at(query);
    if (row.size() < expected.size()) throw std::logic_error("ground truth shorter than expected answer set");
    std::vector<VertexId> got(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(expected.size()));
    auto want = expected;
    if (as_set) {
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
    }
    if (got != want) {
        throw std::logic_error("generated " + std::string(to_string(inst.spec.family)) +
                               " instance: brute-force ground truth disagrees with the construction");
    }
}

inline void finalize(GeneratedInstance& inst) {
    inst.ground_truth = compute_ground_truth(inst.dataset, inst.queries, inst.spec.truth_depth);
    inst.meta["family"] = std::string(to_string(inst.spec.family));
    inst.meta["n"] = inst.dataset.size();
    inst.meta["dim"] = inst.dataset.dim();
    inst.meta["metric"] = std::string(to_string(inst.dataset.metric()));
    nlohmann::json regions = nlohmann::json::object();
    for (const auto& [name, r] : inst.regions) regions[name] = {r.begin, r.end};
    inst.meta["regions"] = regions;
}

}  // namespace detail

/// 1-D line with points growing geometrically toward both ends:
/// x_i = alpha^i for i <= k and the mirror image for k < i <= 2k.
inline GeneratedInstance gen_line_delta(std::size_t k, double alpha) {
    if (k == 0) throw InvalidArgument("line instance needs k >= 1");
    if (!(alpha > 1.0)) throw InvalidArgument("line instance needs alpha > 1");
    const double ak = std::pow(alpha, static_cast<double>(k));
    const double beta = std::max(1.0 / (alpha - 1.0), alpha - 1.0);
    const double right_end = (2.0 + beta) * ak;
    if (!std::isfinite(right_end)) {
        throw RangeError("alpha^k overflows for k=" + std::to_string(k) + "; reduce k");
    }
    std::vector<double> xs;
    xs.reserve(2 * k);
    for (std::size_t i = 1; i <= k; ++i) xs.push_back(std::pow(alpha, static_cast<double>(i)));
    for (std::size_t i = k + 1; i <= 2 * k; ++i) {
        xs.push_back(2.0 * ak + ak * beta - std::pow(alpha, static_cast<double>(2 * k + 1 - i)));
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw RangeError("line points collapse in double precision at k=" + std::to_string(k) + "; reduce k");
        }
    }

    InstanceSpec spec;
    spec.family = Family::LineDelta;
    spec.n = 2 * k;
    spec.alpha = alpha;
    spec.truth_depth = 1;
    GeneratedInstance inst{spec, Dataset(1, Metric::L2, xs), {{0.0}, {right_end}}, {}, {}, {}};
    inst.regions["left"] = {0, static_cast<VertexId>(k)};
    inst.regions["right"] = {static_cast<VertexId>(k), static_cast<VertexId>(2 * k)};
    inst.meta = {{"k", k}, {"alpha", alpha}, {"beta", beta}, {"right_end", right_end}};
    detail::finalize(inst);
    detail::expect_truth(inst, 0, {0}, false);
    detail::expect_truth(inst, 1, {static_cast<VertexId>(2 * k - 1)}, false);
    return inst;
}

/// Tight approximation instance under l1: a sqrt(n) x sqrt(n) grid P of spacing
/// 0.5*eps/sqrt(n) whose upper-right point p0 sits at the origin, a relay point
/// p' and the answer a. The query q lies on an l1-geodesic between p0 and a.
inline GeneratedInstance gen_funnel_alpha(std::size_t n, double alpha, double epsilon) {
    if (!(alpha > 1.0)) throw InvalidArgument("funnel instance needs alpha > 1");
    if (!(epsilon > 0.0 && epsilon < 0.01)) throw InvalidArgument("funnel instance needs epsilon in (0, 0.01)");
    if (!(alpha < 1.0 + 1.0 / epsilon)) {
        throw InvalidArgument("funnel instance needs alpha < 1 + 1/epsilon so that a is the nearest neighbor");
    }
    const auto side = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    if (side == 0) throw InvalidArgument("funnel instance needs n >= 1");
    nlohmann::json warnings = nlohmann::json::array();
    if (side * side != n) {
        warnings.push_back("n=" + std::to_string(n) + " is not a perfect square; rounded down to " +
                           std::to_string(side * side));
    }
    const std::size_t grid = side * side;
    const double spacing = 0.5 * epsilon / static_cast<double>(side);
    const double relay = 2.0 / (alpha - 1.0);

    detail::Layout out(2);
    out.begin("P");
    detail::add_grid(out, side, 0.0, 0.0, detail::Corner::UpperRight, spacing);
    out.end();
    out.begin("p_prime");
    out.add({2.0, 0.0});
    out.end();
    out.begin("a");
    out.add({2.0, relay});
    out.end();

    InstanceSpec spec;
    spec.family = Family::FunnelAlpha;
    spec.n = grid;
    spec.alpha = alpha;
    spec.epsilon = epsilon;
    spec.truth_depth = 5;
    const Point q{1.0 - epsilon, relay};
    GeneratedInstance inst{spec, out.finish(Metric::L1), {q}, {}, out.regions(), {}};
    inst.regions["p0"] = {0, 1};
    inst.regions["answer"] = inst.regions["a"];
    inst.meta = {{"alpha", alpha},
                 {"epsilon", epsilon},
                 {"grid_side", side},
                 {"grid_spacing", spacing},
                 {"p0", {0.0, 0.0}},
                 {"p_prime", {2.0, 0.0}},
                 {"a", {2.0, relay}},
                 {"q", q},
                 {"warnings", warnings}};
    detail::finalize(inst);
    detail::expect_truth(inst, 0, {static_cast<VertexId>(grid + 1)}, false);
    return inst;
}

namespace detail {

struct HardGeometry {
    double l = 0.0;
    Point q;
    Point a;
};

inline HardGeometry hard_geometry(std::size_t n) {
    const double l = 0.01 * static_cast<double>(n);
    return {l, {-0.4 * l, 0.0}, {0.0, 0.1 * l}};
}

inline void add_hard_grids(Layout& out, double l, std::size_t base, nlohmann::json& meta) {
    const std::size_t m_side = nearest_square_side(0.8 * static_cast<double>(base));
    const std::size_t p_side = nearest_square_side(0.1 * static_cast<double>(base));
    out.begin("M");
    add_grid(out, m_side, -1.2 * l, 1.2 * l, Corner::BottomRight);
    out.end();
    out.begin("P");
    add_grid(out, p_side, -l, 0.0, Corner::UpperRight);
    out.end();
    out.begin("P_prime");
    add_grid(out, p_side, 0.0, l, Corner::BottomLeft);
    out.end();
    meta["M_side"] = m_side;
    meta["P_side"] = p_side;
    meta["P_prime_side"] = p_side;
}

inline void add_answer(Layout& out, const HardGeometry& g) {
    out.begin("answer");
    out.add(g.a);
    for (const auto& s : satellites(g.a, g.q, {-1.2 * g.l, 1.2 * g.l})) out.add(s);
    out.end();
}

}  // namespace detail

inline GeneratedInstance apply_ratio_modifier(const GeneratedInstance& inst, double scale, double answer_gap);

namespace detail {

inline GeneratedInstance modify_if_requested(GeneratedInstance inst, double scale, std::optional<double> answer_gap) {
    if (scale == 1.0 && !answer_gap) return inst;
    const double base =
        distance(inst.dataset.point(inst.region("a").begin), inst.queries.front(), inst.dataset.metric());
    return apply_ratio_modifier(inst, scale, answer_gap.value_or(0.01 * base * scale));
}

}  // namespace detail

/// Three unit grids M (0.8n), P (0.1n), P' (0.1n) with l = 0.01n, the answer
/// a = (0, 0.1l) plus four satellites, and the query q = (-0.4l, 0).
inline GeneratedInstance gen_diskann_hard(std::size_t n, double scale = 1.0,
                                          std::optional<double> answer_gap = std::nullopt) {
    if (n < 1000) throw InvalidArgument("diskann-hard instance needs n >= 1000");
    const auto geo = detail::hard_geometry(n);
    nlohmann::json meta = {{"l", geo.l}, {"q", geo.q}, {"a", geo.a}};
    detail::Layout out(2);
    detail::add_hard_grids(out, geo.l, n - 5, meta);
    detail::add_answer(out, geo);

    InstanceSpec spec;
    spec.family = Family::DiskannHard;
    spec.n = n;
    GeneratedInstance inst{spec, out.finish(Metric::L2), {geo.q}, {}, out.regions(), std::move(meta)};
    inst.regions["a"] = {inst.regions["answer"].begin, inst.regions["answer"].begin + 1};
    detail::finalize(inst);
    detail::expect_truth(inst, 0, inst.regions["answer"].ids(), true);
    return detail::modify_if_requested(std::move(inst), scale, answer_gap);
}

/// The three-grid instance plus chains of points at spacing 5 joining M's
/// near corner to (-l, l), and (-l, l) to the corners of P' and P.
inline GeneratedInstance gen_chain_hard(std::size_t n, double scale = 1.0,
                                        std::optional<double> answer_gap = std::nullopt) {
    if (n < 1000) throw InvalidArgument("chain-hard instance needs n >= 1000");
    const auto geo = detail::hard_geometry(n);
    const double l = geo.l;
    auto steps_for = [](double length) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length / 5.0)));
    };
    const std::size_t diag_steps = steps_for(0.2 * l);
    const std::size_t horiz_steps = steps_for(l);
    const std::size_t vert_steps = steps_for(l);
    // Chain endpoints on grid corners are the grid points themselves.
    const std::size_t chain_points = diag_steps + (horiz_steps - 1) + (vert_steps - 1);

    nlohmann::json meta = {{"l", l}, {"q", geo.q}, {"a", geo.a}};
    meta["chain_steps"] = {{"diagonal", diag_steps}, {"horizontal", horiz_steps}, {"vertical", vert_steps}};
    meta["chain_points"] = {{"diagonal", diag_steps}, {"horizontal", horiz_steps - 1}, {"vertical", vert_steps - 1}};
    const std::size_t base = n > chain_points + 5 ? n - chain_points - 5 : 0;
    detail::Layout out(2);
    detail::add_hard_grids(out, l, base, meta);

    const double dstep = 0.2 * l / static_cast<double>(diag_steps);
    out.begin("chain_diagonal");
    for (std::size_t j = 1; j <= diag_steps; ++j) {
        const double t = dstep * static_cast<double>(j);
        out.add({-1.2 * l + t, 1.2 * l - t});
    }
    out.end();
    const double hstep = l / static_cast<double>(horiz_steps);
    out.begin("chain_horizontal");
    for (std::size_t j = 1; j < horiz_steps; ++j) out.add({-l + hstep * static_cast<double>(j), l});
    out.end();
    const double vstep = l / static_cast<double>(vert_steps);
    out.begin("chain_vertical");
    for (std::size_t j = 1; j < vert_steps; ++j) out.add({-l, l - vstep * static_cast<double>(j)});
    out.end();
    detail::add_answer(out, geo);

    InstanceSpec spec;
    spec.family = Family::ChainHard;
    spec.n = n;
    GeneratedInstance inst{spec, out.finish(Metric::L2), {geo.q}, {}, out.regions(), std::move(meta)};
    inst.regions["a"] = {inst.regions["answer"].begin, inst.regions["answer"].begin + 1};
    detail::finalize(inst);
    detail::expect_truth(inst, 0, inst.regions["answer"].ids(), true);
    return detail::modify_if_requested(std::move(inst), scale, answer_gap);
}

/// Six-dimensional instance whose first two coordinates repeat the three-part
/// layout at scale 1e9 (M grid, vertical chain P, P' grid) and whose remaining
/// four coordinates separate P from everything else.
inline GeneratedInstance gen_kdt_hard(std::size_t n, std::uint64_t seed) {
    if (n < 1000) throw InvalidArgument("kdt-hard instance needs n >= 1000");
    const double nn = static_cast<double>(n);
    const std::size_t m_side = detail::nearest_square_side(0.1 * nn);
    const std::size_t pp_side = detail::nearest_square_side(0.8 * nn);
    const auto chain = static_cast<std::size_t>(std::llround(0.1 * nn));
    const double y_lo = -0.05 * nn, y_hi = 0.05 * nn;
    const double chain_step = (y_hi - y_lo) / static_cast<double>(chain - 1);

    Rng rng(seed);
    auto tail = [&](double lo, double hi) {
        return std::array<double, 4>{uniform_real(rng, lo, hi), uniform_real(rng, lo, hi), uniform_real(rng, lo, hi),
                                     uniform_real(rng, lo, hi)};
    };
    detail::Layout out(6);
    auto add6 = [&](double x, double y, const std::array<double, 4>& t) { out.add({x, y, t[0], t[1], t[2], t[3]}); };

    out.begin("M");
    for (std::size_t r = 0; r < m_side; ++r)
        for (std::size_t c = 0; c < m_side; ++c)
            add6(-1e9 - static_cast<double>(c), 1e9 + static_cast<double>(r), tail(5e7, 6e7));
    out.end();
    out.begin("P");
    for (std::size_t j = 0; j < chain; ++j) {
        const double y = j + 1 == chain ? y_hi : y_lo + chain_step * static_cast<double>(j);
        add6(-1e9, y, tail(1e7, 2e7));
    }
    out.end();
    out.begin("P_prime");
    for (std::size_t r = 0; r < pp_side; ++r)
        for (std::size_t c = 0; c < pp_side; ++c)
            add6(static_cast<double>(c), 1e9 + static_cast<double>(r), tail(5e7, 6e7));
    out.end();
    out.begin("a");
    add6(0.0, 3e8, tail(5e7, 6e7));
    out.end();

    InstanceSpec spec;
    spec.family = Family::KdtHard;
    spec.n = n;
    spec.seed = seed;
    const Point q{-3e8, 0.0, 0.0, 0.0, 0.0, 0.0};
    nlohmann::json meta = {{"M_side", m_side},     {"P_count", chain},   {"P_prime_side", pp_side},
                           {"P_low", {-1e9, y_lo}}, {"P_high", {-1e9, y_hi}}, {"P_step", chain_step},
                           {"seed", seed}};
    GeneratedInstance inst{spec, out.finish(Metric::L2), {q}, {}, out.regions(), std::move(meta)};
    inst.regions["answer"] = inst.regions["a"];
    detail::finalize(inst);
    detail::expect_truth(inst, 0, {inst.regions["a"].begin}, false);
    return inst;
}

/// Control instance: n points and the queries drawn uniformly from [0, 1]^dim.
inline GeneratedInstance gen_uniform(std::size_t n, std::size_t dim, std::size_t num_queries, std::uint64_t seed,
                                     Metric metric = Metric::L2) {
    if (n == 0 || dim == 0) throw InvalidArgument("uniform instance needs n >= 1 and dim >= 1");
    Rng rng(seed);
    std::vector<double> coords(n * dim);
    for (double& c : coords) c = uniform01(rng);
    std::vector<Point> queries(num_queries, Point(dim));
    for (auto& q : queries)
        for (double& c : q) c = uniform01(rng);
    InstanceSpec spec;
    spec.family = Family::Uniform;
    spec.n = n;
    spec.dim = dim;
    spec.num_queries = num_queries;
    spec.seed = seed;
    spec.metric = metric;
    GeneratedInstance inst{spec, Dataset(dim, metric, std::move(coords)), std::move(queries), {}, {}, {}};
    inst.regions["all"] = {0, static_cast<VertexId>(n)};
    inst.meta = {{"seed", seed}};
    detail::finalize(inst);
    return inst;
}

/// Scales every coordinate (points and queries) and then translates the answer
/// cluster rigidly along the a-q line so that D(a, q) equals `answer_gap`.
/// Ground truth is recomputed by brute force.
inline GeneratedInstance apply_ratio_modifier(const GeneratedInstance& inst, double scale, double answer_gap) {
    if (!(scale > 0.0)) throw InvalidArgument("scale must be > 0");
    if (!(answer_gap > 0.0)) throw InvalidArgument("answer_gap must be > 0");
    if (inst.queries.size() != 1) throw InvalidArgument("ratio modifier needs a single-query instance");
    const IndexRange a_range = inst.region("a");
    const IndexRange answer = inst.regions.contains("answer") ? inst.region("answer") : a_range;

    const Dataset& src = inst.dataset;
    std::vector<double> coords(src.coords().begin(), src.coords().end());
    for (double& c : coords) c *= scale;
    Point q = inst.queries.front();
    for (double& c : q) c *= scale;

    const std::size_t dim = src.dim();
    const PointView a(coords.data() + static_cast<std::size_t>(a_range.begin) * dim, dim);
    const double gap = distance(a, q, src.metric());
    if (gap != answer_gap) {
        const double t = answer_gap / gap;
        Point shift(dim);
        for (std::size_t d = 0; d < dim; ++d) shift[d] = (q[d] + (a[d] - q[d]) * t) - a[d];
        for (VertexId v = answer.begin; v < answer.end; ++v) {
            for (std::size_t d = 0; d < dim; ++d) coords[v * dim + d] += shift[d];
        }
    }

    GeneratedInstance out{inst.spec, Dataset(dim, src.metric(), std::move(coords)), {q}, {}, inst.regions, inst.meta};
    out.spec.scale = scale;
    out.spec.answer_gap = answer_gap;
    out.meta["scale"] = scale;
    out.meta["answer_gap"] = answer_gap;
    out.meta["original_answer_distance"] = gap / scale;
    detail::finalize(out);
    return out;
}

/// Dispatches on spec.family; scale/answer_gap apply to families with an answer point.
inline GeneratedInstance generate(const InstanceSpec& spec) {
    GeneratedInstance inst = [&] {
        switch (spec.family) {
            case Family::LineDelta: return gen_line_delta(spec.n / 2, spec.alpha);
            case Family::FunnelAlpha: return gen_funnel_alpha(spec.n, spec.alpha, spec.epsilon);
            case Family::DiskannHard: return gen_diskann_hard(spec.n);
            case Family::ChainHard: return gen_chain_hard(spec.n);
            case Family::KdtHard: return gen_kdt_hard(spec.n, spec.seed);
            case Family::Uniform:
                return gen_uniform(spec.n, spec.dim, spec.num_queries, spec.seed, spec.metric);
        }
        throw InvalidArgument("unknown family");
    }();
    inst = detail::modify_if_requested(std::move(inst), spec.scale, spec.answer_gap);
    if (spec.truth_depth != inst.spec.truth_depth) {
        inst.spec.truth_depth = spec.truth_depth;
        inst.ground_truth = compute_ground_truth(inst.dataset, inst.queries, spec.truth_depth);
    }
    return inst;
}

/// Default ratio-experiment modification: unit scale, answer gap 1% of the original D(a, q).
inline GeneratedInstance with_default_ratio_modifier(const GeneratedInstance& inst) {
    const double base = distance(inst.dataset.point(inst.region("a").begin), inst.queries.front(),
                                 inst.dataset.metric());
    return apply_ratio_modifier(inst, 1.0, 0.01 * base);
}

// ---------------------------------------------------------------------------
// Persistence: <prefix>.vads, <prefix>.queries.vads, <prefix>.gt.ivecs, <prefix>.meta.json

inline void save_instance(const std::string& prefix, const GeneratedInstance& inst) {
    io::write_vads(prefix + ".vads", inst.dataset);
    std::vector<double> qc;
    for (const auto& q : inst.queries) qc.insert(qc.end(), q.begin(), q.end());
    if (!qc.empty()) io::write_vads(prefix + ".queries.vads", Dataset(inst.dataset.dim(), inst.dataset.metric(), qc));
    io::write_ivecs(prefix + ".gt.ivecs", inst.ground_truth);
    nlohmann::json meta = inst.meta;
    meta["spec"] = {{"family", std::string(to_string(inst.spec.family))},
                    {"n", inst.spec.n},
                    {"alpha", inst.spec.alpha},
                    {"epsilon", inst.spec.epsilon},
                    {"scale", inst.spec.scale},
                    {"seed", inst.spec.seed},
                    {"truth_depth", inst.spec.truth_depth}};
    if (inst.spec.answer_gap) meta["spec"]["answer_gap"] = *inst.spec.answer_gap;
    std::ofstream os(prefix + ".meta.json");
    if (!os) throw IoError("cannot write " + prefix + ".meta.json");
    os << meta.dump(2) << '\n';
    io::check_written(os, prefix + ".meta.json");
}

inline GeneratedInstance load_instance(const std::string& prefix) {
    std::ifstream ms(prefix + ".meta.json");
    if (!ms) throw IoError("cannot open " + prefix + ".meta.json");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(ms);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad instance metadata: ") + e.what());
    }
    Dataset ds = io::read_vads(prefix + ".vads");
    std::vector<Point> queries;
    std::ifstream probe(prefix + ".queries.vads");
    if (probe) {
        probe.close();
        const Dataset qs = io::read_vads(prefix + ".queries.vads");
        for (std::size_t i = 0; i < qs.size(); ++i) queries.emplace_back(qs.point(i).begin(), qs.point(i).end());
    }
    InstanceSpec spec;
    try {
        const auto& s = meta.at("spec");
        spec.family = parse_family(s.at("family").get<std::string>());
        spec.n = s.at("n").get<std::size_t>();
        spec.alpha = s.at("alpha").get<double>();
        spec.epsilon = s.at("epsilon").get<double>();
        spec.scale = s.at("scale").get<double>();
        spec.seed = s.at("seed").get<std::uint64_t>();
        spec.truth_depth = s.at("truth_depth").get<std::size_t>();
        if (s.contains("answer_gap")) spec.answer_gap = s.at("answer_gap").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad instance spec in metadata: ") + e.what());
    }
    std::map<std::string, IndexRange> regions;
    const nlohmann::json region_meta = meta.value("regions", nlohmann::json::object());
    for (const auto& [name, r] : region_meta.items()) {
        regions[name] = {r.at(0).get<VertexId>(), r.at(1).get<VertexId>()};
    }
    auto gt = io::read_ivecs(prefix + ".gt.ivecs");
    meta.erase("spec");
    return GeneratedInstance{spec, std::move(ds), std::move(queries), std::move(gt), std::move(regions),
                             std::move(meta)};
}

}  // namespace vads
