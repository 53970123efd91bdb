#include <cmath>
#include <filesystem>

#include "catch_amalgamated.hpp"
#include "vads/instances.hpp"

using namespace vads;

namespace {

double dist(const GeneratedInstance& inst, VertexId i, const Point& p) { return inst.dataset.distance_to(i, p); }

Point at(const GeneratedInstance& inst, VertexId i) {
    const auto v = inst.dataset.point(i);
    return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("line instance with alpha 2 and k 2", "[instances]") {
    const auto inst = gen_line_delta(2, 2.0);
    REQUIRE(inst.dataset.size() == 4);
    const std::vector<double> want{2, 4, 8, 10};
    for (VertexId i = 0; i < 4; ++i) CHECK(inst.dataset.point(i)[0] == want[i]);
    CHECK(compute_stats(inst.dataset).aspect_ratio == 4.0);
    CHECK(inst.region("left") == IndexRange{0, 2});
    CHECK(inst.region("right") == IndexRange{2, 4});
    CHECK(inst.ground_truth[0] == std::vector<VertexId>{0});
    CHECK(inst.ground_truth[1] == std::vector<VertexId>{3});
    CHECK(inst.meta["right_end"] == 12.0);
}

TEST_CASE("line instance is symmetric and grows geometrically", "[instances]") {
    for (double alpha : {1.5, 2.0, 3.0}) {
        const std::size_t k = 8;
        const auto inst = gen_line_delta(k, alpha);
        const double right_end = inst.meta["right_end"].get<double>();
        for (std::size_t i = 0; i < k; ++i) {
            const double left = inst.dataset.point(i)[0];
            const double mirror = inst.dataset.point(2 * k - 1 - i)[0];
            CHECK(left == Catch::Approx(std::pow(alpha, static_cast<double>(i + 1))));
            CHECK(left + mirror == Catch::Approx(right_end));
        }
    }
}

TEST_CASE("line instance rejects bad parameters", "[instances]") {
    CHECK_THROWS_AS(gen_line_delta(2000, 2.0), RangeError);
    CHECK_THROWS_AS(gen_line_delta(0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(gen_line_delta(3, 1.0), InvalidArgument);
}

TEST_CASE("funnel distances for alpha 2", "[instances]") {
    const auto inst = gen_funnel_alpha(400, 2.0, 0.005);
    REQUIRE(inst.dataset.size() == 402);
    CHECK(inst.dataset.metric() == Metric::L1);
    const VertexId p0 = inst.region("p0").begin;
    const VertexId pp = inst.region("p_prime").begin;
    const VertexId a = inst.region("a").begin;
    const Point& q = inst.queries.front();
    CHECK(inst.dataset.distance(p0, a) == Catch::Approx(4.0));
    CHECK(dist(inst, a, q) == Catch::Approx(1.005));
    CHECK(dist(inst, p0, q) == Catch::Approx(2.995));
    CHECK(dist(inst, pp, q) > dist(inst, p0, q));
    CHECK(inst.ground_truth[0].front() == a);
    CHECK(inst.meta["warnings"].empty());

    // p0 is the grid point closest to q.
    for (VertexId p = inst.region("P").begin; p < inst.region("P").end; ++p) CHECK(dist(inst, p, q) >= dist(inst, p0, q));
}

TEST_CASE("funnel distances for alpha 3", "[instances]") {
    const auto inst = gen_funnel_alpha(100, 3.0, 0.005);
    const VertexId p0 = inst.region("p0").begin;
    const VertexId pp = inst.region("p_prime").begin;
    const VertexId a = inst.region("a").begin;
    CHECK(inst.dataset.distance(pp, a) == Catch::Approx(1.0));
    CHECK(inst.dataset.distance(p0, a) == Catch::Approx(3.0));
    // p' dominates a from p0 with equality.
    CHECK(inst.dataset.distance(pp, a) * 3.0 == inst.dataset.distance(p0, a));
}

TEST_CASE("funnel rounds non-square sizes down", "[instances]") {
    const auto inst = gen_funnel_alpha(410, 2.0, 0.005);
    CHECK(inst.region("P").size() == 400);
    REQUIRE(inst.meta["warnings"].size() == 1);
    CHECK_THROWS_AS(gen_funnel_alpha(400, 2.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(gen_funnel_alpha(400, 1.0, 0.005), InvalidArgument);
}

TEST_CASE("diskann-hard layout at one million points", "[instances]") {
    const auto inst = gen_diskann_hard(1000000);
    // Grids round to the nearest square.
    CHECK(inst.dataset.size() == 894 * 894 + 2 * 316 * 316 + 5);
    CHECK(inst.meta["l"] == 10000.0);
    CHECK(inst.queries.front() == Point{-4000.0, 0.0});
    CHECK(at(inst, inst.region("a").begin) == Point{0.0, 1000.0});
    CHECK(inst.region("M").size() == 894 * 894);
    CHECK(inst.region("P").size() == 316 * 316);
    CHECK(inst.region("answer").size() == 5);
    CHECK(inst.region("M").contains(medoid(inst.dataset)));

    auto truth = inst.ground_truth[0];
    std::sort(truth.begin(), truth.end());
    CHECK(truth == inst.region("answer").ids());
}

TEST_CASE("diskann-hard answer cluster is nearest to q and to nothing on the far side", "[instances]") {
    for (std::size_t n : {1000u, 4000u, 10000u, 100000u}) {
        const auto inst = gen_diskann_hard(n);
        const VertexId a = inst.region("a").begin;
        const Point& q = inst.queries.front();
        CHECK(inst.ground_truth[0].front() == a);
        const auto ans = inst.region("answer");
        const Point corner{-1.2 * inst.meta["l"].get<double>(), 1.2 * inst.meta["l"].get<double>()};
        for (VertexId s = ans.begin + 1; s < ans.end; ++s) {
            CHECK(dist(inst, s, q) > dist(inst, a, q));
            CHECK(dist(inst, s, corner) > dist(inst, a, corner));
            CHECK(inst.dataset.distance(s, a) == Catch::Approx(1e-3));
        }
    }
    CHECK_THROWS_AS(gen_diskann_hard(999), InvalidArgument);
}

TEST_CASE("chain-hard chains at one million points", "[instances]") {
    const auto inst = gen_chain_hard(1000000);
    CHECK(inst.dataset.size() > 990000);
    CHECK(inst.dataset.size() < 1010000);
    CHECK(inst.meta["chain_steps"]["diagonal"] == 400);
    CHECK(inst.meta["chain_steps"]["horizontal"] == 2000);
    CHECK(inst.meta["chain_steps"]["vertical"] == 2000);
    CHECK(inst.region("chain_diagonal").size() == 400);
    CHECK(inst.region("chain_horizontal").size() == 1999);
    CHECK(inst.region("chain_vertical").size() == 1999);

    const double l = 10000.0;
    const double reach = 5.0 * std::sqrt(2.0) * (1 + 1e-12);
    auto walk = [&](const Point& from, const IndexRange& r, const Point& to) {
        Point prev = from;
        for (VertexId v = r.begin; v < r.end; ++v) {
            CHECK(distance(prev, at(inst, v), Metric::L2) <= reach);
            prev = at(inst, v);
        }
        CHECK(distance(prev, to, Metric::L2) <= reach);
    };
    walk({-1.2 * l, 1.2 * l}, inst.region("chain_diagonal"), {-l, l});
    walk({-l, l}, inst.region("chain_horizontal"), {0.0, l});
    walk({-l, l}, inst.region("chain_vertical"), {-l, 0.0});
    // Chain endpoints coincide with grid corners.
    CHECK(at(inst, inst.region("P").begin) == Point{-l, 0.0});
    CHECK(at(inst, inst.region("P_prime").begin) == Point{0.0, l});
    CHECK(at(inst, inst.region("M").begin) == Point{-1.2 * l, 1.2 * l});
}

TEST_CASE("kdt-hard layout", "[instances]") {
    const std::size_t n = 10000;
    const auto inst = gen_kdt_hard(n, 3);
    CHECK(inst.dataset.dim() == 6);
    const auto p = inst.region("P");
    CHECK(p.size() == 1000);
    CHECK(inst.dataset.point(p.begin)[1] == -500.0);
    CHECK(inst.dataset.point(p.end - 1)[1] == 500.0);
    for (VertexId v = p.begin; v < p.end; ++v) CHECK(inst.dataset.point(v)[0] == -1e9);

    const VertexId a = inst.region("a").begin;
    const Point& q = inst.queries.front();
    const auto av = inst.dataset.point(a);
    CHECK(std::hypot(av[0] - q[0], av[1] - q[1]) == Catch::Approx(std::sqrt(2.0) * 3e8));
    CHECK(inst.ground_truth[0].front() == a);
    CHECK(gen_kdt_hard(n, 3).dataset == inst.dataset);
    CHECK_FALSE(gen_kdt_hard(n, 4).dataset == inst.dataset);
}

TEST_CASE("ratio modifier", "[instances]") {
    const auto base = gen_diskann_hard(10000);
    const VertexId a = base.region("a").begin;
    const double gap0 = dist(base, a, base.queries.front());

    const auto same = apply_ratio_modifier(base, 1.0, gap0);
    CHECK(same.dataset == base.dataset);
    CHECK(same.ground_truth == base.ground_truth);

    const auto twice = apply_ratio_modifier(base, 2.0, 2.0 * gap0);
    for (auto [i, j] : {std::pair<VertexId, VertexId>{0, 1}, {5, 9000}, {a, 17}}) {
        CHECK(twice.dataset.distance(i, j) == Catch::Approx(2.0 * base.dataset.distance(i, j)));
    }
    CHECK(twice.queries.front() == Point{-80.0, 0.0});

    CHECK_THROWS_AS(apply_ratio_modifier(base, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(apply_ratio_modifier(base, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("ratio modifier with unit gap makes grid points poor answers", "[instances]") {
    const auto inst = gen_diskann_hard(100000, 1.0, 1.0);
    const Point& q = inst.queries.front();
    const VertexId a = inst.region("a").begin;
    CHECK(dist(inst, a, q) == Catch::Approx(1.0));
    const auto truth = inst.ground_truth[0];
    std::vector<VertexId> sorted(truth.begin(), truth.end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == inst.region("answer").ids());
    double worst = std::numeric_limits<double>::infinity();
    for (VertexId p = inst.region("P").begin; p < inst.region("P").end; ++p) worst = std::min(worst, dist(inst, p, q));
    CHECK(worst / dist(inst, a, q) >= 400.0);

    const auto dflt = with_default_ratio_modifier(gen_diskann_hard(100000));
    CHECK(dist(dflt, a, dflt.queries.front()) == Catch::Approx(0.01 * std::hypot(400.0, 100.0)));
}

TEST_CASE("generation is deterministic and survives save and load", "[instances]") {
    InstanceSpec spec;
    spec.family = Family::Uniform;
    spec.n = 500;
    spec.dim = 3;
    spec.num_queries = 7;
    spec.seed = 11;
    spec.metric = Metric::L1;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.dataset == b.dataset);
    CHECK(a.queries == b.queries);
    CHECK(a.ground_truth == b.ground_truth);
    CHECK(a.ground_truth.size() == 7);

    const auto dir = std::filesystem::temp_directory_path() / "vads_instance_test";
    std::filesystem::create_directories(dir);
    for (const auto& inst : {a, gen_funnel_alpha(100, 2.0, 0.005), gen_diskann_hard(2000, 1.0, 0.5)}) {
        const std::string prefix = (dir / std::string(to_string(inst.spec.family))).string();
        save_instance(prefix, inst);
        const auto back = load_instance(prefix);
        CHECK(back.dataset == inst.dataset);
        CHECK(back.queries == inst.queries);
        CHECK(back.ground_truth == inst.ground_truth);
        CHECK(back.regions == inst.regions);
        CHECK(back.spec.family == inst.spec.family);
        CHECK(back.spec.answer_gap == inst.spec.answer_gap);
    }
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_instance((dir / "missing").string()), IoError);
}

TEST_CASE("family names", "[instances]") {
    for (Family f : {Family::LineDelta, Family::FunnelAlpha, Family::DiskannHard, Family::ChainHard, Family::KdtHard,
                     Family::Uniform}) {
        CHECK(parse_family(to_string(f)) == f);
    }
    CHECK_THROWS_AS(parse_family("grid"), InvalidArgument);
}
