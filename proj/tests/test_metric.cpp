#include <cmath>
#include <limits>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "vads/metric.hpp"

using namespace vads;
using vads::testing::line_dataset;
using vads::testing::random_dataset;

TEST_CASE("distance on small vectors", "[metric]") {
    const Point o{0, 0}, p{3, 4};
    CHECK(distance(o, o, Metric::L2) == 0.0);
    CHECK(distance(o, p, Metric::L2) == 5.0);
    CHECK(distance(o, p, Metric::L1) == 7.0);
    CHECK_THROWS_AS(distance(o, Point{1, 2, 3}, Metric::L2), InvalidArgument);
}

TEST_CASE("metric axioms on random triples", "[metric]") {
    for (Metric m : {Metric::L1, Metric::L2}) {
        const auto pts = vads::testing::random_points(3000, 4, m == Metric::L1 ? 11 : 12, -5, 5);
        for (std::size_t t = 0; t < 1000; ++t) {
            const auto& a = pts[3 * t];
            const auto& b = pts[3 * t + 1];
            const auto& c = pts[3 * t + 2];
            CHECK(distance(a, a, m) == 0.0);
            CHECK(distance(a, b, m) == distance(b, a, m));
            const double ac = distance(a, c, m);
            CHECK(ac <= (distance(a, b, m) + distance(b, c, m)) * (1 + 1e-9));
        }
    }
}

TEST_CASE("dataset validation", "[metric]") {
    CHECK_THROWS_AS(Dataset(0, Metric::L2, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(2, Metric::L2, {}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(2, Metric::L2, {1.0, 2.0, 3.0}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(1, Metric::L2, {std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(1, Metric::L2, {std::numeric_limits<double>::infinity()}), InvalidArgument);
    const Dataset ds(2, Metric::L1, {0, 0, 1, 1});
    CHECK(ds.size() == 2);
    CHECK(ds.distance(0, 1) == 2.0);
    CHECK_THROWS_AS(ds.check_vertex(2), InvalidArgument);
    CHECK_THROWS_AS(ds.check_query(Point{1.0}), InvalidArgument);
    CHECK(parse_metric("l1") == Metric::L1);
    CHECK(parse_metric("L2") == Metric::L2);
    CHECK_THROWS_AS(parse_metric("cosine"), InvalidArgument);
}

TEST_CASE("compute_stats examples", "[metric]") {
    auto s = compute_stats(line_dataset({0, 1, 3}));
    CHECK(s.d_min == 1.0);
    CHECK(s.d_max == 3.0);
    CHECK(s.aspect_ratio == 3.0);

    CHECK(compute_stats(line_dataset({0, 1})).aspect_ratio == 1.0);

    s = compute_stats(line_dataset({2, 4, 8, 10}));
    CHECK(s.d_min == 2.0);
    CHECK(s.d_max == 8.0);
    CHECK(s.aspect_ratio == 4.0);

    CHECK_THROWS_AS(compute_stats(line_dataset({1, 5, 1})), DegenerateDataset);
    CHECK_THROWS_AS(compute_stats(line_dataset({1})), InvalidArgument);
}

TEST_CASE("compute_stats agrees with a pairwise pass", "[metric]") {
    const auto ds = random_dataset(800, 3, Metric::L2, 5);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double d = distance(ds.point(i), ds.point(j), Metric::L2);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    const auto s = compute_stats(ds);
    CHECK(s.d_min == lo);
    CHECK(s.d_max == hi);
    CHECK(s.aspect_ratio == hi / lo);
    CHECK(ds.distance(s.min_pair.first, s.min_pair.second) == lo);
    CHECK(ds.distance(s.max_pair.first, s.max_pair.second) == hi);
}

TEST_CASE("brute_force_knn examples", "[metric]") {
    const Dataset ds(2, Metric::L2, {0, 0, 1, 0, 5, 0});
    const Point q{0.9, 0};
    auto r = brute_force_knn(ds, q, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].index == 1);
    CHECK(r[0].distance == Catch::Approx(0.1));

    r = brute_force_knn(ds, q, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0].index == 1);
    CHECK(r[1].index == 0);
    CHECK(r[1].distance == Catch::Approx(0.9));
    CHECK(r[2].index == 2);
    CHECK(r[2].distance == Catch::Approx(4.1));

    CHECK_THROWS_AS(brute_force_knn(ds, q, 4), InvalidArgument);
    CHECK_THROWS_AS(brute_force_knn(ds, q, 0), InvalidArgument);
}

TEST_CASE("brute_force_knn ties break by index", "[metric]") {
    const Dataset ds = line_dataset({-1, 1, -1, 1});
    const auto r = brute_force_knn(ds, Point{0.0}, 4);
    CHECK(r[0].index == 0);
    CHECK(r[1].index == 1);
    CHECK(r[2].index == 2);
    CHECK(r[3].index == 3);
}

TEST_CASE("brute_force_knn k-th distance bounds the rest", "[metric]") {
    const auto ds = random_dataset(10000, 2, Metric::L1, 77);
    const Point q{0.5, 0.5};
    const auto r = brute_force_knn(ds, q, 10);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i - 1].distance <= r[i].distance);
    std::vector<char> returned(ds.size(), 0);
    for (const auto& nb : r) returned[nb.index] = 1;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (!returned[i] && ds.distance_to(i, q) < r.back().distance) ++bad;
    CHECK(bad == 0);
}

TEST_CASE("medoid examples", "[metric]") {
    CHECK(medoid(Dataset(2, Metric::L2, {0, 0, 10, 0, 5, 0})) == 2);
    CHECK(medoid(Dataset(2, Metric::L2, {0, 0})) == 0);
    CHECK(medoid(line_dataset({-1, 1})) == 0);
    const auto c = centroid(Dataset(2, Metric::L2, {0, 0, 10, 0, 5, 3}));
    CHECK(c[0] == 5.0);
    CHECK(c[1] == 1.0);
}
