#include <set>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "vads/graph.hpp"

using namespace vads;

TEST_CASE("mutators keep the graph simple", "[graph]") {
    ProximityGraph g(3);
    CHECK(g.max_out_degree() == 0);
    CHECK(g.edge_count() == 0);

    g.add_edge(0, 1);
    g.add_edge(0, 1);
    CHECK(g.out_degree(0) == 1);
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));

    CHECK_THROWS_AS(g.set_out_neighbors(1, {1}), InvalidArgument);
    CHECK_THROWS_AS(g.set_out_neighbors(1, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(g.set_out_neighbors(1, {3}), InvalidArgument);
    CHECK_THROWS_AS(g.add_edge(2, 2), InvalidArgument);
    CHECK_THROWS_AS(g.add_edge(0, 5), InvalidArgument);
    CHECK_THROWS_AS(g.out_degree(3), InvalidArgument);

    g.set_out_neighbors(2, {1, 0});
    CHECK(g.out_neighbors(2)[0] == 1);
    CHECK(g.out_neighbors(2)[1] == 0);
    CHECK(g.degree_histogram() == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("degree limit is enforced", "[graph]") {
    ProximityGraph g(4, 2);
    g.set_out_neighbors(0, {1, 2});
    CHECK_THROWS_AS(g.add_edge(0, 3), InvalidArgument);
    CHECK_THROWS_AS(g.set_out_neighbors(1, {0, 2, 3}), InvalidArgument);
    CHECK_THROWS_AS(ProximityGraph(3, 0), InvalidArgument);

    ProximityGraph h(4);
    h.set_out_neighbors(0, {1, 2, 3});
    CHECK_THROWS_AS(h.set_degree_limit(2), InvalidArgument);
    h.set_degree_limit(3);
    CHECK(h.degree_limit() == 3);
}

TEST_CASE("random regular graphs", "[graph]") {
    const auto two = new_random_regular(2, 1, 7);
    CHECK(two.out_neighbors(0)[0] == 1);
    CHECK(two.out_neighbors(1)[0] == 0);

    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto g = new_random_regular(100, 5, seed);
        for (VertexId v = 0; v < 100; ++v) {
            const auto nb = g.out_neighbors(v);
            REQUIRE(nb.size() == 5);
            std::set<VertexId> uniq(nb.begin(), nb.end());
            CHECK(uniq.size() == 5);
            CHECK(uniq.count(v) == 0);
        }
        const auto h = g.degree_histogram();
        CHECK(h.size() == 6);
        CHECK(h[5] == 100);
    }

    const auto a = new_random_regular(1000, 70, 1);
    const auto b = new_random_regular(1000, 70, 2);
    CHECK(a != b);
    CHECK(a == new_random_regular(1000, 70, 1));

    CHECK_THROWS_AS(new_random_regular(5, 5, 0), InvalidArgument);
    CHECK_THROWS_AS(new_random_regular(5, 0, 0), InvalidArgument);
}

TEST_CASE("random regular sampling is roughly uniform", "[graph]") {
    // Every vertex of 50 appears as an out-neighbor of vertex 0 about equally often.
    std::vector<int> hits(50, 0);
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto g = new_random_regular(50, 5, seed);
        for (VertexId w : g.out_neighbors(0)) ++hits[w];
    }
    CHECK(hits[0] == 0);
    const double expected = 2000.0 * 5 / 49;
    for (int v = 1; v < 50; ++v) {
        CHECK(hits[v] > 0.7 * expected);
        CHECK(hits[v] < 1.3 * expected);
    }
}

TEST_CASE("strong connectivity of induced subgraphs", "[graph]") {
    ProximityGraph g(4);
    const std::vector<VertexId> single{2};
    CHECK(is_strongly_connected_subset(g, single));

    g.add_edge(0, 1);
    const std::vector<VertexId> pair{0, 1};
    CHECK_FALSE(is_strongly_connected_subset(g, pair));
    g.add_edge(1, 0);
    CHECK(is_strongly_connected_subset(g, pair));

    // 0 -> 2 -> 3 -> 0 only closes through vertex 3.
    ProximityGraph c(4);
    c.add_edge(0, 2);
    c.add_edge(2, 3);
    c.add_edge(3, 0);
    const std::vector<VertexId> all_three{0, 2, 3};
    const std::vector<VertexId> without_3{0, 2};
    CHECK(is_strongly_connected_subset(c, all_three));
    CHECK_FALSE(is_strongly_connected_subset(c, without_3));
}

TEST_CASE("graph serialization round-trips", "[graph]") {
    for (std::optional<std::size_t> limit : {std::optional<std::size_t>{}, std::optional<std::size_t>{8}}) {
        ProximityGraph g = new_random_regular(300, 8, 3);
        g.set_degree_limit(limit);
        std::ostringstream os(std::ios::binary);
        io::write_graph(os, g);
        const std::string bytes = os.str();
        CHECK(bytes.substr(0, 4) == "VAPG");
        CHECK(bytes.size() == 16 + 300 * 4 * 9);
        std::istringstream is(bytes, std::ios::binary);
        const ProximityGraph back = io::read_graph(is);
        CHECK(back == g);
        std::ostringstream again(std::ios::binary);
        io::write_graph(again, back);
        CHECK(again.str() == bytes);
    }
}

TEST_CASE("malformed graph files are rejected", "[graph]") {
    ProximityGraph g(3);
    g.add_edge(0, 1);
    std::ostringstream os(std::ios::binary);
    io::write_graph(os, g);
    std::string bytes = os.str();

    std::istringstream trunc(bytes.substr(0, bytes.size() - 2), std::ios::binary);
    CHECK_THROWS_AS(io::read_graph(trunc), FormatError);

    // Neighbor id 1 becomes 9, out of range.
    std::string bad = bytes;
    bad[bad.size() - 12] = '\x09';
    std::istringstream oob(bad, std::ios::binary);
    CHECK_THROWS(io::read_graph(oob));
}

TEST_CASE("adjacency csv", "[graph]") {
    ProximityGraph g(3);
    g.set_out_neighbors(0, {2, 1});
    g.add_edge(2, 0);
    std::ostringstream os;
    io::write_adjacency_csv(os, g);
    CHECK(os.str() == "source,target\n0,2\n0,1\n2,0\n");
}
