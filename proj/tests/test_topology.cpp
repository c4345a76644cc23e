#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "wsn/engine.hpp"
#include "wsn/topology.hpp"

using namespace wsn;

TEST_CASE("edges are inclusive at the exact radius") {
    const std::vector<Position> pts = {{0, 0}, {3, 4}};  // distance exactly 5
    CHECK(NeighborGraph::build(pts, 5.0).adjacent(0, 1));
    CHECK_FALSE(NeighborGraph::build(pts, 4.999).adjacent(0, 1));
}

TEST_CASE("neighbor lists are sorted and degrees sum to twice the edges") {
    const std::vector<Position> pts = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {10, 10}};
    NeighborGraph g = NeighborGraph::build(pts, 1.5);
    CHECK(g.size() == 5);

    std::size_t degree_sum = 0;
    for (NodeId n = 0; n < 5; ++n) {
        auto nb = g.neighbors(n);
        CHECK(std::is_sorted(nb.begin(), nb.end()));
        CHECK(g.degree(n) == nb.size());
        degree_sum += nb.size();
    }
    CHECK(degree_sum == 2 * g.edge_count());
    CHECK(g.degree(4) == 0);  // the far corner is unreachable
    CHECK(g.edge_count() == 3);
}

TEST_CASE("adjacency matches a brute-force distance check on scattered nodes") {
    Rng rng(derive_seed(7, "topology-test"));
    std::vector<Position> pts;
    for (int i = 0; i < 60; ++i) {
        pts.push_back({rng.uniform() * 100.0, rng.uniform() * 100.0});
    }
    const double radius = 18.0;
    NeighborGraph g = NeighborGraph::build(pts, radius);
    for (NodeId a = 0; a < pts.size(); ++a) {
        for (NodeId b = 0; b < pts.size(); ++b) {
            const bool want = a != b && dist2(pts[a], pts[b]) <= radius * radius;
            CHECK(g.adjacent(a, b) == want);
        }
    }
}

TEST_CASE("build rejects bad input") {
    CHECK_THROWS_AS(NeighborGraph::build({{0, 0}, {0, 0}}, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(NeighborGraph::build({{0, 0}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NeighborGraph::build({{0, 0}}, -1.0), std::invalid_argument);
}

TEST_CASE("unknown ids throw") {
    NeighborGraph g = NeighborGraph::build({{0, 0}, {1, 1}}, 5.0);
    CHECK_THROWS_AS(g.neighbors(2), std::out_of_range);
    CHECK_THROWS_AS(g.degree(9), std::out_of_range);
    CHECK_THROWS_AS((void)g.position(5), std::out_of_range);
}

TEST_CASE("add_node links both directions and keeps lists sorted") {
    NeighborGraph g = NeighborGraph::build({{0, 0}, {4, 0}, {8, 0}}, 5.0);
    NodeId added = g.add_node({2, 0});  // in range of 0 and 1, not 2
    CHECK(added == 3);
    CHECK(g.size() == 4);
    CHECK(g.adjacent(3, 0));
    CHECK(g.adjacent(0, 3));
    CHECK(g.adjacent(3, 1));
    CHECK_FALSE(g.adjacent(3, 2));
    for (NodeId n = 0; n < 4; ++n) {
        auto nb = g.neighbors(n);
        CHECK(std::is_sorted(nb.begin(), nb.end()));
    }
}

TEST_CASE("dist2 is the squared euclidean distance") {
    CHECK(dist2({0, 0}, {3, 4}) == doctest::Approx(25.0));
    CHECK(dist2({-1, -1}, {-1, -1}) == doctest::Approx(0.0));
    CHECK(dist2({2, 5}, {5, 1}) == doctest::Approx(25.0));
}
