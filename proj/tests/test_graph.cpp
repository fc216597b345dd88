#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "fixlab/graph.hpp"

using namespace fixlab;

namespace {

std::vector<Graph> suite() {
    return {cycle_graph(4),   cycle_graph(5),     cycle_graph(6),  complete_graph(3), complete_graph(4),
            petersen_graph(), torus_graph(3, 4), random_regular_graph(10, 3, 7), random_regular_graph(12, 4, 1)};
}

// Degree sequence recomputed from the edge list alone.
std::vector<int> degrees_from_edges(const Graph &g) {
    std::vector<int> deg(g.size(), 0);
    for (auto [u, v] : g.edges()) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
}

} // namespace

TEST(Graph, CycleOfFour) {
    const Graph g = cycle_graph(4);
    EXPECT_EQ(g.size(), 4U);
    EXPECT_EQ(g.degree(), 2);
    EXPECT_EQ(g.edge_count(), 4U);
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_TRUE(g.adjacent(3, 0));
    EXPECT_FALSE(g.adjacent(0, 2));
}

TEST(Graph, CompleteOfFour) {
    const Graph g = complete_graph(4);
    EXPECT_EQ(g.degree(), 3);
    EXPECT_EQ(g.edge_count(), 6U);
}

TEST(Graph, Triangle) {
    const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
    const Graph g = from_edge_list(e);
    EXPECT_EQ(g.size(), 3U);
    EXPECT_EQ(g.degree(), 2);
}

TEST(Graph, PathIsNotRegular) {
    const std::vector<Edge> e{{0, 1}, {1, 2}};
    try {
        from_edge_list(e);
        FAIL() << "expected RegularityError";
    } catch (const RegularityError &err) {
        const std::string msg = err.what();
        EXPECT_NE(msg.find("1"), std::string::npos);
        EXPECT_NE(msg.find("2"), std::string::npos);
    }
}

TEST(Graph, DisconnectedRejected) {
    // two disjoint triangles
    const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}};
    EXPECT_THROW(from_edge_list(e), ConnectivityError);
}

TEST(Graph, SelfLoopAndDuplicateRejected) {
    const std::vector<Edge> loop{{0, 0}, {0, 1}};
    EXPECT_THROW(from_edge_list(loop), SimplicityError);
    const std::vector<Edge> dup{{0, 1}, {1, 0}, {1, 2}, {2, 0}};
    EXPECT_THROW(from_edge_list(dup), SimplicityError);
}

TEST(Graph, OutOfRangeVertex) {
    const std::vector<Edge> e{{0, 1}, {1, 5}};
    EXPECT_THROW(Graph::from_edges(3, e), ConstructionError);
}

TEST(Graph, Petersen) {
    const Graph g = petersen_graph();
    EXPECT_EQ(g.size(), 10U);
    EXPECT_EQ(g.degree(), 3);
    EXPECT_EQ(g.edge_count(), 15U);
    // girth 5: no triangles and no 4-cycles
    for (Vertex x = 0; x < 10; ++x)
        for (Vertex y = x + 1; y < 10; ++y) {
            int common = 0;
            for (Vertex z : g.neighbors(x))
                common += g.adjacent(z, y) ? 1 : 0;
            EXPECT_EQ(common, g.adjacent(x, y) ? 0 : 1) << x << ',' << y;
        }
}

TEST(Graph, InfeasibleConstructions) {
    EXPECT_THROW(cycle_graph(2), ConstructionError);
    EXPECT_THROW(complete_graph(1), ConstructionError);
    EXPECT_THROW(random_regular_graph(5, 3, 1), ConstructionError); // Nk odd
    EXPECT_THROW(random_regular_graph(4, 4, 1), ConstructionError); // k >= N
    EXPECT_THROW(torus_graph(2, 3), ConstructionError);
}

TEST(Graph, RandomRegularIsValidAndDeterministic) {
    const Graph a = random_regular_graph(10, 3, 7);
    const Graph b = random_regular_graph(10, 3, 7);
    EXPECT_EQ(a.size(), 10U);
    EXPECT_EQ(a.degree(), 3);
    EXPECT_EQ(a.edges(), b.edges());
    // the checker accepts its own edge list again
    const auto edges = a.edges();
    EXPECT_NO_THROW(from_edge_list(edges));
    const Graph c = random_regular_graph(30, 3, 2024);
    EXPECT_EQ(c.size(), 30U);
}

TEST(Graph, TorusIsFourRegular) {
    const Graph g = torus_graph(3, 4);
    EXPECT_EQ(g.size(), 12U);
    EXPECT_EQ(g.degree(), 4);
    EXPECT_EQ(g.edge_count(), 24U);
}

TEST(Graph, BuildNamed) {
    EXPECT_EQ(build_named(GraphKind::Cycle, {.n = 7}).size(), 7U);
    EXPECT_EQ(build_named(GraphKind::Complete, {.n = 5}).degree(), 4);
    EXPECT_EQ(build_named(GraphKind::Torus2d, {.rows = 3, .cols = 3}).size(), 9U);
    EXPECT_EQ(build_named(GraphKind::RandomRegular, {.n = 8, .k = 3, .seed = 3}).degree(), 3);
    EXPECT_EQ(build_named(GraphKind::Petersen, {}).size(), 10U);
}

TEST(Graph, DegreeSumIsTwiceEdges) {
    for (const Graph &g : suite()) {
        const auto deg = degrees_from_edges(g);
        EXPECT_EQ(std::accumulate(deg.begin(), deg.end(), std::size_t{0}), 2 * g.edge_count());
        for (int d : deg)
            EXPECT_EQ(d, g.degree());
    }
}

TEST(Graph, StationaryIsUniformAndInvariant) {
    for (const Graph &g : suite()) {
        const VertexDistribution pi = stationary(g);
        double total = 0;
        for (std::size_t x = 0; x < g.size(); ++x) {
            EXPECT_EQ(pi[static_cast<Vertex>(x)],
                      static_cast<double>(g.degree()) / static_cast<double>(2 * g.edge_count()));
            total += pi[static_cast<Vertex>(x)];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        for (std::size_t y = 0; y < g.size(); ++y) {
            double flow = 0;
            for (Vertex x : g.neighbors(static_cast<Vertex>(y)))
                flow += pi[x] / g.degree(x);
            EXPECT_NEAR(flow, pi[static_cast<Vertex>(y)], 1e-12);
        }
    }
    EXPECT_DOUBLE_EQ(stationary(cycle_graph(4))[0], 0.25);
    EXPECT_DOUBLE_EQ(stationary(complete_graph(5))[3], 0.2);
}

TEST(Graph, EdgeListRoundTrip) {
    const Graph g = petersen_graph();
    std::stringstream buf;
    write_edge_list(buf, g);
    const auto edges = parse_edge_list(buf);
    EXPECT_EQ(from_edge_list(edges).edges(), g.edges());
}

TEST(Graph, EdgeListCommentsAndErrors) {
    std::istringstream ok("# triangle\n0 1\n\n1 2 # spoke\n2 0\n");
    EXPECT_EQ(parse_edge_list(ok).size(), 3U);
    std::istringstream bad("0 1\n1\n");
    EXPECT_THROW(parse_edge_list(bad), ConstructionError);
    std::istringstream extra("0 1 2\n");
    EXPECT_THROW(parse_edge_list(extra), ConstructionError);
}

TEST(Graph, NeighborsAreSortedAndSymmetric) {
    for (const Graph &g : suite())
        for (std::size_t x = 0; x < g.size(); ++x) {
            const auto nb = g.neighbors(static_cast<Vertex>(x));
            EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
            for (Vertex y : nb)
                EXPECT_TRUE(g.adjacent(y, static_cast<Vertex>(x)));
        }
}
