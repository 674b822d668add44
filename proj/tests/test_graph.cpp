#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "plexsim/graph.hpp"

using namespace plexsim;

namespace {

int count_diagonals(const PlexusGraph& g) {
    int n = 0;
    for (const GraphEdge& e : g.edges()) {
        if (e.kind == EdgeKind::diagonal) ++n;
    }
    return n;
}

// Unit cell (cx,cy) a diagonal belongs to, derived from its endpoints.
std::pair<int, int> cell_of_diagonal(const PlexusGraph& g, const GraphEdge& e) {
    const int col_a = e.a % g.width();
    const int row_a = e.a / g.width();
    const int col_b = e.b % g.width();
    const int row_b = e.b / g.width();
    return {std::min(col_a, col_b), std::min(row_a, row_b)};
}

}  // namespace

TEST_CASE("2x2 grid with no diagonals is the unit square") {
    const PlexusGraph g = build_grid(2, 2, 25.0, 0.0, 123);
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(count_diagonals(g) == 0);
    CHECK(g.is_connected());
}

TEST_CASE("diagonal_fraction 1 fills every cell exactly once") {
    const PlexusGraph g = build_grid(10, 10, 25.0, 1.0, 7);
    CHECK(count_diagonals(g) == 81);  // (10-1)^2 cells
    std::set<std::pair<int, int>> cells;
    for (const GraphEdge& e : g.edges()) {
        if (e.kind != EdgeKind::diagonal) continue;
        CHECK(cells.insert(cell_of_diagonal(g, e)).second);  // one per cell
    }
    CHECK(cells.size() == 81);
}

TEST_CASE("41x41 grid matches the device tiling") {
    const PlexusGraph g = build_grid(41, 41, 25.0, 0.3, 1);
    CHECK(g.node_count() == 1681);
    CHECK(g.extent_um(ExtentMode::node_pitch) == doctest::Approx(1000.0));
    CHECK(g.extent_um(ExtentMode::cell_footprint) == doctest::Approx(1025.0));
}

TEST_CASE("node coordinates follow the row-major lower-left layout") {
    const PlexusGraph g = build_grid(3, 3, 25.0, 0.0, 0);
    CHECK(node_at(g, 0, 0) == 0);
    CHECK(node_at(g, 2, 2) == 8);
    CHECK(g.nodes()[node_at(g, 1, 2)].x_um == doctest::Approx(25.0));
    CHECK(g.nodes()[node_at(g, 1, 2)].y_um == doctest::Approx(50.0));
    CHECK_THROWS_AS((void)node_at(g, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)node_at(g, 0, -1), std::invalid_argument);
}

TEST_CASE("construction rejects bad arguments") {
    CHECK_THROWS_AS((void)build_grid(1, 5, 25.0, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_grid(5, 5, 25.0, 1.5, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_grid(5, 5, -1.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("edges are canonical and unique for any seed") {
    for (std::uint64_t seed : {0ull, 1ull, 42ull, 899ull}) {
        const PlexusGraph g = build_grid(7, 5, 25.0, 0.6, seed);
        std::set<std::pair<NodeIndex, NodeIndex>> seen;
        std::set<std::pair<int, int>> cells;
        for (const GraphEdge& e : g.edges()) {
            CHECK(e.a < e.b);
            CHECK(seen.insert({e.a, e.b}).second);
            if (e.kind == EdgeKind::diagonal) {
                CHECK(cells.insert(cell_of_diagonal(g, e)).second);
            }
        }
        CHECK(g.is_connected());
    }
}

TEST_CASE("same seed gives byte-identical edge lists") {
    const PlexusGraph a = build_grid(12, 9, 25.0, 0.4, 2024);
    const PlexusGraph b = build_grid(12, 9, 25.0, 0.4, 2024);
    REQUIRE(a.edge_count() == b.edge_count());
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        CHECK(a.edges()[i].a == b.edges()[i].a);
        CHECK(a.edges()[i].b == b.edges()[i].b);
        CHECK(a.edges()[i].kind == b.edges()[i].kind);
    }
    const PlexusGraph c = build_grid(12, 9, 25.0, 0.4, 2025);
    bool differs = c.edge_count() != a.edge_count();
    for (std::size_t i = 0; !differs && i < std::min(a.edge_count(), c.edge_count()); ++i) {
        differs = a.edges()[i].a != c.edges()[i].a || a.edges()[i].b != c.edges()[i].b;
    }
    CHECK(differs);
}

TEST_CASE("interior nodes carry four lattice edges") {
    const PlexusGraph g = build_grid(5, 5, 25.0, 0.0, 3);
    std::map<NodeIndex, int> degree;
    for (const GraphEdge& e : g.edges()) {
        ++degree[e.a];
        ++degree[e.b];
    }
    CHECK(degree[node_at(g, 2, 2)] == 4);   // interior
    CHECK(degree[node_at(g, 0, 0)] == 2);   // corner
    CHECK(degree[node_at(g, 2, 0)] == 3);   // border
}

TEST_CASE("text export lists every node and edge") {
    const PlexusGraph g = build_grid(2, 2, 25.0, 1.0, 5);
    std::ostringstream out;
    write_graph_text(g, out);
    const std::string text = out.str();
    std::size_t lines = 0;
    for (char ch : text) lines += (ch == '\n');
    CHECK(lines == g.node_count() + g.edge_count());
    CHECK(text.find("node,0,0,0") != std::string::npos);
    CHECK(text.find("diagonal") != std::string::npos);
}
