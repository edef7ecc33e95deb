#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace rwls;

TEST_CASE("mesh larger than the domain leaves no interior") {
    CHECK_THROWS_AS(build_square_lattice(1, Domain::disk({0, 0}, 0.4)), std::invalid_argument);
}

TEST_CASE("half mesh on the square [-1,1]^2") {
    PlanarGraph g = build_square_lattice(0.5, Domain::rect({-1, -1}, {1, 1}));
    // oracle: enumerate 0.5 Z^2 strictly inside, then edges leaving the open square
    std::set<std::pair<double, double>> inside, crossings;
    for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j) {
            double x = 0.5 * i, y = 0.5 * j;
            if (std::abs(x) < 1 && std::abs(y) < 1) inside.insert({x, y});
        }
    for (auto [x, y] : inside) {
        const double d[4][2] = {{0.5, 0}, {-0.5, 0}, {0, 0.5}, {0, -0.5}};
        for (auto& s : d) {
            double nx = x + s[0], ny = y + s[1];
            if (!(std::abs(nx) < 1 && std::abs(ny) < 1)) crossings.insert({nx, ny});
        }
    }
    CHECK(g.interior_count() == static_cast<int>(inside.size()));
    CHECK(g.interior_count() == 9);
    CHECK(g.size() - g.interior_count() == static_cast<int>(crossings.size()));
    CHECK(g.size() - g.interior_count() == 12);
    for (int v : g.interior_vertices()) {
        CHECK(g.degree(v) == 4);
        for (int k = 0; k < 4; ++k) {
            CHECK(g.weight(v, k) == 1);
            CHECK(g.probability(v, k) == 0.25);
        }
    }
}

TEST_CASE("transition probabilities") {
    PlanarGraph g = build_square_lattice(0.1, Domain::disk({0, 0}, 1));
    for (int v : g.interior_vertices()) {
        double s = 0;
        for (int k = 0; k < g.degree(v); ++k) s += transition_probability(g, v, g.neighbor(v, k));
        CHECK(std::abs(s - 1) <= 1e-12);
    }
    CHECK_THROWS(transition_probability(g, g.boundary_vertices().front(), 0));

    PlanarGraph::Builder b;
    int u = b.add_vertex({0, 0}, false);
    int a = b.add_vertex({1, 0}, true), bb = b.add_vertex({0, 1}, true), c = b.add_vertex({-1, 0}, true);
    b.add_edge(u, a, 2);
    b.add_edge(u, bb, 1);
    b.add_edge(u, c, 1);
    PlanarGraph w = b.build();
    CHECK(transition_probability(w, u, a) == 0.5);
    CHECK(transition_probability(w, u, u) == 0);
}

namespace {

// Closed delta-balls around each vertex, all pairs.
int brute_density(const PlanarGraph& g, bool interior_only = false) {
    int best = 0;
    for (int v = 0; v < g.size(); ++v) {
        if (interior_only && g.is_boundary(v)) continue;
        int k = 0;
        for (int w = 0; w < g.size(); ++w)
            if (!(interior_only && g.is_boundary(w)) &&
                (g.position(w) - g.position(v)).norm() <= g.mesh() * (1 + 1e-9))
                ++k;
        best = std::max(best, k);
    }
    return best;
}

}  // namespace

TEST_CASE("perturbed lattice") {
    Domain d = Domain::disk({0, 0}, 1);
    PlanarGraph sq = build_square_lattice(0.1, d);
    PlanarGraph z = build_perturbed_lattice(0.1, d, 0, 7);
    CHECK(serialize_graph(sq) == serialize_graph(z));
    CHECK(serialize_graph(build_perturbed_lattice(0.1, d, 0.2, 7)) ==
          serialize_graph(build_perturbed_lattice(0.1, d, 0.2, 7)));
    // offsets (i, j) with |(i, j)| - 2 sqrt(2) 0.2 <= 1 are the 9 nearest lattice sites
    PlanarGraph p = build_perturbed_lattice(0.1, d, 0.2, 3);
    CHECK(check_bounded_density(p) == brute_density(p));
    CHECK(brute_density(p, true) <= 9);
    CHECK_THROWS(build_perturbed_lattice(0.1, d, 0.35, 3));
    int a = check_bounded_density(build_perturbed_lattice(1.0 / 16, d, 0.3, 5));
    int b = check_bounded_density(build_perturbed_lattice(1.0 / 32, d, 0.3, 5));
    CHECK(a < 20);
    CHECK(b < 20);
}

TEST_CASE("bounded density on the square lattice") {
    PlanarGraph sq = build_square_lattice(0.1, Domain::rect({-1, -1}, {1, 1}));
    CHECK(check_bounded_density(sq) == 5);
    CHECK(check_bounded_density(sq) == brute_density(sq));
    // on the disk, edge crossings of the circle add boundary vertices near the rim
    PlanarGraph disk = build_square_lattice(0.1, Domain::disk({0, 0}, 1));
    CHECK(brute_density(disk, true) == 5);
    CHECK(check_bounded_density(disk) == brute_density(disk));
    PlanarGraph::Builder b;
    b.add_vertex({0, 0}, true);
    CHECK(check_bounded_density(b.build()) == 1);
}

TEST_CASE("edge lengths scale with the mesh") {
    Domain d = Domain::rect({-1, -1}, {1, 1});
    double a = max_edge_diameter(build_square_lattice(0.1, d));
    double b = max_edge_diameter(build_square_lattice(0.05, d));
    CHECK(a == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(a / b == doctest::Approx(2).epsilon(1e-12));
    CHECK(max_edge_diameter(build_square_lattice(0.13, Domain::disk({0, 0}, 1))) <= 0.13 + 1e-12);
}

TEST_CASE("crossing probability") {
    PlanarGraph g = build_square_lattice(1.0 / 32, Domain::disk({0, 0}, 1));
    std::mt19937_64 rng(11);
    auto h = estimate_crossing_probability(g, {-0.375, -0.125}, 8, Orientation::horizontal, StartPolicy::nearest,
                                           10000, rng);
    CHECK(h.estimate > 0);
    CHECK(h.lo > 0);
    auto v = estimate_crossing_probability(g, {-0.125, -0.375}, 8, Orientation::vertical, StartPolicy::nearest,
                                           10000, rng);
    CHECK(v.lo > 0);
    // the rectangle is symmetric under the swap, so the two estimates share a law
    CHECK(std::abs(h.estimate - v.estimate) < 0.05);
    CHECK_THROWS(estimate_crossing_probability(g, {-0.375, -0.125}, 8, Orientation::horizontal,
                                               StartPolicy::nearest, 0, rng));
}

TEST_CASE("serialization round trip") {
    PlanarGraph g = build_perturbed_lattice(0.1, Domain::disk({0, 0}, 1), 0.25, 9);
    std::string s = serialize_graph(g);
    std::istringstream in(s);
    CHECK(serialize_graph(read_graph(in)) == s);
    CHECK(s.rfind("graph v1 delta=0.1\n", 0) == 0);
}

TEST_CASE("domains") {
    Domain sq = Domain::rect({0, 0}, {1, 1});
    CHECK(sq.contains({0.5, 0.5}));
    CHECK_FALSE(sq.contains({1, 0.5}));
    CHECK(sq.diameter() == doctest::Approx(std::sqrt(2.0)));
    Domain tri = Domain::polygon({{0, 0}, {2, 0}, {0, 2}});
    CHECK(tri.area() == doctest::Approx(2));
    CHECK(tri.contains({0.5, 0.5}));
    CHECK_FALSE(tri.contains({1.5, 1.5}));
    CHECK(Domain::disk({0, 0}, 1).boundary_distance({0.25, 0}) == doctest::Approx(0.75));
}
