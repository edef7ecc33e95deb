#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/graph.hpp"
#include "rwls/loops.hpp"

#include <Eigen/Dense>
#include <cmath>

using namespace rwls;

namespace {

// Interior transition matrix, built independently of the library.
Eigen::MatrixXd interior_q(const PlanarGraph& g) {
    std::vector<int> idx(g.size(), -1);
    int n = 0;
    for (int v = 0; v < g.size(); ++v)
        if (!g.is_boundary(v)) idx[v] = n++;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < g.size(); ++v) {
        if (g.is_boundary(v)) continue;
        double w = 0;
        for (int k = 0; k < g.degree(v); ++k) w += g.weight(v, k);
        for (int k = 0; k < g.degree(v); ++k)
            if (idx[g.neighbor(v, k)] >= 0) q(idx[v], idx[g.neighbor(v, k)]) += g.weight(v, k) / w;
    }
    return q;
}

// Sum over k <= L of tr(Q^k) / k counts rooted loops of length k with weight 1/k.
double trace_series(const Eigen::MatrixXd& q, int L) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(q.rows(), q.cols());
    double s = 0;
    for (int k = 1; k <= L; ++k) {
        p = p * q;
        s += p.trace() / k;
    }
    return s;
}

PlanarGraph small_grid() {
    // 2x2 interior block of the square lattice with wired boundary
    return build_square_lattice(0.5, Domain::rect({-0.99, -0.99}, {0.49, 0.49}));
}

}  // namespace

TEST_CASE("rooted masses on G_ab") {
    PlanarGraph g = make_g_ab();
    CHECK(rooted_loop_mass(g, {{0, 1, 0}}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(rooted_loop_mass(g, {{0, 1, 0, 1, 0}}) == doctest::Approx(0.015625).epsilon(1e-15));
    CHECK(step_product(g, {0, 0}) == 0);
    CHECK_THROWS(rooted_loop_mass(g, {{0, 0}}));
}

TEST_CASE("unrooted masses on G_ab") {
    PlanarGraph g = make_g_ab();
    UnrootedLoop a = unroot(RootedLoop{{0, 1, 0}});
    UnrootedLoop b = unroot(RootedLoop{{1, 0, 1, 0, 1}});
    // the rotations of (a,b) are (a,b) and (b,a), both with rooted mass 1/8
    CHECK(unrooted_loop_mass(g, a) == doctest::Approx(2 * 0.125).epsilon(1e-15));
    CHECK(b.period == 2);
    CHECK(b.length() == 4);
    CHECK(unrooted_loop_mass(g, b) == doctest::Approx(2 * 1.0 / 64).epsilon(1e-15));
    CHECK(b.canonical == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("enumeration on G_ab") {
    PlanarGraph g = make_g_ab();
    auto four = enumerate_loops(g, 4);
    REQUIRE(four.size() == 2);
    CHECK(four[0].loop.canonical == std::vector<int>{0, 1});
    CHECK(four[0].mass == doctest::Approx(0.25));
    CHECK(four[1].loop.canonical == std::vector<int>{0, 1, 0, 1});
    CHECK(four[1].mass == doctest::Approx(1.0 / 32));
    for (int k = 1; k <= 8; ++k) {
        double expect = 0, got = 0;
        for (int j = 1; j <= k; ++j) expect += std::pow(0.25, j) / j;
        for (const auto& c : enumerate_loops(g, 2 * k)) got += c.mass;
        CHECK(got == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("no self-loop means no loops") {
    PlanarGraph::Builder b;
    int a = b.add_vertex({0, 0}, false), d = b.add_vertex({1, 0}, true);
    b.add_edge(a, d, 1);
    PlanarGraph g = b.build();
    CHECK(enumerate_loops(g, 10).empty());
    CHECK(total_loop_mass(g) == 0);
}

TEST_CASE("total mass of G_ab") {
    PlanarGraph g = make_g_ab();
    // det(I - Q) = 1 - 1/4 by hand
    CHECK(std::abs(total_loop_mass(g) - std::log(4.0 / 3)) <= 1e-12);
    double listed = 0;
    for (const auto& c : enumerate_loops(g, 20)) listed += c.mass;
    CHECK(std::abs(listed - std::log(4.0 / 3)) <= 1e-7);
}

TEST_CASE("enumeration guard and singular systems") {
    CHECK_THROWS(enumerate_loops(make_g_ab(), 25));
    PlanarGraph::Builder b;
    int u = b.add_vertex({0, 0}, false), v = b.add_vertex({1, 0}, false);
    b.add_vertex({2, 0}, true);
    b.add_edge(u, v, 1);
    b.add_edge(v, u, 1);
    CHECK_THROWS(total_loop_mass(b.build()));
}

TEST_CASE("determinant, enumeration and trace series agree on a small grid") {
    PlanarGraph g = small_grid();
    REQUIRE(g.interior_count() == 4);
    Eigen::MatrixXd q = interior_q(g);
    double rho = interior_spectral_radius(g);
    double det_mass = -std::log((Eigen::MatrixXd::Identity(q.rows(), q.cols()) - q).determinant());
    CHECK(total_loop_mass(g) == doctest::Approx(det_mass).epsilon(1e-12));
    // tail bound: sum_{k > 20} n rho^k / k
    double tail = 0;
    for (int k = 21; k < 2000; ++k) tail += q.rows() * std::pow(rho, k) / k;
    double listed = 0;
    for (const auto& c : enumerate_loops(g, 20)) listed += c.mass;
    CHECK(std::abs(listed - trace_series(q, 20)) <= 1e-12);
    CHECK(total_loop_mass(g) - listed >= -1e-12);
    CHECK(total_loop_mass(g) - listed <= tail + 1e-12);
}

TEST_CASE("rotations") {
    std::vector<int> s{2, 0, 1, 0, 1};
    CHECK(least_rotation(s) == 1);
    CHECK(smallest_period({0, 1, 0, 1}) == 2);
    CHECK(smallest_period({0, 1, 2}) == 3);
    UnrootedLoop u = unroot(RootedLoop{{1, 2, 0, 1}});
    CHECK(u.canonical == std::vector<int>{0, 1, 2});
    CHECK(u.rooted().vertices == std::vector<int>{0, 1, 2, 0});
}
