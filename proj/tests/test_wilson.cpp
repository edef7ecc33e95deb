#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/graph.hpp"
#include "rwls/loop_erasure.hpp"
#include "rwls/stats.hpp"
#include "rwls/wilson.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

using namespace rwls;

namespace {

PlanarGraph grid2x2() { return build_square_lattice(0.5, Domain::rect({-0.99, -0.99}, {0.49, 0.49})); }

// All parent assignments on the interior with no cycle: the wired spanning trees.
std::vector<std::vector<int>> enumerate_trees(const PlanarGraph& g) {
    std::vector<int> in = g.interior_vertices();
    std::vector<std::vector<int>> out;
    std::vector<int> choice(in.size(), 0);
    for (;;) {
        std::vector<int> parent(g.size(), -1);
        for (size_t i = 0; i < in.size(); ++i) parent[in[i]] = g.neighbor(in[i], choice[i]);
        bool ok = true;
        for (int v : in) {
            int x = v;
            for (int steps = 0; ok && !g.is_boundary(x); ++steps) {
                if (steps > g.size()) ok = false;
                x = parent[x];
            }
        }
        if (ok) {
            std::vector<int> key;
            for (int v : in) key.push_back(parent[v]);
            out.push_back(key);
        }
        size_t i = 0;
        while (i < in.size() && ++choice[i] == g.degree(in[i])) choice[i++] = 0;
        if (i == in.size()) break;
    }
    return out;
}

std::vector<int> tree_key(const PlanarGraph& g, const WilsonRun& run) {
    std::vector<int> key;
    for (int v : g.interior_vertices()) key.push_back(run.parent[v]);
    return key;
}

}  // namespace

TEST_CASE("good ordering") {
    PlanarGraph::Builder b;
    b.add_vertex({0.3, 0.3}, true);
    CHECK(good_ordering(b.build(), true).size() == 1);

    PlanarGraph g = build_square_lattice(0.5, Domain::rect({-1, -1}, {1, 1}));
    VertexOrdering o = good_ordering(g);
    CHECK(o.size() == static_cast<size_t>(g.interior_count()));
    std::set<int> seen(o.begin(), o.end());
    CHECK(seen.size() == o.size());
    // level 0 cells in lexicographic order: [-1,0)^2, [-1,0)x[0,1), [0,1)x[-1,0), [0,1)^2
    auto at = [&](int v) { return std::make_pair(g.position(v).x(), g.position(v).y()); };
    CHECK(at(o[0]) == std::make_pair(-0.5, -0.5));
    CHECK(at(o[1]) == std::make_pair(-0.5, 0.5));
    CHECK(at(o[2]) == std::make_pair(0.5, -0.5));
    CHECK(at(o[3]) == std::make_pair(0.5, 0.5));
    CHECK(index_ordering(g).size() == o.size());
}

TEST_CASE("direct killing gives single edges") {
    PlanarGraph::Builder b;
    for (int i = 0; i < 3; ++i) {
        int u = b.add_vertex({double(i), 0}, false);
        int d = b.add_vertex({double(i), 1}, true);
        b.add_edge(u, d, 1);
    }
    PlanarGraph g = b.build();
    Rng rng = make_stream(1, 0);
    WilsonRun run = wilsons_algorithm(g, index_ordering(g), rng);
    CHECK(run.branch_count() == 3);
    for (const auto& br : run.branches) CHECK(br.size() == 2);
    for (const auto& e : run.erased)
        for (const auto& l : e) CHECK(l.trivial());
}

TEST_CASE("uniform wired spanning trees on the 2x2 grid") {
    PlanarGraph g = grid2x2();
    auto trees = enumerate_trees(g);
    // matrix-tree theorem: det(D - A) over interior rows, D = 4
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(4, 4);
    auto in = g.interior_vertices();
    for (int i = 0; i < 4; ++i) {
        L(i, i) = g.degree(in[i]);
        for (int k = 0; k < g.degree(in[i]); ++k) {
            auto it = std::find(in.begin(), in.end(), g.neighbor(in[i], k));
            if (it != in.end()) L(i, it - in.begin()) -= 1;
        }
    }
    REQUIRE(static_cast<double>(trees.size()) == doctest::Approx(L.determinant()));
    std::map<std::vector<int>, int> index;
    for (size_t i = 0; i < trees.size(); ++i) index[trees[i]] = static_cast<int>(i);

    const int n = 40000;
    auto sample = [&](const VertexOrdering& order, std::uint64_t seed) {
        std::vector<long long> counts(trees.size(), 0);
        for (int i = 0; i < n; ++i) {
            Rng rng = make_stream(seed, i);
            WilsonRun run = wilsons_algorithm(g, order, rng);
            auto it = index.find(tree_key(g, run));
            REQUIRE(it != index.end());
            ++counts[it->second];
        }
        return counts;
    };
    auto a = sample(good_ordering(g), 2);
    VertexOrdering rev = index_ordering(g);
    std::reverse(rev.begin(), rev.end());
    auto b = sample(rev, 3);
    std::vector<double> p(trees.size()), u(trees.size(), 1.0 / trees.size());
    for (size_t i = 0; i < trees.size(); ++i) p[i] = a[i] / double(n);
    CHECK(total_variation(p, u) <= 0.03);
    CHECK(chi_square_gof(a, u).p_value > 0.001);
    CHECK(chi_square_two_sample(a, b).p_value > 0.001);
}

TEST_CASE("branch structure") {
    PlanarGraph g = build_square_lattice(1.0 / 16, Domain::disk({0, 0}, 1));
    Rng rng = make_stream(4, 0);
    WilsonRun run = wilsons_algorithm(g, good_ordering(g), rng);
    std::vector<int> owner(g.size(), -1);
    for (int k = 0; k < run.branch_count(); ++k) {
        const auto& br = run.branches[k];
        for (size_t j = 0; j + 1 < br.size(); ++j) {
            CHECK(owner[br[j]] == -1);
            owner[br[j]] = k;
        }
        const int end = br.back();
        CHECK((g.is_boundary(end) || (owner[end] >= 0 && owner[end] < k)));
        for (size_t j = 0; j < run.erased[k].size(); ++j) {
            const auto& l = run.erased[k][j].vertices;
            CHECK(l.front() == br[j]);
            CHECK(l.back() == br[j]);
        }
    }
    for (int v : g.interior_vertices()) CHECK(owner[v] >= 0);
    CHECK(macroscopic_loop_count(g, run, std::numeric_limits<double>::infinity()) == 0);
    int prev = 1 << 30;
    for (double e : {0.0, 0.05, 0.1, 0.3}) {
        int c = macroscopic_loop_count(g, run, e);
        CHECK(c <= prev);
        prev = c;
    }
    Rng r2 = make_stream(4, 1);
    CHECK(wilsons_algorithm(g, good_ordering(g), r2, 3).branch_count() == 3);
}

TEST_CASE("coupled branches erase to themselves") {
    PlanarGraph g = build_square_lattice(1.0 / 8, Domain::disk({0, 0}, 1));
    const VertexOrdering order = good_ordering(g);
    for (int i = 0; i < 200; ++i) {
        Rng rng = make_stream(5, i);
        auto coupled = couple_soup_to_branches(g, order, rng);
        for (const auto& c : coupled) {
            REQUIRE(loop_erase(c.walk).core == c.branch);
            bool empty = std::all_of(c.attached.begin(), c.attached.end(),
                                     [](const std::vector<int>& l) { return l.size() <= 1; });
            if (empty) CHECK(c.walk == c.branch);
        }
    }
}

TEST_CASE("run serialization") {
    PlanarGraph g = grid2x2();
    Rng rng = make_stream(6, 0);
    WilsonRun run = wilsons_algorithm(g, good_ordering(g), rng);
    std::ostringstream os;
    write_run_json(os, run);
    CHECK(os.str().find("\"branches\"") != std::string::npos);
    CHECK(os.str().find("\"erased\"") != std::string::npos);
}
