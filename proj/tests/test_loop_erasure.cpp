#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/graph.hpp"
#include "rwls/loop_erasure.hpp"
#include "rwls/walk.hpp"

#include <algorithm>

using namespace rwls;

namespace {

// Straight from the definition: Y(k+1) = X(T_k + 1), T_k the last visit of Y(k).
std::vector<int> definition_core(const std::vector<int>& x, std::vector<int>* last = nullptr) {
    std::vector<int> y{x[0]};
    int t = 0;
    for (;;) {
        int lv = t;
        for (int s = t; s < static_cast<int>(x.size()); ++s)
            if (x[s] == y.back()) lv = s;
        if (last) last->push_back(lv);
        if (lv + 1 >= static_cast<int>(x.size())) break;
        y.push_back(x[lv + 1]);
        t = lv + 1;
    }
    return y;
}

}  // namespace

TEST_CASE("one loop then a step") {
    // a=0, b=1, c=2
    auto d = loop_erase({0, 1, 0, 2});
    CHECK(d.core == std::vector<int>{0, 2});
    CHECK(d.loops[0] == std::vector<int>{0, 1, 0});
    CHECK(d.final_loop == std::vector<int>{2});
    CHECK(last_visit({0, 1, 0, 2}, 0) == 2);
    CHECK(last_visit({0, 1, 0, 2}, 1) == 3);
}

TEST_CASE("loop at a later core vertex") {
    // a=0, b=1, c=2, d=3 : X = (a,b,a,c,b,d)
    std::vector<int> x{0, 1, 0, 2, 1, 3};
    std::vector<int> last;
    auto y = definition_core(x, &last);
    auto d = loop_erase(x);
    CHECK(d.core == y);
    CHECK(d.core == std::vector<int>{0, 2, 1, 3});
    CHECK(d.loops.size() == 3);
    CHECK(d.loops[0] == std::vector<int>{0, 1, 0});
    CHECK(d.loops[1] == std::vector<int>{2});
    CHECK(d.loops[2] == std::vector<int>{1});
    CHECK(std::vector<int>(d.last.begin(), d.last.begin() + 3) == std::vector<int>{2, 3, 4});
    CHECK(std::vector<int>(last.begin(), last.begin() + 3) == std::vector<int>{2, 3, 4});
}

TEST_CASE("self-avoiding path is unchanged") {
    std::vector<int> x{4, 7, 1, 9};
    auto d = loop_erase(x);
    CHECK(d.core == x);
    for (const auto& l : d.loops) CHECK(l.size() == 1);
    CHECK(loop_erased_core(x) == x);
    CHECK_THROWS(last_visit(x, 4));
}

TEST_CASE("random walks: reconstruction, roots and last visits") {
    PlanarGraph g = build_square_lattice(0.25, Domain::disk({0, 0}, 1));
    int s = g.nearest_vertex({0, 0});
    Rng rng = make_stream(9, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto x = run_walk(g, s, rng).vertices;
        auto d = loop_erase(x);
        REQUIRE(reconstruct(d) == x);
        REQUIRE(d.core == definition_core(x));
        REQUIRE(loop_erased_core(x) == d.core);
        std::vector<int> sorted = d.core;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        for (int k = 0; k < d.S(); ++k) {
            const auto& l = d.loops[k];
            REQUIRE(l.front() == d.core[k]);
            REQUIRE(l.back() == d.core[k]);
            for (int j = 0; j < k; ++j) REQUIRE(std::find(l.begin(), l.end(), d.core[j]) == l.end());
            if (k > 0) REQUIRE(d.last[k] > d.last[k - 1]);
            REQUIRE(last_visit(x, k) == d.last[k]);
        }
        REQUIRE(loop_erase(d.core).core == d.core);
    }
}
