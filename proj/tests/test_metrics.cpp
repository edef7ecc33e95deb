#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/metrics.hpp"
#include "rwls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

using namespace rwls;

namespace {

Polyline resample(const Polyline& p, double step) {
    Polyline out{p.front()};
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        int k = std::max(1, static_cast<int>(std::ceil((p[i + 1] - p[i]).norm() / step)));
        for (int j = 1; j <= k; ++j) out.push_back(p[i] + (p[i + 1] - p[i]) * (double(j) / k));
    }
    return out;
}

Polyline ngon(int n, double radius, double phase = 0, Point c = {0, 0}) {
    Polyline p;
    for (int i = 0; i <= n; ++i) {
        double a = phase + 2 * std::numbers::pi * (i % n) / n;
        p.push_back(c + radius * Point(std::cos(a), std::sin(a)));
    }
    return p;
}

Polyline rotate_closed(const Polyline& p, int k) {
    Polyline q;
    const int n = static_cast<int>(p.size()) - 1;
    for (int i = 0; i <= n; ++i) q.push_back(p[(i + k) % n]);
    return q;
}

// Smallest threshold over all partial injections, by exhaustive search.
double brute_matching(const std::vector<std::vector<double>>& d, const std::vector<double>& ha,
                      const std::vector<double>& hb) {
    const int n = static_cast<int>(ha.size()), m = static_cast<int>(hb.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> partner(n, -1);
    std::vector<char> used(m, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            double v = 0;
            for (int a = 0; a < n; ++a) v = std::max(v, partner[a] < 0 ? ha[a] : d[a][partner[a]]);
            for (int b = 0; b < m; ++b)
                if (!used[b]) v = std::max(v, hb[b]);
            best = std::min(best, v);
            return;
        }
        partner[i] = -1;
        rec(i + 1);
        for (int b = 0; b < m; ++b) {
            if (used[b]) continue;
            used[b] = 1;
            partner[i] = b;
            rec(i + 1);
            used[b] = 0;
        }
        partner[i] = -1;
    };
    rec(0);
    return best;
}

Polyline random_loop(Rng& rng) {
    int n = 3 + static_cast<int>(bounded(rng, 4));
    Point c(uniform01(rng), uniform01(rng));
    Polyline p;
    for (int i = 0; i < n; ++i) p.push_back(c + 0.3 * Point(uniform01(rng), uniform01(rng)));
    p.push_back(p.front());
    return p;
}

}  // namespace

TEST_CASE("diameter") {
    CHECK(diameter({Point(1, 1)}) == 0);
    CHECK(diameter({Point(0, 0), Point(1, 0)}) == 1);
    Polyline sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    CHECK(diameter(sq) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    Polyline big = ngon(100, 1);
    double brute = 0;
    for (const auto& a : big)
        for (const auto& b : big) brute = std::max(brute, (a - b).norm());
    CHECK(diameter(big) == doctest::Approx(brute).epsilon(1e-15));
}

TEST_CASE("Frechet examples") {
    Polyline seg{{0, 0}, {1, 0}};
    CHECK(frechet_distance(seg, seg) == 0);
    for (double h : {0.1, 0.5, 2.0}) {
        Polyline up{{0, h}, {1, h}};
        CHECK(std::abs(frechet_distance(seg, up) - h) <= 1e-9 * h);
    }
    Polyline p{{0, 0}, {2, 0}}, q{{0, 0}, {1, 1}, {2, 0}};
    CHECK(std::abs(frechet_distance(p, q) - 1) <= 1e-9);
    // dense reparameterization grid approaches the same value from above
    double dense = discrete_frechet(resample(p, 1e-3), resample(q, 1e-3));
    CHECK(dense >= 1 - 1e-12);
    CHECK(dense <= 1 + 2e-3);
    CHECK(frechet_decision(p, q, 1 + 1e-9));
    CHECK_FALSE(frechet_decision(p, q, 1 - 1e-6));
}

TEST_CASE("Frechet bounds on random polylines") {
    Rng rng = make_stream(1, 0);
    for (int i = 0; i < 300; ++i) {
        Polyline a = random_loop(rng), b = random_loop(rng);
        a.pop_back();
        b.pop_back();
        double f = frechet_distance(a, b);
        CHECK(f >= vertex_hausdorff(a, b) - 1e-12);
        CHECK(f <= discrete_frechet(a, b) + 1e-12);
        CHECK(std::abs(f - frechet_distance(b, a)) <= 1e-9);
        double dense = discrete_frechet(resample(a, 2e-3), resample(b, 2e-3));
        CHECK(f <= dense + 1e-9);
        CHECK(dense <= f + 3e-3);
    }
}

TEST_CASE("unrooted loop distance") {
    Polyline a = ngon(12, 1);
    for (int k = 0; k < 12; ++k) {
        LoopDistance d = unrooted_loop_distance(a, rotate_closed(a, k));
        CHECK(d.distance <= d.gap + 1e-12);
    }
    Polyline sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    Polyline moved = sq;
    for (auto& x : moved) x += Point(0.3, 0);
    CHECK(std::abs(unrooted_loop_distance(sq, moved).distance - 0.3) <= 1e-9);

    Polyline inner = ngon(64, 1), outer = ngon(64, 1.2, 0.05);
    LoopDistance d = unrooted_loop_distance(inner, outer);
    double oracle = unrooted_loop_distance(inner, outer, 512).distance;
    CHECK(std::abs(d.distance - 0.2) <= d.gap + 1e-9);
    CHECK(d.distance >= oracle - 1e-12);
    CHECK(d.distance - oracle <= d.gap + 1e-12);
    CHECK_THROWS(unrooted_loop_distance({{0, 0}, {1, 0}}, sq));
}

TEST_CASE("zero-length edges are dropped") {
    Polyline p{{0, 0}, {0, 0}, {1, 0}, {1, 0}};
    CHECK(canonical_polyline(p).size() == 2);
    CHECK(frechet_distance(p, {{0, 0}, {1, 0}}) == 0);
}

TEST_CASE("soup distance examples") {
    Polyline x = ngon(8, 0.25);
    std::vector<Polyline> A{x, ngon(6, 0.1, 0, {0.5, 0.5})};
    CHECK(loop_soup_distance(A, A).value == 0);
    std::vector<Polyline> lone{{{0, 0}, {0.4, 0}, {0, 0}}};
    CHECK(loop_soup_distance({}, lone).value == doctest::Approx(0.2).epsilon(1e-15));
    // two loops of diameter 0.5 at distance 0.1: matching beats leaving both unmatched
    auto cert = matching_distance({{0.1}}, {0.25}, {0.25});
    CHECK(cert.value == doctest::Approx(0.1));
    CHECK(cert.pairs.size() == 1);
    Polyline sq{{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}, {0, 0}};
    Polyline sq2 = sq;
    for (auto& p : sq2) p += Point(0.1, 0);
    CHECK(loop_soup_distance({sq}, {sq2}).value == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("matching agrees with exhaustive search") {
    Rng rng = make_stream(2, 0);
    for (int it = 0; it < 500; ++it) {
        int n = static_cast<int>(bounded(rng, 5)), m = static_cast<int>(bounded(rng, 5));
        std::vector<std::vector<double>> d(n, std::vector<double>(m));
        std::vector<double> ha(n), hb(m);
        for (auto& row : d)
            for (auto& x : row) x = uniform01(rng);
        for (auto& h : ha) h = uniform01(rng);
        for (auto& h : hb) h = uniform01(rng);
        auto cert = matching_distance(d, ha, hb);
        CHECK(cert.value == doctest::Approx(brute_matching(d, ha, hb)).epsilon(1e-15));
        // the certificate realizes its value
        double v = 0;
        std::vector<char> ua(n, 1), ub(m, 1);
        for (auto [a, b] : cert.pairs) {
            v = std::max(v, d[a][b]);
            ua[a] = ub[b] = 0;
        }
        for (int a = 0; a < n; ++a)
            if (ua[a]) v = std::max(v, ha[a]);
        for (int b = 0; b < m; ++b)
            if (ub[b]) v = std::max(v, hb[b]);
        CHECK(v == doctest::Approx(cert.value).epsilon(1e-15));
    }
}

TEST_CASE("soup distance is a pseudometric on random triples") {
    Rng rng = make_stream(3, 0);
    int violations = 0;
    for (int it = 0; it < 300; ++it) {
        std::vector<std::vector<Polyline>> s(3);
        for (auto& soup : s) {
            int k = static_cast<int>(bounded(rng, 4));
            for (int j = 0; j < k; ++j) soup.push_back(random_loop(rng));
        }
        double ab = loop_soup_distance(s[0], s[1]).value, ba = loop_soup_distance(s[1], s[0]).value;
        double bc = loop_soup_distance(s[1], s[2]).value, ac = loop_soup_distance(s[0], s[2]).value;
        CHECK(ab == ba);
        if (ac > ab + bc + 1e-9) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("simplification stays within tolerance") {
    Rng rng = make_stream(4, 0);
    Polyline walk{{0, 0}};
    for (int i = 0; i < 400; ++i) walk.push_back(walk.back() + 0.01 * Point(uniform01(rng) - 0.5, uniform01(rng) - 0.5));
    Polyline s = simplify(walk, 0.02);
    CHECK(s.size() < walk.size());
    CHECK(frechet_distance(walk, s) <= 0.02 + 1e-12);
    CHECK(s.front() == walk.front());
    CHECK(s.back() == walk.back());
}

TEST_CASE("metric closure") {
    std::vector<std::vector<double>> d{{0, 5, 1}, {5, 0, 1}, {1, 1, 0}};
    metric_closure(d);
    CHECK(d[0][1] == 2);
    CHECK(point_polyline_distance(Point(0.5, 1), {{0, 0}, {1, 0}}) == doctest::Approx(1));
}
