#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rwls/graph.hpp"
#include "rwls/loops.hpp"
#include "rwls/soup.hpp"
#include "rwls/stats.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

using namespace rwls;

namespace {

PlanarGraph grid2x2() { return build_square_lattice(0.5, Domain::rect({-0.99, -0.99}, {0.49, 0.49})); }

struct ClassStats {
    std::vector<LoopClassMass> classes;
    std::vector<long long> hits;        // samples containing the class
    std::vector<long long> totals;      // total loop count per sample, histogram
    std::vector<std::vector<long long>> per_class_hist;
};

ClassStats collect(const PlanarGraph& g, int max_len, int n, std::uint64_t seed, const SoupOptions& opt) {
    ClassStats s;
    s.classes = enumerate_loops(g, max_len);
    std::map<std::vector<int>, int> index;
    for (size_t i = 0; i < s.classes.size(); ++i) index[s.classes[i].loop.canonical] = static_cast<int>(i);
    s.hits.assign(s.classes.size(), 0);
    s.per_class_hist.assign(s.classes.size(), std::vector<long long>(8, 0));
    std::vector<int> count(s.classes.size());
    for (int i = 0; i < n; ++i) {
        Rng rng = make_stream(seed, i);
        LoopSoup soup = sample_loop_soup(g, rng, opt);
        std::fill(count.begin(), count.end(), 0);
        for (const auto& l : soup.loops) {
            auto it = index.find(l.unrooted().canonical);
            if (it != index.end()) ++count[it->second];
        }
        for (size_t c = 0; c < count.size(); ++c) {
            s.hits[c] += count[c] > 0;
            ++s.per_class_hist[c][std::min(count[c], 7)];
        }
        size_t t = soup.loops.size();
        if (s.totals.size() <= t) s.totals.resize(t + 1, 0);
        ++s.totals[t];
    }
    return s;
}

void check_inclusion(const ClassStats& s, int n) {
    for (size_t c = 0; c < s.classes.size(); ++c) {
        double p = 1 - std::exp(-s.classes[c].mass);
        double se = std::sqrt(p * (1 - p) / n);
        INFO("class of length " << s.classes[c].loop.length());
        CHECK(std::abs(s.hits[c] / double(n) - p) <= 4 * se);
    }
}

}  // namespace

TEST_CASE("G_ab soups match the loop measure") {
    PlanarGraph g = make_g_ab();
    const int n = 100000;
    for (SoupMethod m : {SoupMethod::walks, SoupMethod::peeling}) {
        SoupOptions opt;
        opt.method = m;
        ClassStats s = collect(g, 6, n, m == SoupMethod::walks ? 1 : 2, opt);
        double mean = 0;
        for (size_t t = 0; t < s.totals.size(); ++t) mean += t * double(s.totals[t]);
        mean /= n;
        CHECK(std::abs(mean - 0.2877) <= 0.005);
        REQUIRE(s.classes[0].loop.canonical == std::vector<int>{0, 1});
        CHECK(std::abs(s.hits[0] / double(n) - 0.2212) <= 0.005);
        check_inclusion(s, n);
        std::vector<long long> counts;
        for (size_t t = 0; t < s.totals.size(); ++t)
            for (long long k = 0; k < s.totals[t]; ++k) counts.push_back(static_cast<long long>(t));
        CHECK(poisson_gof(counts, std::log(4.0 / 3)).p_value > 0.001);
    }
}

TEST_CASE("small grid: inclusion, Poisson counts, order invariance") {
    PlanarGraph g = grid2x2();
    const int n = 100000;
    SoupOptions a, b;
    a.method = b.method = SoupMethod::peeling;
    for (int v = g.size() - 1; v >= 0; --v) b.order.push_back(v);
    ClassStats sa = collect(g, 6, n, 3, a);
    ClassStats sb = collect(g, 6, n, 4, b);
    check_inclusion(sa, n);
    check_inclusion(sb, n);
    // counts of the first class are Poisson with its mass
    std::vector<long long> counts;
    for (int k = 0; k < 8; ++k)
        for (long long j = 0; j < sa.per_class_hist[0][k]; ++j) counts.push_back(k);
    CHECK(poisson_gof(counts, sa.classes[0].mass).p_value > 0.001);
    std::vector<long long> ha, hb;
    for (size_t c = 0; c < sa.classes.size(); ++c) {
        ha.push_back(sa.hits[c]);
        hb.push_back(sb.hits[c]);
    }
    CHECK(chi_square_two_sample(sa.totals, sb.totals).p_value > 0.001);
    CHECK(chi_square_two_sample(ha, hb).p_value > 0.001);
    SoupOptions w;
    ClassStats sw = collect(g, 6, n, 5, w);
    check_inclusion(sw, n);
    CHECK(chi_square_two_sample(sa.totals, sw.totals).p_value > 0.001);
}

TEST_CASE("no loops without cycles") {
    PlanarGraph::Builder b;
    int u = b.add_vertex({0, 0}, false), v = b.add_vertex({1, 0}, false), d = b.add_vertex({2, 0}, true);
    b.add_edge(u, v, 1);
    b.add_edge(v, d, 1);
    PlanarGraph g = b.build();
    Rng rng = make_stream(1, 0);
    for (SoupMethod m : {SoupMethod::walks, SoupMethod::peeling})
        for (int i = 0; i < 100; ++i) CHECK(sample_loop_soup(g, rng, SoupOptions{m, {}, {}}).loops.empty());
}

TEST_CASE("logarithmic law") {
    Rng rng = make_stream(8, 0);
    const double r = 0.6;
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += sample_logarithmic(r, rng);
    double mean = r / ((1 - r) * -std::log(1 - r));
    double var = mean * (1 / (1 - r) - mean);
    CHECK(std::abs(s / n - mean) <= 4 * std::sqrt(var / n));
}

TEST_CASE("restriction") {
    PlanarGraph g = build_square_lattice(1.0 / 16, Domain::disk({0, 0}, 1));
    Rng rng = make_stream(9, 0);
    LoopSoup soup = sample_loop_soup(g, rng);
    CHECK(restrict_soup(g, soup, 0).loops.size() == soup.loops.size());
    CHECK(restrict_soup(g, soup, 3).loops.empty());
    LoopSoup once = restrict_soup(g, soup, 0.2, [](const Point& p) { return p.x() > -0.5; });
    LoopSoup twice = restrict_soup(g, once, 0.2, [](const Point& p) { return p.x() > -0.5; });
    CHECK(once.loops.size() == twice.loops.size());
    for (const auto& l : once.loops) CHECK(loop_diameter(g, l.vertices) >= 0.2);
    CHECK(macroscopic_loop_count(g, soup, 0) == static_cast<int>(soup.loops.size()));
    CHECK(macroscopic_loop_count(g, soup, std::numeric_limits<double>::infinity()) == 0);
}

TEST_CASE("residual graphs and serialization") {
    PlanarGraph g = grid2x2();
    std::vector<char> removed(g.size(), 0);
    int v = g.interior_vertices().front();
    removed[v] = 1;
    Rng rng = make_stream(10, 0);
    for (int i = 0; i < 1000; ++i)
        for (const auto& l : sample_loop_soup(g, rng, SoupOptions{SoupMethod::peeling, {}, removed}).loops)
            for (int x : l.vertices) REQUIRE(x != v);
    CHECK(total_loop_mass(g, removed) < total_loop_mass(g));
    LoopSoup soup = sample_loop_soup(g, rng);
    soup.delta = 0.5;
    std::ostringstream os;
    write_soup_jsonl(os, g, soup);
    std::istringstream in(os.str());
    std::string line;
    size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK(line.find("\"delta\":0.5") != std::string::npos);
        CHECK(line.find("\"mark\":") != std::string::npos);
    }
    CHECK(lines == soup.loops.size());
}
