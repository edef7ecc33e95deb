#include "rwls/soup.hpp"

#include "rwls/metrics.hpp"
#include "rwls/walk.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rwls {

int sample_logarithmic(double r, Rng& rng) {
    if (!(r > 0 && r < 1)) throw std::invalid_argument("logarithmic parameter must lie in (0,1)");
    double u = uniform01(rng);
    double p = r / -std::log1p(-r);
    double F = p;
    int k = 1;
    while (u > F && p > 0) {
        p *= r * k / (k + 1.0);
        ++k;
        F += p;
    }
    return k;
}

namespace {

std::vector<int> peel_order(const PlanarGraph& g, const SoupOptions& opt) {
    if (!opt.order.empty()) return opt.order;
    return g.interior_vertices();
}

// Probability of reaching u before killing, for every vertex (h(u) = 1).
std::vector<double> hit_probability(const PlanarGraph& g, int u, const std::vector<char>& dead) {
    std::vector<int> idx(g.size(), -1);
    std::vector<int> back;
    for (int v = 0; v < g.size(); ++v)
        if (v != u && !g.is_boundary(v) && !dead[v]) {
            idx[v] = static_cast<int>(back.size());
            back.push_back(v);
        }
    std::vector<double> h(g.size(), 0.0);
    h[u] = 1;
    const int n = static_cast<int>(back.size());
    if (n == 0) return h;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n), x;
    for (int i = 0; i < n; ++i) {
        int v = back[i];
        for (int k = 0; k < g.degree(v); ++k)
            if (g.neighbor(v, k) == u) b[i] += g.probability(v, k);
    }
    if (b.isZero()) return h;
    if (n <= 300) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) {
            int v = back[i];
            for (int k = 0; k < g.degree(v); ++k) {
                int w = g.neighbor(v, k);
                if (idx[w] >= 0) A(i, idx[w]) -= g.probability(v, k);
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        x = lu.solve(b);
        if ((A * x - b).lpNorm<Eigen::Infinity>() > 1e-10) throw std::runtime_error("linear solve failure");
    } else {
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n; ++i) {
            int v = back[i];
            trip.emplace_back(i, i, 1.0);
            for (int k = 0; k < g.degree(v); ++k) {
                int w = g.neighbor(v, k);
                if (idx[w] >= 0) trip.emplace_back(i, idx[w], -g.probability(v, k));
            }
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw std::runtime_error("linear solve failure");
        x = lu.solve(b);
        if ((A * x - b).lpNorm<Eigen::Infinity>() > 1e-10) throw std::runtime_error("linear solve failure");
    }
    for (int i = 0; i < n; ++i) h[back[i]] = std::clamp(x[i], 0.0, 1.0);
    return h;
}

// Draw a neighbour of x with probability q(x,w) h(w) / norm.
int h_step(const PlanarGraph& g, int x, const std::vector<double>& h, double norm, Rng& rng) {
    double u = uniform01(rng) * norm, acc = 0;
    int last = -1;
    for (int k = 0; k < g.degree(x); ++k) {
        int w = g.neighbor(x, k);
        double m = g.probability(x, k) * h[w];
        if (m <= 0) continue;
        acc += m;
        last = w;
        if (u < acc) return w;
    }
    return last;
}

void peeling_sampler(const PlanarGraph& g, Rng& rng, const LoopVisitor& visit, const SoupOptions& opt) {
    std::vector<char> dead = opt.removed.empty() ? std::vector<char>(g.size(), 0) : opt.removed;
    std::vector<int> loop;
    for (int u : peel_order(g, opt)) {
        if (g.is_boundary(u) || dead[u]) continue;
        auto h = hit_probability(g, u, dead);
        double r = 0;
        for (int k = 0; k < g.degree(u); ++k) r += g.probability(u, k) * h[g.neighbor(u, k)];
        dead[u] = 1;
        if (r <= 0) continue;
        if (r >= 1) throw std::runtime_error("no killing");
        std::poisson_distribution<int> pois(-std::log1p(-r));
        int K = pois(rng);
        for (int i = 0; i < K; ++i) {
            int k = sample_logarithmic(r, rng);
            loop.assign(1, u);
            for (int e = 0; e < k; ++e) {
                int x = h_step(g, u, h, r, rng);
                loop.push_back(x);
                while (x != u) {
                    x = h_step(g, x, h, h[x], rng);
                    loop.push_back(x);
                }
            }
            visit(loop, uniform01(rng));
        }
    }
}

void walk_sampler(const PlanarGraph& g, Rng& rng, const LoopVisitor& visit, const SoupOptions& opt) {
    std::vector<char> dead = opt.removed.empty() ? std::vector<char>(g.size(), 0) : opt.removed;
    std::vector<int> path, visits;
    for (int u : peel_order(g, opt)) {
        if (g.is_boundary(u) || dead[u]) continue;
        path.clear();
        walk_until_blocked(g, u, dead, path, rng);
        dead[u] = 1;
        visits.clear();
        for (int t = 0; t < static_cast<int>(path.size()); ++t)
            if (path[t] == u) visits.push_back(t);
        int m = static_cast<int>(visits.size()) - 1;  // i.i.d. returning excursions
        // cycle lengths of a uniform permutation of the m excursions
        int start = 0;
        for (int e = 1; e <= m; ++e) {
            int remaining = m - e + 1;
            if (remaining == 1 || bounded(rng, static_cast<std::uint32_t>(remaining)) == 0) {
                std::span<const int> s(path.data() + visits[start], path.data() + visits[e] + 1);
                visit(s, uniform01(rng));
                start = e;
            }
        }
    }
}

}  // namespace

void sample_loop_soup(const PlanarGraph& g, Rng& rng, const LoopVisitor& visit, const SoupOptions& opt) {
    if (!opt.removed.empty() && static_cast<int>(opt.removed.size()) != g.size())
        throw std::invalid_argument("removed mask size mismatch");
    if (opt.method == SoupMethod::peeling)
        peeling_sampler(g, rng, visit, opt);
    else
        walk_sampler(g, rng, visit, opt);
}

LoopSoup sample_loop_soup(const PlanarGraph& g, Rng& rng, const SoupOptions& opt) {
    LoopSoup soup;
    soup.delta = g.mesh();
    sample_loop_soup(
        g, rng,
        [&](std::span<const int> s, double mark) {
            soup.loops.push_back({std::vector<int>(s.begin(), s.end()), mark});
        },
        opt);
    return soup;
}

double loop_diameter(const PlanarGraph& g, std::span<const int> vertices) {
    std::vector<Point> pts;
    pts.reserve(vertices.size());
    for (int v : vertices) pts.push_back(g.position(v));
    return diameter(pts);
}

LoopSoup restrict_soup(const PlanarGraph& g, const LoopSoup& soup, double min_diameter,
                       const std::function<bool(const Point&)>& region) {
    LoopSoup out;
    out.delta = soup.delta;
    for (const auto& l : soup.loops) {
        if (min_diameter > 0 && loop_diameter(g, l.vertices) < min_diameter) continue;
        if (region) {
            bool ok = true;
            for (int v : l.vertices) ok = ok && region(g.position(v));
            if (!ok) continue;
        }
        out.loops.push_back(l);
    }
    return out;
}

int macroscopic_loop_count(const PlanarGraph& g, const LoopSoup& soup, double eps) {
    int c = 0;
    for (const auto& l : soup.loops)
        if (loop_diameter(g, l.vertices) >= eps) ++c;
    return c;
}

std::string soup_loop_json(const PlanarGraph& g, double delta, std::span<const int> vertices, double mark) {
    std::ostringstream os;
    os << "{\"delta\":" << format_double(delta) << ",\"vertices\":[";
    for (size_t i = 0; i < vertices.size(); ++i) os << (i ? "," : "") << vertices[i];
    os << "],\"poly\":[";
    for (size_t i = 0; i < vertices.size(); ++i) {
        const Point& p = g.position(vertices[i]);
        os << (i ? "," : "") << "[" << format_double(p.x()) << "," << format_double(p.y()) << "]";
    }
    os << "],\"mark\":" << format_double(mark) << "}";
    return os.str();
}

void write_soup_jsonl(std::ostream& os, const PlanarGraph& g, const LoopSoup& soup) {
    for (const auto& l : soup.loops) os << soup_loop_json(g, soup.delta, l.vertices, l.mark) << "\n";
}

}  // namespace rwls
