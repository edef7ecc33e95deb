#include "rwls/walk.hpp"

#include <stdexcept>

namespace rwls {

WalkPath run_walk(const PlanarGraph& g, int start, Rng& rng, long long step_cap) {
    if (g.is_boundary(start)) throw std::invalid_argument("walk must start at an interior vertex");
    WalkPath p;
    int v = start;
    p.vertices.push_back(v);
    long long n = 0;
    while (!g.is_boundary(v)) {
        if (++n > step_cap) throw std::runtime_error("step cap exceeded");
        v = step(g, v, rng);
        p.vertices.push_back(v);
    }
    p.killed = true;
    return p;
}

WalkPath run_walk_until(const PlanarGraph& g, int start, const StopRule& stop, Rng& rng,
                        long long step_cap) {
    WalkPath p;
    p.vertices.push_back(start);
    if (g.is_boundary(start)) {
        p.killed = true;
        return p;
    }
    int v = start;
    for (long long n = 1;; ++n) {
        if (n > step_cap) throw std::runtime_error("step cap exceeded");
        v = step(g, v, rng);
        p.vertices.push_back(v);
        if (g.is_boundary(v)) {
            p.killed = true;
            return p;
        }
        if (stop(v, n)) return p;
    }
}

int walk_until_blocked(const PlanarGraph& g, int start, const std::vector<char>& blocked,
                       std::vector<int>& out, Rng& rng, long long step_cap) {
    int v = start;
    out.push_back(v);
    long long n = 0;
    while (!g.is_boundary(v) && !(n > 0 && blocked[v])) {
        if (++n > step_cap) throw std::runtime_error("step cap exceeded");
        v = step(g, v, rng);
        out.push_back(v);
    }
    return v;
}

std::vector<Point> walk_to_polyline(const PlanarGraph& g, const std::vector<int>& vertices) {
    std::vector<Point> pts;
    pts.reserve(vertices.size());
    for (int v : vertices) pts.push_back(g.position(v));
    return pts;
}

}  // namespace rwls
