#pragma once

#include "rwls/graph.hpp"
#include "rwls/rng.hpp"

#include <functional>
#include <vector>

namespace rwls {

inline constexpr long long default_step_cap = 100'000'000;

struct WalkPath {
    std::vector<int> vertices;
    bool killed = false;

    int length() const { return static_cast<int>(vertices.size()) - 1; }
};

// One transition from interior vertex v.
inline int step(const PlanarGraph& g, int v, Rng& rng) {
    int d = g.degree(v);
    if (g.uniform_row(v)) return g.neighbor(v, static_cast<int>(bounded(rng, static_cast<std::uint32_t>(d))));
    double u = uniform01(rng);
    int k = 0;
    while (k + 1 < d && g.cumulative(v, k) < u) ++k;
    return g.neighbor(v, k);
}

WalkPath run_walk(const PlanarGraph& g, int start, Rng& rng, long long step_cap = default_step_cap);

// Stops at the first step (after step 0) where stop(vertex, step) holds, or at the boundary.
using StopRule = std::function<bool(int, long long)>;
WalkPath run_walk_until(const PlanarGraph& g, int start, const StopRule& stop, Rng& rng,
                        long long step_cap = default_step_cap);

// Walk killed on the boundary or on any vertex with blocked[v] != 0, appended to out.
// Returns the final vertex.
int walk_until_blocked(const PlanarGraph& g, int start, const std::vector<char>& blocked,
                       std::vector<int>& out, Rng& rng, long long step_cap = default_step_cap);

std::vector<Point> walk_to_polyline(const PlanarGraph& g, const std::vector<int>& vertices);

}  // namespace rwls
