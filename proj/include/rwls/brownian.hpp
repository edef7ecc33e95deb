#pragma once

#include "rwls/graph.hpp"
#include "rwls/metrics.hpp"
#include "rwls/rng.hpp"
#include "rwls/stats.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rwls {

struct BrownianLoopSample {
    Point root{0, 0};
    double lifetime = 0;
    Polyline poly;  // closed, poly.front() == poly.back() == root
};

// Planar Brownian bridge from z to z over [0, t], at n equispaced times.
BrownianLoopSample sample_bridge_loop(const Point& z, double t, int n, Rng& rng);

// Insert the bridge midpoint between every pair of consecutive points.
void refine_bridge(BrownianLoopSample& loop, Rng& rng);

struct BlsOptions {
    int resolution = 64;         // starting number of points per loop
    int max_points = 1 << 14;    // adaptive refinement stops here
    double eta = 1e-3;           // budget for each truncated lifetime range
    double lifetime_cap = -1;    // keep only loops with t <= cap when positive
};

struct BrownianSoup {
    std::vector<BrownianLoopSample> loops;
    double t_min = 0, t_max = 0;
    double proposals = 0;  // Poisson mean of candidate (root, lifetime) points
};

// Lifetime below which loops of diameter >= eps in the domain carry mass <= eta.
double bls_min_lifetime(const Domain& domain, double eps, double eta);
// Lifetime above which a bridge fits in the domain with probability <= 1e-6.
double bls_max_lifetime(const Domain& domain);

// Loops of the Brownian loop soup that stay in the domain and have diameter >= eps.
BrownianSoup sample_bls_restricted(const Domain& domain, double eps, Rng& rng, const BlsOptions& opt = {});

struct LoopFunctional {
    enum class Kind { diameter_at_least, touches_disk, stays_in_disk } kind = Kind::diameter_at_least;
    double value = 0;   // diameter threshold or disk radius
    Point centre{0, 0};

    bool operator()(const Polyline& p) const;
    std::string describe() const;
};

LoopFunctional parse_functional(const std::string& text);

// Mean number of restricted-soup loops satisfying f.
MeanEstimate bls_functional(const Domain& domain, double eps, const LoopFunctional& f, long long replicas,
                            Rng& rng, const BlsOptions& opt = {});

void write_brownian_jsonl(std::ostream& os, const BrownianSoup& soup);

}  // namespace rwls
