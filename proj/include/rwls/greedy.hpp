#pragma once

#include "rwls/graph.hpp"
#include "rwls/rng.hpp"
#include "rwls/stats.hpp"

#include <iosfwd>
#include <vector>

namespace rwls {

// r = diam * (eps / diam)^(2 j0 / eps), clamped into (0, eps).
double default_radius(double eps, int j0, double domain_diameter);

// Transcript of one greedy branch. Index n runs over iterations 0..N, with
// iteration 0 the trivial core at the start vertex.
//   tau[n]    end of segment n in the walk (tau[0] = 0)
//   theta[n]  last visit of the splice vertex inside [tau[n-1], tau[n]]
//   splice[n] core index s_n where segment n attaches to core n-1 (splice[1] = 0)
//   arcs[n]   loop erasure of walk[theta[n] .. tau[n]]
//   prefix[n] length of the common prefix of core n and the final core
// Core n is core(n-1)[0, splice[n]) followed by arcs[n].
struct GreedyBranch {
    int start = -1;
    std::vector<int> walk;
    std::vector<int> tau, theta, splice;
    std::vector<std::vector<int>> arcs;
    std::vector<int> prefix;
    std::vector<int> core;  // final core; partial when error is set
    int N = 0;
    bool error = false;

    std::vector<int> core_at(int n) const;
    // walk portion X_n = walk[tau[n-1], theta[n])
    std::vector<int> excursion(int n) const;
};

// Derive splices, arcs and prefixes from a walk and its segment end times.
GreedyBranch build_transcript(const std::vector<int>& walk, const std::vector<int>& tau, bool error);

struct GreedyOptions {
    bool check_mesh = true;  // require mesh < r / 100
    long long step_cap = 100'000'000;
};

// One branch from start, absorbed on the boundary or on attached[v] != 0.
GreedyBranch greedy_branch(const PlanarGraph& g, int start, const std::vector<char>& attached, double eps,
                           double r, Rng& rng, const GreedyOptions& opt = {});

struct RevisitEntry {
    int xi = 0;
    int n_plus = 0, n_minus = 0;
    bool trivial = false;  // no splice at xi after the previous revisit
};

// Revisit indices in increasing order. Empty for an ERROR branch.
std::vector<RevisitEntry> revisit_set(const GreedyBranch& b);

struct GreedyLoopSet {
    std::vector<std::vector<int>> loops;  // closed loop at core index s, s = 0..S-1
    std::vector<RevisitEntry> revisits;
};

GreedyLoopSet greedy_erased_loops(const GreedyBranch& b);

struct GreedyRun {
    std::vector<GreedyBranch> branches;
    int kappa = -1;  // 1-based index of the first ERROR branch, -1 if none
    std::vector<std::vector<int>> loops;
};

// Runs at most m branches along the ordering; stops at the first ERROR.
GreedyRun greedy_algorithm(const PlanarGraph& g, const std::vector<int>& order, double eps, double r, int m,
                           Rng& rng, const GreedyOptions& opt = {});

struct CouplingReport {
    std::vector<double> distance;  // certified upper bound on d(l_s, greedy l_s)
    std::vector<double> lower;     // lower bound on the same distance
    double max_distance = 0;
    int sandwich_checks = 0;
    int sandwich_violations = 0;
    int trigger_violations = 0;
    int large_loops = 0;  // erased loops with diameter >= 2 eps
};

// Compares the loops erased from the full walk with the greedy loops. The
// distance is refined until it is certified on one side of `threshold`.
CouplingReport coupling_report(const PlanarGraph& g, const GreedyBranch& b, double eps, double threshold);

struct TailConstants {
    double beta = 1, alpha = 0;
};
TailConstants tail_constants(double r, double domain_diameter);

struct TailRow {
    int K = 0;
    long long count = 0;  // replicas with N >= K
    double estimate = 0;
    Interval ci;
    double bound = 0;
    bool statement_range = false;  // K > 2 diam / eps
    bool graded = false;           // K > 2 diam / r
    bool pass = true;
};

struct TailReport {
    TailConstants constants;
    long long replicas = 0;
    int max_n = 0;
    std::vector<TailRow> rows;
    bool pass = true;
};

TailReport iteration_tail(const PlanarGraph& g, int start, double eps, double r, double domain_diameter,
                          long long replicas, Rng& rng, const std::vector<int>& k_grid,
                          const GreedyOptions& opt = {});

struct ReturnableReport {
    std::vector<int> returnable;  // iterations n whose splice vertex is eps-returnable
    std::vector<int> doubled;     // core vertices spliced twice around a >= 4 eps walk piece
};

ReturnableReport detect_returnable(const PlanarGraph& g, const GreedyBranch& b, double eps);

// (2 log diam - 2 log eps) / (log diam - log r)
double error_probability_bound(double eps, double r, double domain_diameter);

void write_branch_json(std::ostream& os, const GreedyBranch& b);

}  // namespace rwls
