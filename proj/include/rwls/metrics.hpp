#pragma once

#include "rwls/graph.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace rwls {

using Polyline = std::vector<Point>;

double diameter(const Polyline& p);

// Drop zero-length edges. A closed polyline keeps first == last.
Polyline canonical_polyline(const Polyline& p);

// Largest distance from a vertex of one polyline to the other polyline. This is
// a lower bound for the Hausdorff distance and hence for the Frechet distance.
double vertex_hausdorff(const Polyline& p, const Polyline& q);

double point_polyline_distance(const Point& x, const Polyline& q);

// Is the continuous Frechet distance <= eps?
bool frechet_decision(const Polyline& p, const Polyline& q, double eps);
// Continuous Frechet distance, bisection on the decision procedure to 1e-12 relative.
double frechet_distance(const Polyline& p, const Polyline& q);
// Discrete Frechet distance over the vertex sequences; an upper bound for the continuous one.
double discrete_frechet(const Polyline& p, const Polyline& q);

struct LoopDistance {
    double distance = 0;  // min over the enumerated start points, both directions
    double gap = 0;       // the true rotation infimum lies in [distance - gap, distance]
};

// Distance between closed curves modulo the choice of start point. Start points
// range over the vertices and `subdivisions` equally spaced points per edge; the
// search is run rerooting b and then rerooting a, so the result is symmetric.
LoopDistance unrooted_loop_distance(const Polyline& a, const Polyline& b, int subdivisions = 8);

// Douglas-Peucker simplification; the Frechet distance to the input is <= tol.
Polyline simplify(const Polyline& p, double tol);

struct MatchingCertificate {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> unmatched_a, unmatched_b;
    double value = 0;
};

// Least tau such that some partial injection pairs loops at distance <= tau and
// leaves unmatched only loops with half-diameter <= tau.
MatchingCertificate matching_distance(const std::vector<std::vector<double>>& dist,
                                      const std::vector<double>& half_a,
                                      const std::vector<double>& half_b);

MatchingCertificate loop_soup_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b,
                                       int subdivisions = 8);

// Replace a symmetric distance matrix by its shortest-path closure.
void metric_closure(std::vector<std::vector<double>>& d);

}  // namespace rwls
