#pragma once

#include "rwls/graph.hpp"

#include <vector>

namespace rwls {

// Closed vertex path (v0, ..., vp) with v0 == vp.
struct RootedLoop {
    std::vector<int> vertices;

    int length() const { return static_cast<int>(vertices.size()) - 1; }
    bool trivial() const { return length() <= 0; }
};

// Rotation class of a rooted loop, stored as its lexicographically least rotation
// (without the repeated endpoint). `period` is the smallest rotation that fixes it.
struct UnrootedLoop {
    std::vector<int> canonical;
    int period = 0;

    int length() const { return static_cast<int>(canonical.size()); }
    RootedLoop rooted() const;
    bool operator==(const UnrootedLoop& o) const { return canonical == o.canonical; }
    bool operator<(const UnrootedLoop& o) const;
};

// Index of the least rotation of a cyclic sequence (smallest index on ties).
int least_rotation(const std::vector<int>& s);
int smallest_period(const std::vector<int>& s);

UnrootedLoop unroot(const RootedLoop& l);
UnrootedLoop unroot(const int* first, const int* last);  // closed span, last[-1] == first[0]

double step_product(const PlanarGraph& g, const std::vector<int>& closed);
double rooted_loop_mass(const PlanarGraph& g, const RootedLoop& l);
double unrooted_loop_mass(const PlanarGraph& g, const UnrootedLoop& l);

struct LoopClassMass {
    UnrootedLoop loop;
    double mass;
};

// Every loop class of length <= max_length with its mass, ordered by (length, sequence).
std::vector<LoopClassMass> enumerate_loops(const PlanarGraph& g, int max_length);

// -log det(I - Q) over interior vertices, optionally with some vertices removed.
double total_loop_mass(const PlanarGraph& g);
double total_loop_mass(const PlanarGraph& g, const std::vector<char>& removed);

// Spectral radius of the interior transition matrix (power iteration).
double interior_spectral_radius(const PlanarGraph& g, int iterations = 2000);

}  // namespace rwls
