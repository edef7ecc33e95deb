#pragma once

#include "rwls/graph.hpp"
#include "rwls/loops.hpp"
#include "rwls/rng.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rwls {

// A sampled loop: closed vertex sequence as drawn (root arbitrary) plus its time mark.
struct SoupLoop {
    std::vector<int> vertices;
    double mark = 0;

    UnrootedLoop unrooted() const { return unroot(vertices.data(), vertices.data() + vertices.size()); }
};

struct LoopSoup {
    double delta = 0;
    std::vector<SoupLoop> loops;
};

// Called once per loop with the closed vertex span and the loop's uniform mark.
using LoopVisitor = std::function<void(std::span<const int>, double)>;

enum class SoupMethod {
    peeling,  // return probabilities and h-transformed excursions from linear solves
    walks,    // one killed walk per vertex, excursions split by a uniform permutation
};

struct SoupOptions {
    SoupMethod method = SoupMethod::walks;
    std::vector<int> order;     // peeling order; empty means vertex index order
    std::vector<char> removed;  // vertices treated as killing (residual graphs)
};

void sample_loop_soup(const PlanarGraph& g, Rng& rng, const LoopVisitor& visit,
                      const SoupOptions& opt = {});
LoopSoup sample_loop_soup(const PlanarGraph& g, Rng& rng, const SoupOptions& opt = {});

// Draw from P(k) = r^k / (-k log(1-r)), k >= 1.
int sample_logarithmic(double r, Rng& rng);

double loop_diameter(const PlanarGraph& g, std::span<const int> vertices);

LoopSoup restrict_soup(const PlanarGraph& g, const LoopSoup& soup, double min_diameter,
                       const std::function<bool(const Point&)>& region = {});

int macroscopic_loop_count(const PlanarGraph& g, const LoopSoup& soup, double eps);

void write_soup_jsonl(std::ostream& os, const PlanarGraph& g, const LoopSoup& soup);
std::string soup_loop_json(const PlanarGraph& g, double delta, std::span<const int> vertices,
                           double mark);

}  // namespace rwls
