#pragma once

#include "rwls/graph.hpp"
#include "rwls/loops.hpp"
#include "rwls/rng.hpp"
#include "rwls/soup.hpp"

#include <iosfwd>
#include <vector>

namespace rwls {

using VertexOrdering = std::vector<int>;

// Refine the plane by cells of side 6^-j, j = 0, 1, ...; at each level every cell
// holding unchosen vertices contributes the one nearest its centre, cells in
// lexicographic order. Only interior vertices are ordered unless asked.
VertexOrdering good_ordering(const PlanarGraph& g, bool include_boundary = false);

VertexOrdering index_ordering(const PlanarGraph& g);

struct WilsonRun {
    std::vector<int> parent;                        // next vertex towards the root, -1 if none
    std::vector<std::vector<int>> branches;         // start ... attachment vertex
    std::vector<std::vector<RootedLoop>> erased;    // loops erased while drawing each branch
    std::vector<int> starts;

    int branch_count() const { return static_cast<int>(branches.size()); }
};

// max_branches < 0 runs to completion.
WilsonRun wilsons_algorithm(const PlanarGraph& g, const VertexOrdering& order, Rng& rng,
                            int max_branches = -1);

struct CoupledBranch {
    std::vector<int> branch;
    LoopSoup soup;                           // fresh soup on the residual graph
    std::vector<std::vector<int>> attached;  // closed loop at branch[j], concatenated by mark
    std::vector<int> walk;                   // attached[0] + step + attached[1] + ...
};

// Branch-by-branch: draw the branch, sample a soup on the graph with earlier
// branches removed, hand each soup loop to the first branch vertex it meets,
// root it at a uniform visit and splice the loops back into a walk. Throws
// std::logic_error if a reassembled walk does not erase to its branch.
std::vector<CoupledBranch> couple_soup_to_branches(const PlanarGraph& g, const VertexOrdering& order,
                                                   Rng& rng, int max_branches = -1,
                                                   SoupMethod method = SoupMethod::walks);

int macroscopic_loop_count(const PlanarGraph& g, const WilsonRun& run, double eps);

void write_run_json(std::ostream& os, const WilsonRun& run);

}  // namespace rwls
