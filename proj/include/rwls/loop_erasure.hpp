#pragma once

#include <vector>

namespace rwls {

// Chronological loop erasure of X[0..T].
//   core[k]  = Y(k), k = 0..S
//   last[k]  = last index t with X(t) = Y(k)  (last[S] = T)
//   loops[k] = X[last[k-1]+1 .. last[k]], a loop at Y(k), for k < S
// The piece X[last[S-1]+1 .. T] sits in final_loop; it is the single vertex Y(S)
// whenever the endpoint is visited once, as for killed walks.
struct ErasureDecomposition {
    std::vector<int> core;
    std::vector<int> last;
    std::vector<std::vector<int>> loops;
    std::vector<int> final_loop;

    int S() const { return static_cast<int>(core.size()) - 1; }
};

ErasureDecomposition loop_erase(const std::vector<int>& path);

// Core only; faster, no loop storage.
std::vector<int> loop_erased_core(const std::vector<int>& path);

int last_visit(const std::vector<int>& path, int k);

// Reassemble the path from a decomposition.
std::vector<int> reconstruct(const ErasureDecomposition& d);

}  // namespace rwls
