#include "rwls/loop_erasure.hpp"

#include <stdexcept>
#include <unordered_map>

namespace rwls {

namespace {

std::vector<int> last_indices(const std::vector<int>& path, std::vector<int>& core) {
    std::unordered_map<int, int> last;
    last.reserve(path.size() * 2);
    for (int t = 0; t < static_cast<int>(path.size()); ++t) last[path[t]] = t;
    std::vector<int> T;
    int t = 0;
    const int end = static_cast<int>(path.size()) - 1;
    for (;;) {
        core.push_back(path[t]);
        int lt = last[path[t]];
        T.push_back(lt);
        if (lt == end) break;
        t = lt + 1;
    }
    return T;
}

}  // namespace

ErasureDecomposition loop_erase(const std::vector<int>& path) {
    if (path.empty()) throw std::invalid_argument("loop erasure of an empty path");
    ErasureDecomposition d;
    d.last = last_indices(path, d.core);
    int S = d.S();
    int from = 0;
    for (int k = 0; k < S; ++k) {
        d.loops.emplace_back(path.begin() + from, path.begin() + d.last[k] + 1);
        from = d.last[k] + 1;
    }
    d.final_loop.assign(path.begin() + from, path.end());
    return d;
}

std::vector<int> loop_erased_core(const std::vector<int>& path) {
    if (path.empty()) throw std::invalid_argument("loop erasure of an empty path");
    std::vector<int> core;
    last_indices(path, core);
    return core;
}

int last_visit(const std::vector<int>& path, int k) {
    std::vector<int> core;
    auto T = last_indices(path, core);
    if (k < 0 || k >= static_cast<int>(T.size())) throw std::out_of_range("core index out of range");
    return T[k];
}

std::vector<int> reconstruct(const ErasureDecomposition& d) {
    std::vector<int> out;
    for (const auto& l : d.loops) out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), d.final_loop.begin(), d.final_loop.end());
    return out;
}

}  // namespace rwls
