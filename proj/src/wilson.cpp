#include "rwls/wilson.hpp"

#include "rwls/loop_erasure.hpp"
#include "rwls/walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace rwls {

VertexOrdering good_ordering(const PlanarGraph& g, bool include_boundary) {
    std::vector<int> left;
    for (int v = 0; v < g.size(); ++v)
        if (include_boundary || !g.is_boundary(v)) left.push_back(v);
    VertexOrdering out;
    out.reserve(left.size());
    auto lex = [&](int a, int b) {
        const Point &p = g.position(a), &q = g.position(b);
        return std::tie(p.x(), p.y(), a) < std::tie(q.x(), q.y(), b);
    };
    double h = 1;
    while (!left.empty()) {
        if (h < 1e-12) {
            // coincident points; no cell can separate them
            std::sort(left.begin(), left.end(), lex);
            out.insert(out.end(), left.begin(), left.end());
            break;
        }
        std::map<std::pair<long long, long long>, int> pick;
        for (int v : left) {
            const Point& p = g.position(v);
            std::pair<long long, long long> c{static_cast<long long>(std::floor(p.x() / h)),
                                              static_cast<long long>(std::floor(p.y() / h))};
            Point centre((c.first + 0.5) * h, (c.second + 0.5) * h);
            auto [it, fresh] = pick.emplace(c, v);
            if (fresh) continue;
            double dv = (p - centre).squaredNorm(), dw = (g.position(it->second) - centre).squaredNorm();
            if (dv < dw || (dv == dw && lex(v, it->second))) it->second = v;
        }
        std::vector<char> taken(g.size(), 0);
        for (const auto& [cell, v] : pick) {
            out.push_back(v);
            taken[v] = 1;
        }
        std::erase_if(left, [&](int v) { return taken[v] != 0; });
        h /= 6;
    }
    return out;
}

VertexOrdering index_ordering(const PlanarGraph& g) { return g.interior_vertices(); }

WilsonRun wilsons_algorithm(const PlanarGraph& g, const VertexOrdering& order, Rng& rng, int max_branches) {
    WilsonRun run;
    run.parent.assign(g.size(), -1);
    std::vector<char> in_tree(g.size(), 0);
    std::vector<int> path;
    for (int v : order) {
        if (max_branches >= 0 && run.branch_count() >= max_branches) break;
        if (in_tree[v] || g.is_boundary(v)) continue;
        path.clear();
        walk_until_blocked(g, v, in_tree, path, rng);
        auto d = loop_erase(path);
        for (int k = 0; k < d.S(); ++k) {
            in_tree[d.core[k]] = 1;
            run.parent[d.core[k]] = d.core[k + 1];
        }
        std::vector<RootedLoop> loops;
        loops.reserve(d.loops.size());
        for (auto& l : d.loops) loops.push_back({std::move(l)});
        run.erased.push_back(std::move(loops));
        run.branches.push_back(std::move(d.core));
        run.starts.push_back(v);
    }
    return run;
}

std::vector<CoupledBranch> couple_soup_to_branches(const PlanarGraph& g, const VertexOrdering& order, Rng& rng,
                                                   int max_branches, SoupMethod method) {
    std::vector<CoupledBranch> out;
    std::vector<char> in_tree(g.size(), 0);
    std::vector<int> path, index(g.size(), -1);
    for (int v : order) {
        if (max_branches >= 0 && static_cast<int>(out.size()) >= max_branches) break;
        if (in_tree[v] || g.is_boundary(v)) continue;
        path.clear();
        walk_until_blocked(g, v, in_tree, path, rng);
        CoupledBranch cb;
        cb.branch = loop_erased_core(path);
        const int S = static_cast<int>(cb.branch.size()) - 1;
        for (int j = 0; j < S; ++j) index[cb.branch[j]] = j;

        SoupOptions opt;
        opt.method = method;
        opt.removed = in_tree;
        cb.soup = sample_loop_soup(g, rng, opt);

        // (mark, rooted loop) per branch vertex
        std::vector<std::vector<std::pair<double, std::vector<int>>>> bucket(S);
        std::vector<int> visits;
        for (const auto& l : cb.soup.loops) {
            const auto& s = l.vertices;
            const int L = static_cast<int>(s.size()) - 1;
            int j = S;
            for (int t = 0; t < L; ++t)
                if (index[s[t]] >= 0) j = std::min(j, index[s[t]]);
            if (j == S) continue;
            visits.clear();
            for (int t = 0; t < L; ++t)
                if (s[t] == cb.branch[j]) visits.push_back(t);
            int t0 = visits[bounded(rng, static_cast<std::uint32_t>(visits.size()))];
            std::vector<int> rooted;
            rooted.reserve(s.size());
            for (int t = 0; t <= L; ++t) rooted.push_back(s[(t0 + t) % L]);
            bucket[j].emplace_back(l.mark, std::move(rooted));
        }

        cb.attached.resize(S);
        for (int j = 0; j < S; ++j) {
            auto& b = bucket[j];
            std::sort(b.begin(), b.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            auto& a = cb.attached[j];
            a.push_back(cb.branch[j]);
            for (const auto& [mark, loop] : b) a.insert(a.end(), loop.begin() + 1, loop.end());
            cb.walk.insert(cb.walk.end(), a.begin(), a.end());
        }
        cb.walk.push_back(cb.branch[S]);

        if (loop_erased_core(cb.walk) != cb.branch)
            throw std::logic_error("reassembled walk does not erase to its branch");
        for (int j = 0; j < S; ++j) {
            in_tree[cb.branch[j]] = 1;
            index[cb.branch[j]] = -1;
        }
        out.push_back(std::move(cb));
    }
    return out;
}

int macroscopic_loop_count(const PlanarGraph& g, const WilsonRun& run, double eps) {
    int c = 0;
    for (const auto& branch : run.erased)
        for (const auto& l : branch)
            if (loop_diameter(g, l.vertices) >= eps) ++c;
    return c;
}

void write_run_json(std::ostream& os, const WilsonRun& run) {
    auto list = [&](const std::vector<int>& v) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    os << "{\"starts\":";
    list(run.starts);
    os << ",\"branches\":[";
    for (size_t k = 0; k < run.branches.size(); ++k) {
        os << (k ? "," : "");
        list(run.branches[k]);
    }
    os << "],\"erased\":[";
    for (size_t k = 0; k < run.erased.size(); ++k) {
        os << (k ? "," : "") << "[";
        bool first = true;
        for (const auto& l : run.erased[k]) {
            if (l.trivial()) continue;
            os << (first ? "" : ",");
            first = false;
            list(l.vertices);
        }
        os << "]";
    }
    os << "]}\n";
}

}  // namespace rwls
