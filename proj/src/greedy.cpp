#include "rwls/greedy.hpp"

#include "rwls/loop_erasure.hpp"
#include "rwls/metrics.hpp"
#include "rwls/soup.hpp"
#include "rwls/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace rwls {

double default_radius(double eps, int j0, double diam) {
    if (!(eps > 0 && eps < diam)) throw std::invalid_argument("eps must lie in (0, domain diameter)");
    if (j0 < 1) throw std::invalid_argument("j0 must be at least 1");
    double r = std::exp(-2.0 / eps * j0 * (std::log(diam) - std::log(eps)) + std::log(diam));
    if (r >= eps) throw std::logic_error("radius formula exceeded eps");
    return std::max(r, std::numeric_limits<double>::min());
}

std::vector<int> GreedyBranch::core_at(int n) const {
    if (n < 0 || n > N) throw std::out_of_range("iteration index");
    std::vector<int> y{walk.front()};
    for (int k = 1; k <= n; ++k) {
        y.resize(splice[k]);
        y.insert(y.end(), arcs[k].begin(), arcs[k].end());
    }
    return y;
}

std::vector<int> GreedyBranch::excursion(int n) const {
    if (n < 1 || n > N) throw std::out_of_range("iteration index");
    if (n == 1) return {walk.front()};
    return {walk.begin() + tau[n - 1], walk.begin() + theta[n]};
}

GreedyBranch build_transcript(const std::vector<int>& walk, const std::vector<int>& tau, bool error) {
    if (walk.empty() || tau.empty() || tau[0] != 0) throw std::invalid_argument("transcript needs tau[0] = 0");
    if (tau.back() != static_cast<int>(walk.size()) - 1) throw std::invalid_argument("walk must end at the last tau");
    for (size_t n = 1; n < tau.size(); ++n)
        if (tau[n] <= tau[n - 1]) throw std::invalid_argument("tau must increase");

    GreedyBranch b;
    b.start = walk.front();
    b.walk = walk;
    b.tau = tau;
    b.N = static_cast<int>(tau.size()) - 1;
    b.error = error;
    b.theta.assign(b.N + 1, 0);
    b.splice.assign(b.N + 1, 0);
    b.arcs.assign(b.N + 1, {});
    b.arcs[0] = {walk.front()};

    int maxv = *std::max_element(walk.begin(), walk.end());
    std::vector<int> pos(maxv + 1, -1);
    std::vector<int>& y = b.core;
    y = {walk.front()};
    pos[walk.front()] = 0;
    std::vector<int> piece;
    for (int n = 1; n <= b.N; ++n) {
        const int a = tau[n - 1], e = tau[n];
        int s = std::numeric_limits<int>::max();
        for (int t = a; t <= e; ++t)
            if (pos[walk[t]] >= 0) s = std::min(s, pos[walk[t]]);
        int th = a;
        for (int t = e; t >= a; --t)
            if (walk[t] == y[s]) {
                th = t;
                break;
            }
        piece.assign(walk.begin() + th, walk.begin() + e + 1);
        auto arc = loop_erased_core(piece);
        for (size_t i = s; i < y.size(); ++i) pos[y[i]] = -1;
        y.resize(s);
        for (int v : arc) {
            pos[v] = static_cast<int>(y.size());
            y.push_back(v);
        }
        b.theta[n] = th;
        b.splice[n] = s;
        b.arcs[n] = std::move(arc);
    }

    b.prefix.assign(b.N + 1, 1);
    for (int n = 1; n <= b.N; ++n) {
        const int s = b.splice[n];
        if (b.prefix[n - 1] >= s + 1) {
            const auto& arc = b.arcs[n];
            int k = 0;
            while (k < static_cast<int>(arc.size()) && s + k < static_cast<int>(y.size()) && arc[k] == y[s + k]) ++k;
            b.prefix[n] = s + k;
        } else {
            b.prefix[n] = b.prefix[n - 1];
        }
    }
    return b;
}

GreedyBranch greedy_branch(const PlanarGraph& g, int start, const std::vector<char>& attached, double eps,
                           double r, Rng& rng, const GreedyOptions& opt) {
    if (!(r > 0 && r < eps)) throw std::invalid_argument("radius must lie in (0, eps)");
    if (opt.check_mesh && !(g.mesh() < r / 100)) throw std::invalid_argument("mesh must be below radius / 100");
    if (!attached.empty() && static_cast<int>(attached.size()) != g.size())
        throw std::invalid_argument("attachment mask size mismatch");
    auto absorbed = [&](int v) { return g.is_boundary(v) || (!attached.empty() && attached[v]); };
    if (start < 0 || start >= g.size() || absorbed(start)) throw std::invalid_argument("start must be a free interior vertex");

    std::vector<int> walk{start}, tau{0};
    const Point origin = g.position(start);
    Point centre = origin;
    double radius = eps;
    bool error = false;
    long long steps = 0;
    int v = start;
    for (;;) {
        do {
            if (++steps > opt.step_cap) throw std::runtime_error("step cap exceeded");
            v = step(g, v, rng);
            walk.push_back(v);
        } while (!absorbed(v) && (g.position(v) - centre).norm() < radius);
        tau.push_back(static_cast<int>(walk.size()) - 1);
        if (absorbed(v)) break;
        if ((g.position(v) - origin).norm() <= r) {
            error = true;
            break;
        }
        centre = g.position(v);
        radius = r;
    }
    return build_transcript(walk, tau, error);
}

std::vector<RevisitEntry> revisit_set(const GreedyBranch& b) {
    std::vector<RevisitEntry> out;
    if (b.error) return out;
    std::vector<int> xs;
    for (int n = 2; n <= b.N; ++n)
        if (b.prefix[n] >= b.splice[n] + 1) xs.push_back(b.splice[n]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    int low = 0;
    for (int xi : xs) {
        RevisitEntry e;
        e.xi = xi;
        int plus = -1, minus = -1;
        for (int n = std::max(low, 2); n <= b.N; ++n)
            if (b.splice[n] == xi) plus = n;
        for (int n = low; n <= b.N; ++n)
            if (b.prefix[n] >= xi + 1) {
                minus = n;
                break;
            }
        if (minus < 0) throw std::logic_error("revisit index never settles");
        e.n_minus = minus;
        if (plus < 0) {
            e.trivial = true;
            e.n_plus = minus;
        } else {
            e.n_plus = plus;
        }
        low = e.n_plus;
        out.push_back(e);
    }
    return out;
}

GreedyLoopSet greedy_erased_loops(const GreedyBranch& b) {
    GreedyLoopSet out;
    const int S = static_cast<int>(b.core.size()) - 1;
    for (int s = 0; s < S; ++s) out.loops.push_back({b.core[s]});
    if (b.error) return out;
    out.revisits = revisit_set(b);

    std::multimap<int, const RevisitEntry*> by_minus;
    for (const auto& e : out.revisits)
        if (!e.trivial && e.xi < S) by_minus.emplace(e.n_minus, &e);
    std::vector<int> y{b.walk.front()};
    for (int n = 0; n <= b.N && !by_minus.empty(); ++n) {
        if (n > 0) {
            y.resize(b.splice[n]);
            y.insert(y.end(), b.arcs[n].begin(), b.arcs[n].end());
        }
        auto [lo, hi] = by_minus.equal_range(n);
        for (auto it = lo; it != hi; ++it) {
            const RevisitEntry& e = *it->second;
            std::vector<int> l(y.begin() + e.xi, y.end());
            for (int k = n + 1; k <= e.n_plus; ++k) {
                if (k > 1) l.insert(l.end(), b.walk.begin() + b.tau[k - 1] + 1, b.walk.begin() + b.theta[k] + 1);
                if (k < e.n_plus) l.insert(l.end(), b.arcs[k].begin() + 1, b.arcs[k].end());
            }
            if (l.back() != b.core[e.xi]) throw std::logic_error("greedy loop is not closed");
            out.loops[e.xi] = std::move(l);
        }
        by_minus.erase(lo, hi);
    }
    return out;
}

GreedyRun greedy_algorithm(const PlanarGraph& g, const std::vector<int>& order, double eps, double r, int m,
                           Rng& rng, const GreedyOptions& opt) {
    GreedyRun run;
    std::vector<char> attached(g.size(), 0);
    for (int v : order) {
        if (static_cast<int>(run.branches.size()) >= m) break;
        if (g.is_boundary(v) || attached[v]) continue;
        GreedyBranch b = greedy_branch(g, v, attached, eps, r, rng, opt);
        auto loops = greedy_erased_loops(b);
        for (auto& l : loops.loops) run.loops.push_back(std::move(l));
        for (int u : b.core) attached[u] = 1;
        bool err = b.error;
        run.branches.push_back(std::move(b));
        if (err) {
            run.kappa = static_cast<int>(run.branches.size());
            break;
        }
    }
    return run;
}

namespace {

Polyline to_polyline(const PlanarGraph& g, const std::vector<int>& vs) {
    Polyline p;
    p.reserve(vs.size());
    for (int v : vs) p.push_back(g.position(v));
    return p;
}

// Refine bounds on the unrooted distance until the threshold is decided.
void loop_distance_bounds(const PlanarGraph& g, const std::vector<int>& a, const std::vector<int>& b,
                          double threshold, double& upper, double& lower) {
    if (a == b) {
        upper = lower = 0;
        return;
    }
    Polyline p = to_polyline(g, a), q = to_polyline(g, b);
    lower = vertex_hausdorff(p, q);
    // both loops are rooted at the same vertex, so the aligned distance bounds the rotation minimum
    upper = discrete_frechet(p, q);
    if (upper <= threshold || lower > threshold) return;
    const double cells = static_cast<double>(p.size()) * static_cast<double>(q.size());
    if (cells <= 4e6) upper = std::min(upper, frechet_distance(p, q));
    if (upper <= threshold) return;
    if (cells <= 2.5e5) {
        auto d = unrooted_loop_distance(p, q);
        upper = std::min(upper, d.distance);
        lower = std::max(lower, d.distance - d.gap);
    }
}

}  // namespace

CouplingReport coupling_report(const PlanarGraph& g, const GreedyBranch& b, double eps, double threshold) {
    if (b.error) throw std::invalid_argument("coupling report needs a branch without ERROR");
    auto dec = loop_erase(b.walk);
    if (dec.core != b.core) throw std::logic_error("greedy core differs from the loop erasure of the walk");
    const int S = dec.S();
    auto greedy = greedy_erased_loops(b);
    CouplingReport rep;
    rep.distance.assign(S, 0);
    rep.lower.assign(S, 0);
    for (int s = 0; s < S; ++s) {
        loop_distance_bounds(g, dec.loops[s], greedy.loops[s], threshold, rep.distance[s], rep.lower[s]);
        rep.max_distance = std::max(rep.max_distance, rep.distance[s]);
    }

    const auto& tau = b.tau;
    const auto& lv = dec.last;
    auto T = [&](int n) { return n <= 0 ? 0 : tau[n]; };
    auto check = [&](bool ok) {
        ++rep.sandwich_checks;
        if (!ok) ++rep.sandwich_violations;
    };
    std::vector<const RevisitEntry*> at(S + 1, nullptr);
    for (const auto& e : greedy.revisits) at[e.xi] = &e;
    auto first_holding = [&](int s, int lo, int hi) {
        for (int n = std::max(lo, 0); n <= hi; ++n)
            if (b.prefix[n] >= s + 1) return n;
        return -1;
    };
    int k_plus = 1;  // n_plus of the last revisit at or below s
    size_t next = 0;
    for (int s = 0; s < S; ++s) {
        while (next < greedy.revisits.size() && greedy.revisits[next].xi < s) k_plus = greedy.revisits[next++].n_plus;
        if (at[s]) {
            const auto& e = *at[s];
            check(T(e.n_plus - 1) <= lv[s] && lv[s] <= T(e.n_plus));
            if (s > 0) check(T(e.n_minus - 1) <= lv[s - 1] && lv[s - 1] <= T(e.n_minus));
            continue;
        }
        int upper = next < greedy.revisits.size() ? greedy.revisits[next].n_minus : b.N;
        int ns = first_holding(s, std::max(k_plus, 1), upper);
        if (ns < 0) {
            check(false);
            continue;
        }
        if (s == 0) check(lv[0] <= T(ns));
        else check(T(ns - 1) <= lv[s - 1] && lv[s - 1] <= lv[s] && lv[s] <= T(ns));
    }

    for (int s = 0; s < S; ++s) {
        if (loop_diameter(g, dec.loops[s]) < 2 * eps) continue;
        ++rep.large_loops;
        if (!at[s]) ++rep.trigger_violations;
    }
    return rep;
}

TailConstants tail_constants(double r, double diam) {
    double x = 2 * diam / r * std::log(6.0);
    double p = std::exp(-x);
    double keep = -std::expm1(-x);  // 1 - 6^(-2 diam / r)
    TailConstants c;
    c.beta = 1 / keep;
    c.alpha = -r / (2 * diam) * std::log1p(-p);
    return c;
}

TailReport iteration_tail(const PlanarGraph& g, int start, double eps, double r, double diam, long long replicas,
                          Rng& rng, const std::vector<int>& k_grid, const GreedyOptions& opt) {
    if (replicas < 1) throw std::invalid_argument("replicas must be positive");
    TailReport rep;
    rep.constants = tail_constants(r, diam);
    rep.replicas = replicas;
    std::vector<int> ns;
    ns.reserve(replicas);
    for (long long i = 0; i < replicas; ++i) {
        ns.push_back(greedy_branch(g, start, {}, eps, r, rng, opt).N);
        rep.max_n = std::max(rep.max_n, ns.back());
    }
    std::vector<int> grid = k_grid;
    if (grid.empty())
        for (int K = 1; K <= rep.max_n + 1; ++K) grid.push_back(K);
    for (int K : grid) {
        TailRow row;
        row.K = K;
        row.count = std::count_if(ns.begin(), ns.end(), [&](int n) { return n >= K; });
        row.estimate = static_cast<double>(row.count) / replicas;
        row.ci = wilson_interval(row.count, replicas);
        row.bound = rep.constants.beta * std::exp(-rep.constants.alpha * K);
        row.statement_range = K > 2 * diam / eps;
        row.graded = K > 2 * diam / r;
        row.pass = !row.graded || row.ci.hi <= row.bound;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

ReturnableReport detect_returnable(const PlanarGraph& g, const GreedyBranch& b, double eps) {
    ReturnableReport rep;
    const int T = static_cast<int>(b.walk.size()) - 1;
    std::map<int, std::pair<int, int>> span;  // vertex -> first and last splice time
    for (int n = 1; n + 1 <= b.N; ++n) {
        const int th = b.theta[n + 1];
        const int v = b.walk[th];
        const Point& c = g.position(v);
        int t = b.tau[n + 1] + 1;
        while (t <= T && (g.position(b.walk[t]) - c).norm() < eps) ++t;
        bool back = false;
        for (++t; t <= T && !back; ++t) back = b.walk[t] == v && !g.is_boundary(v);
        if (back) rep.returnable.push_back(n);
        auto [it, fresh] = span.emplace(v, std::make_pair(th, th));
        if (!fresh) it->second.second = th;
    }
    for (const auto& [v, tt] : span) {
        if (tt.first == tt.second) continue;
        Polyline piece;
        for (int t = tt.first; t <= tt.second; ++t) piece.push_back(g.position(b.walk[t]));
        if (diameter(piece) >= 4 * eps) rep.doubled.push_back(v);
    }
    return rep;
}

double error_probability_bound(double eps, double r, double diam) {
    return (2 * std::log(diam) - 2 * std::log(eps)) / (std::log(diam) - std::log(r));
}

void write_branch_json(std::ostream& os, const GreedyBranch& b) {
    auto list = [&](const std::vector<int>& v) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    os << "{\"start\":" << b.start << ",\"error\":" << (b.error ? "true" : "false") << ",\"N\":" << b.N << ",\"tau\":";
    list(b.tau);
    os << ",\"theta\":";
    list(b.theta);
    os << ",\"splice\":";
    list(b.splice);
    os << ",\"core\":";
    list(b.core);
    os << ",\"walk\":";
    list(b.walk);
    os << "}\n";
}

}  // namespace rwls
