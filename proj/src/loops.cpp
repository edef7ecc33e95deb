#include "rwls/loops.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace rwls {

RootedLoop UnrootedLoop::rooted() const {
    RootedLoop r{canonical};
    if (!canonical.empty()) r.vertices.push_back(canonical.front());
    return r;
}

bool UnrootedLoop::operator<(const UnrootedLoop& o) const {
    if (canonical.size() != o.canonical.size()) return canonical.size() < o.canonical.size();
    return canonical < o.canonical;
}

int least_rotation(const std::vector<int>& s) {
    // Booth's failure-function scan over the doubled sequence
    const int n = static_cast<int>(s.size());
    if (n == 0) return 0;
    std::vector<int> f(2 * n, -1);
    int k = 0;
    for (int j = 1; j < 2 * n; ++j) {
        int sj = s[j % n];
        int i = f[j - k - 1];
        while (i != -1 && sj != s[(k + i + 1) % n]) {
            if (sj < s[(k + i + 1) % n]) k = j - i - 1;
            i = f[i];
        }
        if (sj != s[(k + i + 1) % n]) {
            if (sj < s[k % n]) k = j;
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    return k % n;
}

int smallest_period(const std::vector<int>& s) {
    const int n = static_cast<int>(s.size());
    if (n == 0) return 0;
    std::vector<int> pi(n, 0);
    for (int i = 1; i < n; ++i) {
        int k = pi[i - 1];
        while (k > 0 && s[i] != s[k]) k = pi[k - 1];
        if (s[i] == s[k]) ++k;
        pi[i] = k;
    }
    int p = n - pi[n - 1];
    return n % p == 0 ? p : n;
}

UnrootedLoop unroot(const int* first, const int* last) {
    if (last - first < 1 || *(last - 1) != *first) throw std::invalid_argument("loop is not closed");
    std::vector<int> s(first, last - 1);
    UnrootedLoop u;
    if (s.empty()) return u;
    int k = least_rotation(s);
    std::rotate(s.begin(), s.begin() + k, s.end());
    u.period = smallest_period(s);
    u.canonical = std::move(s);
    return u;
}

UnrootedLoop unroot(const RootedLoop& l) {
    return unroot(l.vertices.data(), l.vertices.data() + l.vertices.size());
}

double step_product(const PlanarGraph& g, const std::vector<int>& closed) {
    double p = 1;
    for (size_t i = 0; i + 1 < closed.size(); ++i) {
        int u = closed[i], v = closed[i + 1];
        if (u < 0 || u >= g.size() || v < 0 || v >= g.size()) throw std::invalid_argument("vertex out of range");
        if (g.is_boundary(u)) throw std::invalid_argument("loop visits a boundary vertex");
        p *= transition_probability(g, u, v);
    }
    return p;
}

namespace {

void require_edges(const PlanarGraph& g, const std::vector<int>& closed) {
    for (size_t i = 0; i + 1 < closed.size(); ++i)
        if (g.find_edge(closed[i], closed[i + 1]) < 0) throw std::invalid_argument("loop uses a non-edge");
}

}  // namespace

double rooted_loop_mass(const PlanarGraph& g, const RootedLoop& l) {
    if (l.vertices.empty() || l.vertices.front() != l.vertices.back())
        throw std::invalid_argument("loop is not closed");
    if (l.trivial()) throw std::invalid_argument("trivial loop carries no mass");
    double p = step_product(g, l.vertices);
    require_edges(g, l.vertices);
    return p / l.length();
}

double unrooted_loop_mass(const PlanarGraph& g, const UnrootedLoop& l) {
    if (l.length() == 0) throw std::invalid_argument("trivial loop carries no mass");
    // distinct rotations = period, each with the rooted mass
    const auto closed = l.rooted().vertices;
    double p = step_product(g, closed);
    require_edges(g, closed);
    return p * l.period / l.length();
}

std::vector<LoopClassMass> enumerate_loops(const PlanarGraph& g, int max_length) {
    if (max_length > 24) throw std::invalid_argument("enumeration guard: max_length must be <= 24");
    if (g.interior_count() > 12) throw std::invalid_argument("enumeration guard: at most 12 interior vertices");
    std::vector<LoopClassMass> out;
    std::vector<int> seq;
    std::set<std::vector<int>> seen;
    std::function<void(int, int, double)> dfs = [&](int s, int v, double prob) {
        for (int k = 0; k < g.degree(v); ++k) {
            int w = g.neighbor(v, k);
            if (g.is_boundary(w) || w < s) continue;
            double p = prob * g.probability(v, k);
            if (w == s) {
                if (least_rotation(seq) == 0) {
                    UnrootedLoop u;
                    u.canonical = seq;
                    u.period = smallest_period(seq);
                    // parallel edges reach the same class twice; merge them
                    if (seen.insert(seq).second) out.push_back({u, unrooted_loop_mass(g, u)});
                }
            }
            if (static_cast<int>(seq.size()) < max_length) {
                seq.push_back(w);
                dfs(s, w, p);
                seq.pop_back();
            }
        }
    };
    for (int s = 0; s < g.size(); ++s) {
        if (g.is_boundary(s)) continue;
        seq.assign(1, s);
        dfs(s, s, 1.0);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.loop < b.loop; });
    return out;
}

namespace {

bool reaches_boundary(const PlanarGraph& g, const std::vector<char>& removed) {
    // reverse search from killing states
    std::vector<std::vector<int>> rev(g.size());
    for (int v = 0; v < g.size(); ++v)
        for (int k = 0; k < g.degree(v); ++k) rev[g.neighbor(v, k)].push_back(v);
    std::vector<char> seen(g.size(), 0);
    std::vector<int> stack;
    for (int v = 0; v < g.size(); ++v)
        if (g.is_boundary(v) || removed[v]) {
            seen[v] = 1;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : rev[v])
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

double total_loop_mass(const PlanarGraph& g, const std::vector<char>& removed) {
    std::vector<int> idx(g.size(), -1);
    int n = 0;
    for (int v = 0; v < g.size(); ++v)
        if (!g.is_boundary(v) && !removed[v]) idx[v] = n++;
    if (n == 0) return 0;
    if (!reaches_boundary(g, removed)) throw std::runtime_error("no killing");
    double logdet = 0;
    if (n <= 1500) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
        for (int v = 0; v < g.size(); ++v) {
            if (idx[v] < 0) continue;
            for (int k = 0; k < g.degree(v); ++k) {
                int w = g.neighbor(v, k);
                if (idx[w] >= 0) A(idx[v], idx[w]) -= g.probability(v, k);
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        const auto& U = lu.matrixLU();
        for (int i = 0; i < n; ++i) {
            double d = U(i, i);
            if (std::abs(d) < 1e-300) throw std::runtime_error("no killing");
            logdet += std::log(std::abs(d));
        }
        if (lu.determinant() <= 0) throw std::runtime_error("no killing");
    } else {
        std::vector<Eigen::Triplet<double>> trip;
        for (int v = 0; v < g.size(); ++v) {
            if (idx[v] < 0) continue;
            trip.emplace_back(idx[v], idx[v], 1.0);
            for (int k = 0; k < g.degree(v); ++k) {
                int w = g.neighbor(v, k);
                if (idx[w] >= 0) trip.emplace_back(idx[v], idx[w], -g.probability(v, k));
            }
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw std::runtime_error("no killing");
        logdet = lu.logAbsDeterminant();
        if (lu.signDeterminant() <= 0) throw std::runtime_error("no killing");
    }
    return -logdet;
}

double total_loop_mass(const PlanarGraph& g) { return total_loop_mass(g, std::vector<char>(g.size(), 0)); }

double interior_spectral_radius(const PlanarGraph& g, int iterations) {
    // Q is substochastic and nonnegative; the growth rate of Q^n 1 gives rho(Q)
    std::vector<double> x(g.size(), 0), y(g.size(), 0);
    for (int v = 0; v < g.size(); ++v) x[v] = g.is_boundary(v) ? 0 : 1;
    double rho = 0;
    for (int it = 0; it < iterations; ++it) {
        double norm = 0;
        for (int v = 0; v < g.size(); ++v) {
            if (g.is_boundary(v)) continue;
            double s = 0;
            for (int k = 0; k < g.degree(v); ++k) s += g.probability(v, k) * x[g.neighbor(v, k)];
            y[v] = s;
            norm = std::max(norm, s);
        }
        if (norm == 0) return 0;
        for (double& t : y) t /= norm;
        std::swap(x, y);
        rho = norm;
    }
    return rho;
}

}  // namespace rwls
