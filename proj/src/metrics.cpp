#include "rwls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rwls {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Span {
    double lo = 1, hi = 0;
    bool empty() const { return lo > hi; }
};

// Parameters t in [0,1] with |a + t(b-a) - c| <= eps.
Span free_span(const Point& a, const Point& b, const Point& c, double eps) {
    Point d = b - a, f = a - c;
    double A = d.squaredNorm();
    double C = f.squaredNorm() - eps * eps;
    if (A == 0) return C <= 0 ? Span{0, 1} : Span{};
    double B = 2 * f.dot(d);
    double disc = B * B - 4 * A * C;
    if (disc < 0) return {};
    double s = std::sqrt(disc);
    double t1 = (-B - s) / (2 * A), t2 = (-B + s) / (2 * A);
    Span r{std::max(0.0, t1), std::min(1.0, t2)};
    return r;
}

double seg_distance(const Point& x, const Point& a, const Point& b) {
    Point d = b - a;
    double l2 = d.squaredNorm();
    double t = l2 > 0 ? std::clamp((x - a).dot(d) / l2, 0.0, 1.0) : 0.0;
    return (a + t * d - x).norm();
}

std::vector<Point> hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cr = [](const Point& o, const Point& a, const Point& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Point> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cr(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cr(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

double diameter(const Polyline& p) {
    if (p.size() < 2) return 0;
    auto h = p.size() > 16 ? hull(p) : p;
    double d = 0;
    for (size_t i = 0; i < h.size(); ++i)
        for (size_t j = i + 1; j < h.size(); ++j) d = std::max(d, (h[i] - h[j]).squaredNorm());
    return std::sqrt(d);
}

Polyline canonical_polyline(const Polyline& p) {
    Polyline out;
    for (const auto& x : p)
        if (out.empty() || (x - out.back()).squaredNorm() > 0) out.push_back(x);
    if (out.empty() && !p.empty()) out.push_back(p.front());
    return out;
}

double point_polyline_distance(const Point& x, const Polyline& q) {
    if (q.size() == 1) return (x - q[0]).norm();
    double d = inf;
    for (size_t j = 0; j + 1 < q.size(); ++j) d = std::min(d, seg_distance(x, q[j], q[j + 1]));
    return d;
}

double vertex_hausdorff(const Polyline& p, const Polyline& q) {
    double d = 0;
    for (const auto& x : p) d = std::max(d, point_polyline_distance(x, q));
    for (const auto& y : q) d = std::max(d, point_polyline_distance(y, p));
    return d;
}

bool frechet_decision(const Polyline& P, const Polyline& Q, double eps) {
    if (P.empty() || Q.empty()) throw std::invalid_argument("empty polyline");
    if ((P.front() - Q.front()).norm() > eps || (P.back() - Q.back()).norm() > eps) return false;
    const int n = static_cast<int>(P.size()) - 1, m = static_cast<int>(Q.size()) - 1;
    if (n == 0 || m == 0) {
        const Point& c = n == 0 ? P[0] : Q[0];
        const Polyline& o = n == 0 ? Q : P;
        for (const auto& x : o)
            if ((x - c).norm() > eps) return false;
        return true;
    }
    // reachable bottom intervals of the current row of cells, indexed by column
    std::vector<Span> bottom(n);
    bool open = true;
    for (int i = 0; i < n; ++i) {
        Span f = free_span(P[i], P[i + 1], Q[0], eps);
        if (open && !f.empty() && f.lo <= 0) {
            bottom[i] = f;
            open = f.hi >= 1;
        } else {
            bottom[i] = {};
            open = false;
        }
    }
    bool left_open = true;
    for (int j = 0; j < m; ++j) {
        Span left;
        {
            Span f = free_span(Q[j], Q[j + 1], P[0], eps);
            if (left_open && !f.empty() && f.lo <= 0) {
                left = f;
                left_open = f.hi >= 1;
            } else {
                left_open = false;
            }
        }
        for (int i = 0; i < n; ++i) {
            Span right_free = free_span(Q[j], Q[j + 1], P[i + 1], eps);
            Span top_free = free_span(P[i], P[i + 1], Q[j + 1], eps);
            Span right{}, top{};
            const Span& bot = bottom[i];
            if (!bot.empty()) {
                right = right_free;
                top = top_free;
                top.lo = std::max(top.lo, bot.lo);
            }
            if (!left.empty()) {
                top = top_free;
                Span r = right_free;
                r.lo = std::max(r.lo, left.lo);
                if (right.empty()) right = r;
            }
            bottom[i] = top;
            left = right;
        }
        if (j == m - 1) return !left.empty() && left.hi >= 1 - 1e-12;
    }
    return false;
}

double discrete_frechet(const Polyline& P, const Polyline& Q) {
    const size_t n = P.size(), m = Q.size();
    if (!n || !m) throw std::invalid_argument("empty polyline");
    std::vector<double> prev(m), cur(m);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            double d = (P[i] - Q[j]).norm();
            double best;
            if (i == 0 && j == 0) best = d;
            else if (i == 0) best = std::max(cur[j - 1], d);
            else if (j == 0) best = std::max(prev[j], d);
            else best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

namespace {

double frechet_between(const Polyline& p, const Polyline& q, double lo, double hi) {
    // invariant: decision(hi) holds
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (frechet_decision(p, q, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace

double frechet_distance(const Polyline& p0, const Polyline& q0) {
    Polyline p = canonical_polyline(p0), q = canonical_polyline(q0);
    double lo = std::max({(p.front() - q.front()).norm(), (p.back() - q.back()).norm(), vertex_hausdorff(p, q)});
    double hi = discrete_frechet(p, q);
    if (frechet_decision(p, q, lo)) return lo;
    return frechet_between(p, q, lo, hi);
}

namespace {

// Fixes the start of a and searches over start points of b.
LoopDistance reroot_search(const Polyline& a, const Polyline& b, int subdivisions) {
    LoopDistance out;
    const int m = static_cast<int>(b.size()) - 1;
    if (m <= 0) {
        out.distance = frechet_distance(a, b);
        return out;
    }
    double max_edge = 0;
    for (int k = 0; k < m; ++k) max_edge = std::max(max_edge, (b[k + 1] - b[k]).norm());
    // moving the start point by h along an edge changes the distance by at most h
    out.gap = max_edge / (2.0 * subdivisions);

    const double lower = vertex_hausdorff(a, b);
    double best = inf;
    Polyline shifted;
    shifted.reserve(b.size() + 1);
    for (int k = 0; k < m && (best == inf || best - lower > 1e-12 * std::max(1.0, best)); ++k) {
        for (int s = 0; s < subdivisions; ++s) {
            double f = static_cast<double>(s) / subdivisions;
            Point start = b[k] + f * (b[k + 1] - b[k]);
            shifted.clear();
            shifted.push_back(start);
            for (int t = 1; t <= m; ++t) shifted.push_back(b[(k + t) % m]);
            if (s > 0) shifted.push_back(start);
            double lo = std::max({lower, (a.front() - start).norm()});
            if (lo >= best) continue;
            if (best < inf) {
                if (!frechet_decision(a, shifted, best * (1 - 1e-12))) continue;
                best = frechet_between(a, shifted, lo, best);
            } else {
                double hi = discrete_frechet(a, shifted);
                best = frechet_decision(a, shifted, lo) ? lo : frechet_between(a, shifted, lo, hi);
            }
        }
    }
    out.distance = best;
    return out;
}

}  // namespace

LoopDistance unrooted_loop_distance(const Polyline& a0, const Polyline& b0, int subdivisions) {
    if (a0.empty() || b0.empty()) throw std::invalid_argument("empty loop");
    if ((a0.front() - a0.back()).norm() > 0 || (b0.front() - b0.back()).norm() > 0)
        throw std::invalid_argument("loop is not closed");
    if (subdivisions < 1) throw std::invalid_argument("subdivisions must be positive");
    Polyline a = canonical_polyline(a0), b = canonical_polyline(b0);
    LoopDistance x = reroot_search(a, b, subdivisions), y = reroot_search(b, a, subdivisions);
    // each is an upper bound within its own gap, so the smaller one is within the larger gap
    return {std::min(x.distance, y.distance), std::max(x.gap, y.gap)};
}

Polyline simplify(const Polyline& p, double tol) {
    if (p.size() < 3) return p;
    std::vector<char> keep(p.size(), 0);
    keep[0] = keep[p.size() - 1] = 1;
    std::vector<std::pair<size_t, size_t>> stack{{0, p.size() - 1}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        double worst = -1;
        size_t at = i;
        for (size_t k = i + 1; k < j; ++k) {
            double d = seg_distance(p[k], p[i], p[j]);
            if (d > worst) {
                worst = d;
                at = k;
            }
        }
        if (worst > tol) {
            keep[at] = 1;
            stack.push_back({i, at});
            stack.push_back({at, j});
        }
    }
    Polyline out;
    for (size_t k = 0; k < p.size(); ++k)
        if (keep[k]) out.push_back(p[k]);
    return out;
}

namespace {

class Feasibility {
public:
    Feasibility(const std::vector<std::vector<double>>& d, const std::vector<double>& ha,
                const std::vector<double>& hb)
        : d_(d), ha_(ha), hb_(hb) {}

    bool run(double tau) {
        tau_ = tau;
        const int na = static_cast<int>(ha_.size()), nb = static_cast<int>(hb_.size());
        match_a_.assign(na, -1);
        match_b_.assign(nb, -1);
        for (int i = 0; i < na; ++i) {
            if (ha_[i] <= tau) continue;
            seen_.assign(nb, 0);
            if (!augment_from_a(i)) return false;
        }
        for (int j = 0; j < nb; ++j) {
            if (hb_[j] <= tau || match_b_[j] >= 0) continue;
            seen_.assign(na, 0);
            if (!augment_from_b(j)) return false;
        }
        return true;
    }

    MatchingCertificate certificate() const {
        MatchingCertificate c;
        for (int i = 0; i < static_cast<int>(match_a_.size()); ++i) {
            if (match_a_[i] >= 0) {
                c.pairs.emplace_back(i, match_a_[i]);
                c.value = std::max(c.value, d_[i][match_a_[i]]);
            } else {
                c.unmatched_a.push_back(i);
                c.value = std::max(c.value, ha_[i]);
            }
        }
        for (int j = 0; j < static_cast<int>(match_b_.size()); ++j)
            if (match_b_[j] < 0) {
                c.unmatched_b.push_back(j);
                c.value = std::max(c.value, hb_[j]);
            }
        return c;
    }

private:
    // standard augmenting path from an unmatched a-vertex
    bool augment_from_a(int i) {
        for (int j = 0; j < static_cast<int>(hb_.size()); ++j) {
            if (seen_[j] || d_[i][j] > tau_) continue;
            seen_[j] = 1;
            if (match_b_[j] < 0 || augment_from_a(match_b_[j])) {
                match_a_[i] = j;
                match_b_[j] = i;
                return true;
            }
        }
        return false;
    }

    // Alternating path from a required b-vertex ending at a free a-vertex or at a
    // b-vertex that may go unmatched. Matched a-vertices stay matched.
    bool augment_from_b(int j) {
        for (int i = 0; i < static_cast<int>(ha_.size()); ++i) {
            if (seen_[i] || d_[i][j] > tau_) continue;
            seen_[i] = 1;
            int prev = match_a_[i];
            bool ok = prev < 0 || hb_[prev] <= tau_ || augment_from_b(prev);
            if (ok) {
                if (prev >= 0 && match_b_[prev] == i) match_b_[prev] = -1;
                match_a_[i] = j;
                match_b_[j] = i;
                return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<double>>& d_;
    const std::vector<double>& ha_;
    const std::vector<double>& hb_;
    double tau_ = 0;
    std::vector<int> match_a_, match_b_;
    std::vector<char> seen_;
};

}  // namespace

MatchingCertificate matching_distance(const std::vector<std::vector<double>>& dist,
                                      const std::vector<double>& half_a,
                                      const std::vector<double>& half_b) {
    std::vector<double> cand{0.0};
    for (double h : half_a) cand.push_back(h);
    for (double h : half_b) cand.push_back(h);
    for (const auto& row : dist)
        for (double x : row) cand.push_back(x);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    Feasibility f(dist, half_a, half_b);
    size_t lo = 0, hi = cand.size() - 1;  // the largest candidate is always feasible
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (f.run(cand[mid])) hi = mid;
        else lo = mid + 1;
    }
    f.run(cand[lo]);
    return f.certificate();
}

MatchingCertificate loop_soup_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b,
                                       int subdivisions) {
    std::vector<double> ha, hb;
    for (const auto& l : a) ha.push_back(diameter(l) / 2);
    for (const auto& l : b) hb.push_back(diameter(l) / 2);
    std::vector<std::vector<double>> d(a.size(), std::vector<double>(b.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) d[i][j] = unrooted_loop_distance(a[i], b[j], subdivisions).distance;
    return matching_distance(d, ha, hb);
}

void metric_closure(std::vector<std::vector<double>>& d) {
    const size_t n = d.size();
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
}

}  // namespace rwls
