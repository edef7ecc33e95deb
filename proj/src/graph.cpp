#include "rwls/graph.hpp"

#include "rwls/rng.hpp"
#include "rwls/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace rwls {

namespace {

double seg_point_distance(const Point& p, const Point& a, const Point& b) {
    Point d = b - a;
    double len2 = d.squaredNorm();
    double s = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (a + s * d - p).norm();
}

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Domain Domain::disk(Point center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("disk radius must be positive");
    Domain d;
    d.kind_ = Kind::disk;
    d.disk_ = {center, radius};
    return d;
}

Domain Domain::rect(Point lo, Point hi) {
    if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw std::invalid_argument("empty rectangle");
    Domain d;
    d.kind_ = Kind::rect;
    d.rect_ = {lo, hi};
    return d;
}

Domain Domain::polygon(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    Domain d;
    d.kind_ = Kind::polygon;
    d.poly_.vertices = std::move(vertices);
    if (!(d.diameter() > 0)) throw std::invalid_argument("degenerate polygon");
    return d;
}

bool Domain::contains(const Point& p) const {
    switch (kind_) {
        case Kind::disk: return (p - disk_.center).squaredNorm() < disk_.radius * disk_.radius;
        case Kind::rect:
            return p.x() > rect_.lo.x() && p.x() < rect_.hi.x() && p.y() > rect_.lo.y() &&
                   p.y() < rect_.hi.y();
        case Kind::polygon: {
            const auto& v = poly_.vertices;
            bool inside = false;
            for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                if (seg_point_distance(p, v[j], v[i]) == 0) return false;
                if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
                    double xs = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) /
                                               (v[i].y() - v[j].y());
                    if (p.x() < xs) inside = !inside;
                }
            }
            return inside;
        }
    }
    return false;
}

double Domain::diameter() const {
    switch (kind_) {
        case Kind::disk: return 2 * disk_.radius;
        case Kind::rect: return (rect_.hi - rect_.lo).norm();
        case Kind::polygon: {
            double d = 0;
            for (const auto& a : poly_.vertices)
                for (const auto& b : poly_.vertices) d = std::max(d, (a - b).norm());
            return d;
        }
    }
    return 0;
}

double Domain::area() const {
    switch (kind_) {
        case Kind::disk: return std::numbers::pi * disk_.radius * disk_.radius;
        case Kind::rect: return (rect_.hi.x() - rect_.lo.x()) * (rect_.hi.y() - rect_.lo.y());
        case Kind::polygon: {
            double a = 0;
            const auto& v = poly_.vertices;
            for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) a += cross(v[j], v[i]);
            return std::abs(a) / 2;
        }
    }
    return 0;
}

double Domain::boundary_distance(const Point& p) const {
    if (!contains(p)) return 0;
    switch (kind_) {
        case Kind::disk: return disk_.radius - (p - disk_.center).norm();
        case Kind::rect:
            return std::min({p.x() - rect_.lo.x(), rect_.hi.x() - p.x(), p.y() - rect_.lo.y(),
                             rect_.hi.y() - p.y()});
        case Kind::polygon: {
            double d = std::numeric_limits<double>::infinity();
            const auto& v = poly_.vertices;
            for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
                d = std::min(d, seg_point_distance(p, v[j], v[i]));
            return d;
        }
    }
    return 0;
}

double Domain::exit_parameter(const Point& a, const Point& b) const {
    Point d = b - a;
    switch (kind_) {
        case Kind::disk: {
            Point f = a - disk_.center;
            double A = d.squaredNorm(), B = 2 * f.dot(d), C = f.squaredNorm() - disk_.radius * disk_.radius;
            double disc = std::max(0.0, B * B - 4 * A * C);
            double s = (-B + std::sqrt(disc)) / (2 * A);
            return std::clamp(s, 0.0, 1.0);
        }
        case Kind::rect: {
            double s = 1;
            for (int k = 0; k < 2; ++k) {
                if (d[k] > 0) s = std::min(s, (rect_.hi[k] - a[k]) / d[k]);
                if (d[k] < 0) s = std::min(s, (rect_.lo[k] - a[k]) / d[k]);
            }
            return std::clamp(s, 0.0, 1.0);
        }
        case Kind::polygon: {
            double s = 1;
            const auto& v = poly_.vertices;
            for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                Point e = v[i] - v[j];
                double den = cross(d, e);
                if (den == 0) continue;
                double t = cross(v[j] - a, e) / den;
                double u = cross(v[j] - a, d) / den;
                if (t > 0 && t <= 1 && u >= 0 && u <= 1) s = std::min(s, t);
            }
            return s;
        }
    }
    return 1;
}

void Domain::bounding_box(Point& lo, Point& hi) const {
    switch (kind_) {
        case Kind::disk:
            lo = disk_.center - Point(disk_.radius, disk_.radius);
            hi = disk_.center + Point(disk_.radius, disk_.radius);
            return;
        case Kind::rect: lo = rect_.lo; hi = rect_.hi; return;
        case Kind::polygon:
            lo = hi = poly_.vertices.front();
            for (const auto& v : poly_.vertices) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            return;
    }
}

std::string Domain::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::disk:
            os << "disk(" << disk_.center.x() << "," << disk_.center.y() << ";" << disk_.radius << ")";
            break;
        case Kind::rect:
            os << "rect(" << rect_.lo.x() << "," << rect_.lo.y() << ";" << rect_.hi.x() << ","
               << rect_.hi.y() << ")";
            break;
        case Kind::polygon: os << "polygon(" << poly_.vertices.size() << ")"; break;
    }
    return os.str();
}

int PlanarGraph::Builder::add_vertex(const Point& p, bool is_boundary) {
    points.push_back(p);
    boundary.push_back(is_boundary);
    out.emplace_back();
    return static_cast<int>(points.size()) - 1;
}

void PlanarGraph::Builder::add_edge(int from, int to, double w) {
    if (!(w > 0)) throw std::invalid_argument("edge weight must be positive");
    out[from].push_back({to, w});
}

void PlanarGraph::Builder::add_undirected(int a, int b, double w) {
    if (!boundary[a]) add_edge(a, b, w);
    if (!boundary[b]) add_edge(b, a, w);
}

PlanarGraph PlanarGraph::Builder::build() const {
    PlanarGraph g;
    g.delta_ = delta;
    g.pos_ = points;
    int n = static_cast<int>(points.size());
    g.boundary_.resize(n);
    g.uniform_.resize(n);
    g.off_.assign(1, 0);
    for (int v = 0; v < n; ++v) {
        g.boundary_[v] = boundary[v];
        if (boundary[v] && !out[v].empty())
            throw std::invalid_argument("boundary vertex with outgoing edges");
        double total = 0;
        for (const auto& e : out[v]) total += e.weight;
        if (!boundary[v]) {
            ++g.interior_count_;
            if (!(total > 0)) throw std::invalid_argument("interior vertex without outgoing weight");
        }
        double acc = 0;
        bool uni = true;
        for (const auto& e : out[v]) {
            g.dst_.push_back(e.target);
            g.w_.push_back(e.weight);
            g.prob_.push_back(e.weight / total);
            acc += e.weight;
            g.cum_.push_back(acc / total);
            uni = uni && e.weight == out[v].front().weight;
        }
        if (!out[v].empty()) g.cum_.back() = 1.0;
        g.uniform_[v] = uni;
        g.off_.push_back(static_cast<int>(g.dst_.size()));
    }
    return g;
}

std::vector<int> PlanarGraph::interior_vertices() const {
    std::vector<int> r;
    for (int v = 0; v < size(); ++v)
        if (!is_boundary(v)) r.push_back(v);
    return r;
}

std::vector<int> PlanarGraph::boundary_vertices() const {
    std::vector<int> r;
    for (int v = 0; v < size(); ++v)
        if (is_boundary(v)) r.push_back(v);
    return r;
}

int PlanarGraph::find_edge(int u, int v) const {
    for (int k = off_[u]; k < off_[u + 1]; ++k)
        if (dst_[k] == v) return k - off_[u];
    return -1;
}

int PlanarGraph::nearest_vertex(const Point& p, bool interior_only) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int v = 0; v < size(); ++v) {
        if (interior_only && is_boundary(v)) continue;
        double d = (pos_[v] - p).squaredNorm();
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

namespace {

// Lattice with optional displacement; displacement is drawn per lattice row from
// a stream keyed on (seed, row) so the result does not depend on traversal order.
PlanarGraph build_lattice(double delta, const Domain& domain, double jitter, std::uint64_t seed) {
    if (!(delta > 0) || !(delta < domain.diameter() / 4))
        throw std::invalid_argument("mesh must satisfy 0 < delta < diameter/4");
    Point lo, hi;
    domain.bounding_box(lo, hi);
    long i0 = static_cast<long>(std::floor(lo.x() / delta)) - 1;
    long i1 = static_cast<long>(std::ceil(hi.x() / delta)) + 1;
    long j0 = static_cast<long>(std::floor(lo.y() / delta)) - 1;
    long j1 = static_cast<long>(std::ceil(hi.y() / delta)) + 1;
    long W = i1 - i0 + 1, H = j1 - j0 + 1;

    std::vector<Point> site(W * H);
    for (long j = 0; j < H; ++j) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(j + j0 + (1L << 40)));
        for (long i = 0; i < W; ++i) {
            Point p((i + i0) * delta, (j + j0) * delta);
            if (jitter > 0) {
                double dx = (2 * uniform01(rng) - 1) * jitter * delta;
                double dy = (2 * uniform01(rng) - 1) * jitter * delta;
                p += Point(dx, dy);
            }
            site[j * W + i] = p;
        }
    }

    PlanarGraph::Builder b;
    b.delta = delta;
    std::vector<int> id(W * H, -1);
    for (long j = 1; j + 1 < H; ++j)
        for (long i = 1; i + 1 < W; ++i)
            if (domain.contains(site[j * W + i])) id[j * W + i] = b.add_vertex(site[j * W + i], false);
    if (b.points.empty()) throw std::invalid_argument("domain too small for mesh");

    const long di[4] = {1, 0, -1, 0};
    const long dj[4] = {0, 1, 0, -1};
    for (long j = 1; j + 1 < H; ++j)
        for (long i = 1; i + 1 < W; ++i) {
            int u = id[j * W + i];
            if (u < 0) continue;
            const Point a = site[j * W + i];
            for (int k = 0; k < 4; ++k) {
                long nb = (j + dj[k]) * W + (i + di[k]);
                int v = id[nb];
                const Point c = site[nb];
                double s = domain.exit_parameter(a, c);
                if (v >= 0 && s >= 1) {
                    b.add_edge(u, v, 1.0);
                } else {
                    int w = b.add_vertex(a + s * (c - a), true);
                    b.add_edge(u, w, 1.0);
                }
            }
        }
    return b.build();
}

}  // namespace

PlanarGraph build_square_lattice(double delta, const Domain& domain) {
    return build_lattice(delta, domain, 0.0, 0);
}

PlanarGraph build_perturbed_lattice(double delta, const Domain& domain, double jitter,
                                    std::uint64_t seed) {
    if (!(jitter >= 0 && jitter <= 0.3)) throw std::invalid_argument("jitter must lie in [0, 0.3]");
    return build_lattice(delta, domain, jitter, seed);
}

double transition_probability(const PlanarGraph& g, int u, int v) {
    if (g.is_boundary(u)) throw std::invalid_argument("killed state has no transitions");
    double p = 0;
    for (int k = 0; k < g.degree(u); ++k)
        if (g.neighbor(u, k) == v) p += g.probability(u, k);
    return p;
}

int check_bounded_density(const PlanarGraph& g) {
    if (g.size() == 0) return 0;
    double r = g.mesh() * (1 + 1e-9);
    std::unordered_map<long long, std::vector<int>> cells;
    auto key = [&](long cx, long cy) { return (static_cast<long long>(cx) << 32) ^ (cy & 0xffffffffLL); };
    auto cell = [&](const Point& p) {
        return std::pair<long, long>(static_cast<long>(std::floor(p.x() / r)),
                                     static_cast<long>(std::floor(p.y() / r)));
    };
    for (int v = 0; v < g.size(); ++v) {
        auto [cx, cy] = cell(g.position(v));
        cells[key(cx, cy)].push_back(v);
    }
    int best = 0;
    for (int v = 0; v < g.size(); ++v) {
        auto [cx, cy] = cell(g.position(v));
        int count = 0;
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = cells.find(key(cx + dx, cy + dy));
                if (it == cells.end()) continue;
                for (int w : it->second)
                    if ((g.position(w) - g.position(v)).norm() <= r) ++count;
            }
        best = std::max(best, count);
    }
    return best;
}

double max_edge_diameter(const PlanarGraph& g) {
    double m = 0;
    for (int v = 0; v < g.size(); ++v)
        for (int k = 0; k < g.degree(v); ++k)
            m = std::max(m, (g.position(g.neighbor(v, k)) - g.position(v)).norm());
    return m;
}

CrossingEstimate estimate_crossing_probability(const PlanarGraph& g, const Point& z, double l,
                                               Orientation orient, StartPolicy policy,
                                               long long trials, Rng& rng, int sample_starts) {
    if (trials < 100) throw std::invalid_argument("crossing estimate needs at least 100 trials");
    double side = l * g.mesh();
    Point ext = orient == Orientation::horizontal ? Point(3 * side, side) : Point(side, 3 * side);
    Point sc = z + (orient == Orientation::horizontal ? Point(0.5, 0.5) : Point(0.5, 0.5)) * side;
    Point tc = z + (orient == Orientation::horizontal ? Point(2.5, 0.5) : Point(0.5, 2.5)) * side;
    double rad = side / 4;
    auto in_rect = [&](const Point& p) {
        return p.x() > z.x() && p.x() < z.x() + ext.x() && p.y() > z.y() && p.y() < z.y() + ext.y();
    };

    std::vector<int> starts;
    for (int v = 0; v < g.size(); ++v)
        if (!g.is_boundary(v) && (g.position(v) - sc).norm() < rad) starts.push_back(v);
    if (starts.empty()) throw std::invalid_argument("no vertex in start ball");
    if (policy == StartPolicy::nearest) {
        int best = starts.front();
        for (int v : starts)
            if ((g.position(v) - sc).norm() < (g.position(best) - sc).norm()) best = v;
        starts = {best};
    } else if (policy == StartPolicy::sample && static_cast<int>(starts.size()) > sample_starts) {
        std::shuffle(starts.begin(), starts.end(), rng);
        starts.resize(sample_starts);
    }

    CrossingEstimate out;
    out.estimate = 2;
    for (int s : starts) {
        long long hits = 0;
        for (long long t = 0; t < trials; ++t) {
            int v = s;
            for (;;) {
                if ((g.position(v) - tc).norm() < rad) {
                    ++hits;
                    break;
                }
                if (g.is_boundary(v) || !in_rect(g.position(v))) break;
                double u = uniform01(rng);
                int k = 0;
                while (k + 1 < g.degree(v) && g.cumulative(v, k) < u) ++k;
                v = g.neighbor(v, k);
            }
        }
        double p = static_cast<double>(hits) / trials;
        if (p < out.estimate) {
            auto ci = wilson_interval(hits, trials);
            out.estimate = p;
            out.lo = ci.lo;
            out.hi = ci.hi;
            out.worst_start = s;
        }
        out.trials += trials;
        ++out.starts_tried;
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_graph(std::ostream& os, const PlanarGraph& g) {
    os << "graph v1 delta=" << format_double(g.mesh()) << "\n";
    for (int v = 0; v < g.size(); ++v)
        os << "v " << v << " " << format_double(g.position(v).x()) << " "
           << format_double(g.position(v).y()) << " " << (g.is_boundary(v) ? "boundary" : "interior")
           << "\n";
    for (int v = 0; v < g.size(); ++v)
        for (int k = 0; k < g.degree(v); ++k)
            os << "e " << v << " " << g.neighbor(v, k) << " " << format_double(g.weight(v, k)) << "\n";
}

namespace {
double parse_double(const std::string& s) {
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("malformed number '" + s + "'");
    return x;
}
}  // namespace

PlanarGraph read_graph(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("graph v1 delta=", 0) != 0)
        throw std::runtime_error("missing 'graph v1' header");
    PlanarGraph::Builder b;
    b.delta = parse_double(line.substr(15));
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            int id;
            std::string x, y, kind;
            if (!(ls >> id >> x >> y >> kind) || id != static_cast<int>(b.points.size()) ||
                (kind != "interior" && kind != "boundary"))
                throw std::runtime_error("bad vertex line " + std::to_string(lineno));
            b.add_vertex(Point(parse_double(x), parse_double(y)), kind == "boundary");
        } else if (tag == "e") {
            int s, t;
            std::string w;
            if (!(ls >> s >> t >> w) || s < 0 || t < 0 || s >= static_cast<int>(b.points.size()) ||
                t >= static_cast<int>(b.points.size()))
                throw std::runtime_error("bad edge line " + std::to_string(lineno));
            b.add_edge(s, t, parse_double(w));
        } else {
            throw std::runtime_error("unknown record on line " + std::to_string(lineno));
        }
    }
    return b.build();
}

std::string serialize_graph(const PlanarGraph& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

void save_graph(const std::string& path, const PlanarGraph& g) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_graph(f, g);
}

PlanarGraph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    return read_graph(f);
}

PlanarGraph make_g_ab() {
    PlanarGraph::Builder b;
    b.delta = 1;
    int a = b.add_vertex(Point(0, 0), false);
    int bb = b.add_vertex(Point(1, 0), false);
    int d = b.add_vertex(Point(0.5, 1), true);
    b.add_edge(a, bb, 1);
    b.add_edge(a, d, 1);
    b.add_edge(bb, a, 1);
    b.add_edge(bb, d, 1);
    return b.build();
}

}  // namespace rwls
