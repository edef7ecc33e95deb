#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwls {

using Point = Eigen::Vector2d;

struct Disk {
    Point center{0, 0};
    double radius = 1;
};

struct Rect {
    Point lo{0, 0};
    Point hi{1, 1};
};

struct Polygon {
    std::vector<Point> vertices;
};

// Bounded simply connected region. Points on the boundary count as outside.
class Domain {
public:
    enum class Kind { disk, rect, polygon };

    static Domain disk(Point center, double radius);
    static Domain rect(Point lo, Point hi);
    static Domain polygon(std::vector<Point> vertices);

    Kind kind() const { return kind_; }
    bool contains(const Point& p) const;
    double diameter() const;
    double area() const;
    // distance from an interior point to the boundary, 0 outside
    double boundary_distance(const Point& p) const;
    // first parameter s in (0,1] where a -> b meets the boundary, a inside
    double exit_parameter(const Point& a, const Point& b) const;
    void bounding_box(Point& lo, Point& hi) const;
    std::string describe() const;

    const Disk& as_disk() const { return disk_; }
    const Rect& as_rect() const { return rect_; }
    const Polygon& as_polygon() const { return poly_; }

private:
    Kind kind_ = Kind::disk;
    Disk disk_;
    Rect rect_;
    Polygon poly_;
};

struct Edge {
    int target;
    double weight;
};

// Embedded weighted directed graph, immutable once built. Boundary vertices have
// no outgoing edges, so a walk stops the moment it reaches one.
class PlanarGraph {
public:
    PlanarGraph() = default;

    struct Builder {
        std::vector<Point> points;
        std::vector<bool> boundary;
        std::vector<std::vector<Edge>> out;
        double delta = 1;

        int add_vertex(const Point& p, bool is_boundary);
        void add_edge(int from, int to, double w);
        void add_undirected(int a, int b, double w);
        PlanarGraph build() const;
    };

    int size() const { return static_cast<int>(pos_.size()); }
    double mesh() const { return delta_; }
    const Point& position(int v) const { return pos_[v]; }
    const std::vector<Point>& positions() const { return pos_; }
    bool is_boundary(int v) const { return boundary_[v] != 0; }
    int degree(int v) const { return off_[v + 1] - off_[v]; }
    int neighbor(int v, int k) const { return dst_[off_[v] + k]; }
    double weight(int v, int k) const { return w_[off_[v] + k]; }
    double probability(int v, int k) const { return prob_[off_[v] + k]; }
    double cumulative(int v, int k) const { return cum_[off_[v] + k]; }
    bool uniform_row(int v) const { return uniform_[v] != 0; }
    int interior_count() const { return interior_count_; }
    std::vector<int> interior_vertices() const;
    std::vector<int> boundary_vertices() const;
    int edge_count() const { return static_cast<int>(dst_.size()); }
    // edge slot of (u,v) or -1
    int find_edge(int u, int v) const;
    int nearest_vertex(const Point& p, bool interior_only = true) const;

private:
    friend struct Builder;
    std::vector<Point> pos_;
    std::vector<char> boundary_;
    std::vector<char> uniform_;
    std::vector<int> off_{0};
    std::vector<int> dst_;
    std::vector<double> w_, prob_, cum_;
    double delta_ = 1;
    int interior_count_ = 0;
};

PlanarGraph build_square_lattice(double delta, const Domain& domain);
PlanarGraph build_perturbed_lattice(double delta, const Domain& domain, double jitter,
                                    std::uint64_t seed);

double transition_probability(const PlanarGraph& g, int u, int v);

// Largest number of vertices in a closed ball of radius delta centred at a vertex.
// Any ball of radius delta holding k vertices lies inside the radius-2 delta ball
// around one of them, so this witness set loses at most that factor.
int check_bounded_density(const PlanarGraph& g);

double max_edge_diameter(const PlanarGraph& g);

enum class Orientation { horizontal, vertical };
enum class StartPolicy { nearest, all, sample };

struct CrossingEstimate {
    double estimate = 0;
    double lo = 0, hi = 0;
    int worst_start = -1;
    int starts_tried = 0;
    long long trials = 0;
};

// Frequency that a walk from the start ball reaches the target ball before
// leaving the 3:1 rectangle of side l*delta anchored at z. Worst case over starts.
CrossingEstimate estimate_crossing_probability(const PlanarGraph& g, const Point& z, double l,
                                               Orientation orient, StartPolicy policy,
                                               long long trials, std::mt19937_64& rng,
                                               int sample_starts = 8);

void write_graph(std::ostream& os, const PlanarGraph& g);
PlanarGraph read_graph(std::istream& is);
std::string serialize_graph(const PlanarGraph& g);
void save_graph(const std::string& path, const PlanarGraph& g);
PlanarGraph load_graph(const std::string& path);

// shortest decimal string that reads back to the same double
std::string format_double(double x);

// Two interior vertices a=0, b=1 sharing one absorbing vertex, every step 1/2.
PlanarGraph make_g_ab();

}  // namespace rwls
