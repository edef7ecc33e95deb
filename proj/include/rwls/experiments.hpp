#pragma once

#include "rwls/brownian.hpp"
#include "rwls/graph.hpp"
#include "rwls/stats.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace rwls {

using Config = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment.
Config parse_config(std::istream& is);
Config load_config(const std::string& path);

// Accepts "1/64" as well as plain decimals.
double parse_number(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
Domain parse_domain(const std::string& text);  // "disk", "disk:x,y,r", "rect:x0,y0,x1,y1"

struct GraphSpec {
    Domain domain = Domain::disk({0, 0}, 1);
    bool perturbed = false;
    double jitter = 0.2;
    std::uint64_t seed = 1;
};

PlanarGraph build_graph(const GraphSpec& spec, double delta);

// Calls fn(i) for i in [0, n) on a pool of worker threads.
void parallel_replicas(long long n, const std::function<void(long long)>& fn, int threads = 0);

// Number of loops of one soup sample with diameter >= eps that satisfy f.
long long count_soup_loops(const PlanarGraph& g, Rng& rng, double eps, const LoopFunctional& f);

struct ConvergenceConfig {
    GraphSpec graph;
    std::vector<double> deltas{1.0 / 32, 1.0 / 64, 1.0 / 128};
    double eps = 0.3;
    LoopFunctional functional{LoopFunctional::Kind::diameter_at_least, 0.3, {0, 0}};
    long long replicas = 2000;
    double eta = 1e-3;
    int bls_resolution = 64;
    int dm_samples = 3;  // paired samples for the descriptive soup distance
    std::uint64_t seed = 1;
};

struct ConvergenceResult {
    std::vector<MeanEstimate> rwls;
    MeanEstimate bls;
    std::vector<double> pair_z;  // |difference| / combined SE for each pair of deltas, i < j
    double bls_z = 0;
    bool cauchy = false, agrees = false;
    std::vector<double> soup_distance;  // descriptive only
    bool pass() const { return cauchy && agrees; }
};

ConvergenceResult experiment_convergence(const ConvergenceConfig& cfg);

struct SchrammConfig {
    GraphSpec graph;
    double delta = 1.0 / 32;
    double eps = 0.25;
    std::vector<int> js{1, 5, 25, 125};
    long long replicas = 200;
    double crossing_scale = 1;  // the product C * delta_0 in j_max = floor(log_6(C delta_0 / delta))
    std::uint64_t seed = 1;
};

struct SchrammResult {
    std::vector<long long> hits;  // replicas with some later walk of diameter > eps
    std::vector<double> estimate;
    std::vector<Interval> ci;
    long long replicas = 0;
    int j_max = 0;
    int vertices = 0;
    bool nonincreasing = false, final_below = false;
    bool pass() const { return nonincreasing && final_below; }
};

SchrammResult experiment_schramm(const SchrammConfig& cfg);

struct BoundaryConfig {
    GraphSpec graph;
    double delta = 1.0 / 64;
    double eps = 0.3;
    std::vector<double> etas{2, 0.2, 0.1, 0.05, 0.02, 0.01};
    long long replicas = 500;
    std::uint64_t seed = 1;
};

struct BoundaryResult {
    std::vector<long long> hits;
    std::vector<Interval> ci;
    long long replicas = 0;
    bool nonincreasing = false;
    double calibrated_eta = -1;  // largest eta with upper CI <= eps, -1 if none
    bool pass() const { return nonincreasing && calibrated_eta > 0; }
};

BoundaryResult experiment_boundary(const BoundaryConfig& cfg);

struct AppendixAConfig {
    Domain domain = Domain::disk({0, 0}, 1);
    double eps = 0.5;
    double theta = 1.5;
    std::vector<int> Ns{32, 64};
    long long replicas = 10000;
    double eta = 1e-3;
    int bls_resolution = 64;
    std::uint64_t seed = 1;
};

struct AppendixARow {
    int N = 0;
    long long bls_hits = 0, rwls_hits = 0;
    Interval bls_ci, rwls_ci;
    double bls_bound = 0, rwls_bound = 0;  // derivation carried through
    double bls_bound_printed = 0;  // with the exponent N^(2 theta) exactly as displayed
    bool bls_graded = false, rwls_graded = false;
    bool bls_pass = true, rwls_pass = true;
};

struct AppendixAResult {
    std::vector<AppendixARow> rows;
    long long replicas = 0;
    bool pass() const;
};

// Brownian bound: 16 area / (pi eps^2) * exp(-eps^2 N^(2-theta) / 4)
double appendix_a_bls_bound(double area, double eps, int N, double theta);
// Walk bound: 4 area N^(2+theta) * exp(-eps^2 N^(2-theta) / 32)
double appendix_a_rwls_bound(double area, double eps, int N, double theta);

AppendixAResult experiment_appendix_a(const AppendixAConfig& cfg);

nlohmann::json to_json(const MeanEstimate& m);
nlohmann::json to_json(const Interval& i);
nlohmann::json to_json(const ConvergenceResult& r);
nlohmann::json to_json(const SchrammResult& r, const SchrammConfig& cfg);
nlohmann::json to_json(const BoundaryResult& r, const BoundaryConfig& cfg);
nlohmann::json to_json(const AppendixAResult& r);

// Minimal line chart: one or more series over a shared x axis.
struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};
void write_svg_plot(const std::string& path, const std::string& title, const std::vector<SvgSeries>& series,
                    bool log_y = false);

}  // namespace rwls
