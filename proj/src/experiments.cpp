#include "rwls/experiments.hpp"

#include "rwls/metrics.hpp"
#include "rwls/soup.hpp"
#include "rwls/walk.hpp"
#include "rwls/loop_erasure.hpp"
#include "rwls/wilson.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rwls {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

// Stream tags keep the experiments' random streams apart.
constexpr std::uint64_t tag(std::uint64_t a, std::uint64_t b) { return (a << 40) ^ (b << 20); }

}  // namespace

Config parse_config(std::istream& is) {
    Config c;
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(no) + ": expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) throw std::invalid_argument("config line " + std::to_string(no) + ": empty key");
        c[k] = v;
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    return parse_config(in);
}

double parse_number(const std::string& text) {
    std::string t = trim(text);
    auto slash = t.find('/');
    auto one = [](const std::string& s) {
        size_t used = 0;
        double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("malformed number: " + s);
        return x;
    };
    try {
        if (slash == std::string::npos) return one(t);
        double den = one(trim(t.substr(slash + 1)));
        if (den == 0) throw std::invalid_argument("zero denominator: " + t);
        return one(trim(t.substr(0, slash))) / den;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("malformed number: " + text);
    }
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ','))
        if (!p.empty()) out.push_back(parse_number(p));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double x : parse_number_list(text)) {
        if (x != std::floor(x)) throw std::invalid_argument("expected integers: " + text);
        out.push_back(static_cast<int>(x));
    }
    return out;
}

Domain parse_domain(const std::string& text) {
    if (text == "disk") return Domain::disk({0, 0}, 1);
    if (text == "square") return Domain::rect({-1, -1}, {1, 1});
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::vector<double> xs = colon == std::string::npos ? std::vector<double>{} : parse_number_list(text.substr(colon + 1));
    if (kind == "disk" && xs.size() == 3) return Domain::disk({xs[0], xs[1]}, xs[2]);
    if (kind == "rect" && xs.size() == 4) return Domain::rect({xs[0], xs[1]}, {xs[2], xs[3]});
    throw std::invalid_argument("unknown domain: " + text);
}

PlanarGraph build_graph(const GraphSpec& spec, double delta) {
    return spec.perturbed ? build_perturbed_lattice(delta, spec.domain, spec.jitter, spec.seed)
                          : build_square_lattice(delta, spec.domain);
}

void parallel_replicas(long long n, const std::function<void(long long)>& fn, int threads) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::min<long long>(threads, std::max<long long>(n, 1)));
    if (threads == 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (long long i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

bool box_reaches(const PlanarGraph& g, std::span<const int> s, double eps) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (int v : s) {
        const Point& p = g.position(v);
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    }
    return std::hypot(x1 - x0, y1 - y0) >= eps;
}

Polyline polyline_of(const PlanarGraph& g, std::span<const int> s) {
    Polyline p;
    p.reserve(s.size());
    for (int v : s) p.push_back(g.position(v));
    return p;
}

double z_score(const MeanEstimate& a, const MeanEstimate& b) {
    double se = std::hypot(a.se, b.se);
    double d = std::abs(a.mean - b.mean);
    if (se == 0) return d == 0 ? 0 : std::numeric_limits<double>::infinity();
    return d / se;
}

}  // namespace

long long count_soup_loops(const PlanarGraph& g, Rng& rng, double eps, const LoopFunctional& f) {
    long long c = 0;
    sample_loop_soup(g, rng, [&](std::span<const int> s, double) {
        if (!box_reaches(g, s, eps)) return;
        Polyline p = polyline_of(g, s);
        if (diameter(p) >= eps && f(p)) ++c;
    });
    return c;
}

ConvergenceResult experiment_convergence(const ConvergenceConfig& cfg) {
    if (cfg.deltas.empty()) throw std::invalid_argument("delta list is empty");
    if (cfg.replicas < 2) throw std::invalid_argument("need at least two replicas");
    ConvergenceResult res;
    const long long R = cfg.replicas;
    std::vector<double> counts(R);
    for (size_t k = 0; k < cfg.deltas.size(); ++k) {
        PlanarGraph g = build_graph(cfg.graph, cfg.deltas[k]);
        parallel_replicas(R, [&](long long i) {
            Rng rng = make_stream(cfg.seed + tag(1, k), i);
            counts[i] = static_cast<double>(count_soup_loops(g, rng, cfg.eps, cfg.functional));
        });
        res.rwls.push_back(mean_ci(counts));
    }
    BlsOptions opt;
    opt.eta = cfg.eta;
    opt.resolution = cfg.bls_resolution;
    parallel_replicas(R, [&](long long i) {
        Rng rng = make_stream(cfg.seed + tag(2, 0), i);
        auto soup = sample_bls_restricted(cfg.graph.domain, cfg.eps, rng, opt);
        double c = 0;
        for (const auto& l : soup.loops) c += cfg.functional(l.poly) ? 1 : 0;
        counts[i] = c;
    });
    res.bls = mean_ci(counts);

    res.cauchy = true;
    for (size_t a = 0; a < res.rwls.size(); ++a)
        for (size_t b = a + 1; b < res.rwls.size(); ++b) {
            res.pair_z.push_back(z_score(res.rwls[a], res.rwls[b]));
            res.cauchy = res.cauchy && res.pair_z.back() <= 3;
        }
    res.bls_z = z_score(res.rwls.back(), res.bls);
    res.agrees = res.bls_z <= 3;

    // paired samples at the finest mesh, polylines simplified to keep the matching cheap
    const double tol = 0.02;
    PlanarGraph g = build_graph(cfg.graph, cfg.deltas.back());
    for (int i = 0; i < cfg.dm_samples; ++i) {
        Rng rng = make_stream(cfg.seed + tag(3, 0), i);
        std::vector<Polyline> a, b;
        sample_loop_soup(g, rng, [&](std::span<const int> s, double) {
            if (!box_reaches(g, s, cfg.eps)) return;
            Polyline p = polyline_of(g, s);
            if (diameter(p) >= cfg.eps && cfg.functional(p)) a.push_back(simplify(p, tol));
        });
        auto soup = sample_bls_restricted(cfg.graph.domain, cfg.eps, rng, opt);
        for (const auto& l : soup.loops)
            if (cfg.functional(l.poly)) b.push_back(simplify(l.poly, tol));
        res.soup_distance.push_back(loop_soup_distance(a, b, 2).value);
    }
    return res;
}

SchrammResult experiment_schramm(const SchrammConfig& cfg) {
    if (cfg.replicas < 1) throw std::invalid_argument("replicas must be positive");
    if (cfg.js.empty()) throw std::invalid_argument("j list is empty");
    SchrammResult res;
    res.replicas = cfg.replicas;
    res.j_max = static_cast<int>(std::floor(std::log(cfg.crossing_scale / cfg.delta) / std::log(6.0)));
    PlanarGraph g = build_graph(cfg.graph, cfg.delta);
    res.vertices = g.interior_count();
    const auto order = good_ordering(g);
    std::vector<int> js = cfg.js;
    std::vector<std::vector<char>> hit(cfg.replicas, std::vector<char>(js.size(), 0));
    parallel_replicas(cfg.replicas, [&](long long i) {
        Rng rng = make_stream(cfg.seed + tag(4, 0), i);
        std::vector<char> in_tree(g.size(), 0);
        std::vector<int> path;
        int last_large = -1;  // index of the last branch whose walk had diameter > eps
        int k = 0;
        for (int v : order) {
            if (in_tree[v]) continue;
            path.clear();
            walk_until_blocked(g, v, in_tree, path, rng);
            if (box_reaches(g, path, cfg.eps) && diameter(polyline_of(g, path)) > cfg.eps) last_large = k;
            auto core = loop_erased_core(path);
            for (size_t t = 0; t + 1 < core.size(); ++t) in_tree[core[t]] = 1;
            ++k;
        }
        for (size_t a = 0; a < js.size(); ++a) hit[i][a] = last_large >= js[a];
    });
    res.nonincreasing = true;
    for (size_t a = 0; a < js.size(); ++a) {
        long long h = 0;
        for (const auto& row : hit) h += row[a];
        res.hits.push_back(h);
        res.estimate.push_back(static_cast<double>(h) / cfg.replicas);
        res.ci.push_back(wilson_interval(h, cfg.replicas));
        if (a > 0 && res.estimate[a] > res.estimate[a - 1]) res.nonincreasing = false;
    }
    res.final_below = res.ci.back().hi < cfg.eps;
    return res;
}

BoundaryResult experiment_boundary(const BoundaryConfig& cfg) {
    if (cfg.replicas < 1) throw std::invalid_argument("replicas must be positive");
    BoundaryResult res;
    res.replicas = cfg.replicas;
    PlanarGraph g = build_graph(cfg.graph, cfg.delta);
    std::vector<double> nearest(cfg.replicas);
    parallel_replicas(cfg.replicas, [&](long long i) {
        Rng rng = make_stream(cfg.seed + tag(5, 0), i);
        double best = std::numeric_limits<double>::infinity();
        sample_loop_soup(g, rng, [&](std::span<const int> s, double) {
            if (!box_reaches(g, s, cfg.eps)) return;
            if (diameter(polyline_of(g, s)) < cfg.eps) return;
            for (int v : s) best = std::min(best, cfg.graph.domain.boundary_distance(g.position(v)));
        });
        nearest[i] = best;
    });
    res.nonincreasing = true;
    std::vector<size_t> idx(cfg.etas.size());
    for (size_t a = 0; a < cfg.etas.size(); ++a) {
        long long h = std::count_if(nearest.begin(), nearest.end(), [&](double d) { return d < cfg.etas[a]; });
        res.hits.push_back(h);
        res.ci.push_back(wilson_interval(h, cfg.replicas));
    }
    // event nesting: smaller eta can only lose hits
    for (size_t a = 0; a < cfg.etas.size(); ++a)
        for (size_t b = 0; b < cfg.etas.size(); ++b)
            if (cfg.etas[b] < cfg.etas[a] && res.hits[b] > res.hits[a]) res.nonincreasing = false;
    for (size_t a = 0; a < cfg.etas.size(); ++a)
        if (res.ci[a].hi <= cfg.eps) res.calibrated_eta = std::max(res.calibrated_eta, cfg.etas[a]);
    return res;
}

double appendix_a_bls_bound(double area, double eps, int N, double theta) {
    return 16 * area / (std::numbers::pi * eps * eps) * std::exp(-eps * eps * std::pow(N, 2 - theta) / 4);
}

double appendix_a_rwls_bound(double area, double eps, int N, double theta) {
    return 4 * area * std::pow(N, 2 + theta) * std::exp(-eps * eps * std::pow(N, 2 - theta) / 32);
}

bool AppendixAResult::pass() const {
    for (const auto& r : rows)
        if (!r.bls_pass || !r.rwls_pass) return false;
    return true;
}

AppendixAResult experiment_appendix_a(const AppendixAConfig& cfg) {
    if (!(cfg.theta < 2)) throw std::invalid_argument("theta must be below 2");
    if (cfg.replicas < 1) throw std::invalid_argument("replicas must be positive");
    AppendixAResult res;
    res.replicas = cfg.replicas;
    const double area = cfg.domain.area();
    for (int N : cfg.Ns) {
        AppendixARow row;
        row.N = N;
        const double cap = std::pow(N, cfg.theta - 2);
        const double max_steps = 2 * std::pow(N, cfg.theta);
        BlsOptions opt;
        opt.eta = cfg.eta;
        opt.resolution = cfg.bls_resolution;
        opt.lifetime_cap = cap;
        std::vector<char> bls(cfg.replicas), walk(cfg.replicas);
        parallel_replicas(cfg.replicas, [&](long long i) {
            Rng rng = make_stream(cfg.seed + tag(6, N), i);
            bls[i] = !sample_bls_restricted(cfg.domain, cfg.eps, rng, opt).loops.empty();
        });
        PlanarGraph g = build_square_lattice(1.0 / N, cfg.domain);
        parallel_replicas(cfg.replicas, [&](long long i) {
            Rng rng = make_stream(cfg.seed + tag(7, N), i);
            bool hit = false;
            sample_loop_soup(g, rng, [&](std::span<const int> s, double) {
                if (hit || static_cast<double>(s.size() - 1) > max_steps || !box_reaches(g, s, cfg.eps)) return;
                hit = diameter(polyline_of(g, s)) >= cfg.eps;
            });
            walk[i] = hit;
        });
        row.bls_hits = std::count(bls.begin(), bls.end(), 1);
        row.rwls_hits = std::count(walk.begin(), walk.end(), 1);
        row.bls_ci = wilson_interval(row.bls_hits, cfg.replicas);
        row.rwls_ci = wilson_interval(row.rwls_hits, cfg.replicas);
        row.bls_bound = appendix_a_bls_bound(area, cfg.eps, N, cfg.theta);
        row.rwls_bound = appendix_a_rwls_bound(area, cfg.eps, N, cfg.theta);
        row.bls_bound_printed = 16 * area / (std::numbers::pi * cfg.eps * cfg.eps) *
                                std::exp(-cfg.eps * cfg.eps * std::pow(N, 2 * cfg.theta) / 4);
        row.bls_graded = row.bls_bound < 1;
        row.rwls_graded = row.rwls_bound < 1;
        row.bls_pass = !row.bls_graded || row.bls_ci.hi <= row.bls_bound;
        row.rwls_pass = !row.rwls_graded || row.rwls_ci.hi <= row.rwls_bound;
        res.rows.push_back(row);
    }
    return res;
}

nlohmann::json to_json(const MeanEstimate& m) {
    return {{"mean", m.mean}, {"se", m.se}, {"lo", m.lo}, {"hi", m.hi}, {"n", m.n}};
}

nlohmann::json to_json(const Interval& i) { return {{"lo", i.lo}, {"hi", i.hi}}; }

nlohmann::json to_json(const ConvergenceResult& r) {
    nlohmann::json j;
    for (const auto& m : r.rwls) j["rwls"].push_back(to_json(m));
    j["bls"] = to_json(r.bls);
    j["pair_z"] = r.pair_z;
    j["bls_z"] = r.bls_z;
    j["cauchy"] = r.cauchy;
    j["agrees"] = r.agrees;
    j["soup_distance"] = r.soup_distance;
    j["note"] = "functional estimates only; distances between laws on loop multisets are not estimated";
    j["pass"] = r.pass();
    return j;
}

nlohmann::json to_json(const SchrammResult& r, const SchrammConfig& cfg) {
    nlohmann::json j;
    j["js"] = cfg.js;
    j["hits"] = r.hits;
    j["estimate"] = r.estimate;
    for (const auto& c : r.ci) j["ci"].push_back(to_json(c));
    j["replicas"] = r.replicas;
    j["j_max"] = r.j_max;
    j["crossing_scale"] = cfg.crossing_scale;
    j["vertices"] = r.vertices;
    j["nonincreasing"] = r.nonincreasing;
    j["final_below_eps"] = r.final_below;
    j["pass"] = r.pass();
    return j;
}

nlohmann::json to_json(const BoundaryResult& r, const BoundaryConfig& cfg) {
    nlohmann::json j;
    j["etas"] = cfg.etas;
    j["hits"] = r.hits;
    for (const auto& c : r.ci) j["ci"].push_back(to_json(c));
    j["replicas"] = r.replicas;
    j["nonincreasing"] = r.nonincreasing;
    j["calibrated_eta"] = r.calibrated_eta;
    j["pass"] = r.pass();
    return j;
}

nlohmann::json to_json(const AppendixAResult& r) {
    nlohmann::json j;
    j["replicas"] = r.replicas;
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"N", row.N},
                             {"bls_hits", row.bls_hits},
                             {"bls_ci", to_json(row.bls_ci)},
                             {"bls_bound", row.bls_bound},
                             {"bls_bound_printed", row.bls_bound_printed},
                             {"bls_graded", row.bls_graded},
                             {"rwls_hits", row.rwls_hits},
                             {"rwls_ci", to_json(row.rwls_ci)},
                             {"rwls_bound", row.rwls_bound},
                             {"rwls_graded", row.rwls_graded}});
    }
    j["pass"] = r.pass();
    return j;
}

void write_svg_plot(const std::string& path, const std::string& title, const std::vector<SvgSeries>& series,
                    bool log_y) {
    const double W = 640, H = 400, L = 60, Rm = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto fy = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && s.y[i] <= 0) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, fy(s.y[i]));
            y1 = std::max(y1, fy(s.y[i]));
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - Rm); };
    auto py = [&](double y) { return H - B - (fy(y) - y0) / (y1 - y0) * (H - T - B); };
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << format_double(x0) << "</text>\n";
    os << "<text x=\"" << W - Rm << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_double(x1) << "</text>\n";
    os << "<text x=\"4\" y=\"" << H - B << "\" font-size=\"11\">" << (log_y ? "1e" : "") << format_double(y0) << "</text>\n";
    os << "<text x=\"4\" y=\"" << T + 4 << "\" font-size=\"11\">" << (log_y ? "1e" : "") << format_double(y1) << "</text>\n";
    const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << colours[k % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && s.y[i] <= 0) continue;
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - Rm - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
           << colours[k % 5] << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace rwls
