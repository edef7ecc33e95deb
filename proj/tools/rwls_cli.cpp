// Command line driver: one subcommand per experiment. Exit status 0 means every
// graded verdict passed, 1 a statistical failure, 2 a usage or input error.

#include "rwls/brownian.hpp"
#include "rwls/experiments.hpp"
#include "rwls/graph.hpp"
#include "rwls/greedy.hpp"
#include "rwls/loops.hpp"
#include "rwls/metrics.hpp"
#include "rwls/soup.hpp"
#include "rwls/wilson.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace {

using namespace rwls;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string describe(const std::string& flag) {
    static const std::map<std::string, std::string> text{
        {"graph", "lattice kind (square, perturbed) or a graph file"},
        {"delta", "mesh, a number or a fraction such as 1/64 (lists allowed for compare)"},
        {"eps", "macroscopic loop diameter"},
        {"radius", "greedy radius r; defaults to the formula in eps and j0"},
        {"j0", "scale index entering the default radius"},
        {"branches", "number of branches to grow"},
        {"replicas", "independent replicas"},
        {"seed", "base seed"},
        {"out", "output prefix for .jsonl, .csv and .svg"},
        {"domain", "disk, square, disk:x,y,r or rect:x0,y0,x1,y1"},
        {"jitter", "site displacement as a fraction of delta, perturbed lattice only"},
        {"graph-seed", "seed of the perturbed lattice"},
        {"density-bound", "constant the vertex count per delta-ball must not exceed"},
        {"crossing-scale", "crossing rectangle scale in domain units"},
        {"max-length", "longest loop to enumerate"},
        {"method", "soup sampler: peeling or walks"},
        {"ordering", "vertex ordering: good or index"},
        {"check", "none or coupling"},
        {"threshold", "largest allowed loop distance under --check coupling"},
        {"mesh-check", "on or off; off allows delta >= r/100"},
        {"functional", "diam>=a, touches:x,y,rho or inside:x,y,rho"},
        {"eta", "Brownian truncation level, or a list of boundary distances for boundary"},
        {"resolution", "Brownian bridge points per loop"},
        {"dm-samples", "soup pairs for the sampled d_M summary"},
        {"start", "start point x,y; the nearest interior vertex is used"},
        {"k", "comma-separated iteration counts K"},
        {"j", "comma-separated ordering indices"},
        {"theta", "exponent of the short lifetime window"},
        {"N", "inverse mesh"},
    };
    auto it = text.find(flag);
    return it == text.end() ? flag : it->second;
}

// Flag value if given, else config value, else the default.
class Params {
public:
    void bind(CLI::App* app, const std::string& name, const std::string& help) {
        auto* opt = app->add_option("--" + name, values_[name], help);
        flags_[name] = opt;
    }
    void set_config(Config c) { config_ = std::move(c); }
    void check_config_keys() const {
        for (const auto& [k, v] : config_)
            if (!flags_.count(k)) throw UsageError("unknown config key: " + k);
    }

    std::optional<std::string> raw(const std::string& name) const {
        auto f = flags_.find(name);
        if (f != flags_.end() && f->second->count() > 0) return values_.at(name);
        auto c = config_.find(name);
        if (c != config_.end()) return c->second;
        return std::nullopt;
    }
    bool has(const std::string& name) const { return raw(name).has_value(); }
    std::string str(const std::string& name, const std::string& def) const { return raw(name).value_or(def); }
    double num(const std::string& name, double def) const {
        auto r = raw(name);
        if (!r) return def;
        try {
            return parse_number(*r);
        } catch (const std::invalid_argument&) {
            throw UsageError("--" + name + ": not a number: " + *r);
        }
    }
    double required_num(const std::string& name) const {
        if (!has(name)) throw UsageError("--" + name + " is required");
        return num(name, 0);
    }
    long long count(const std::string& name, long long def, long long lo = 1) const {
        double x = num(name, static_cast<double>(def));
        if (x != std::floor(x) || x < lo) throw UsageError("--" + name + " must be an integer >= " + std::to_string(lo));
        return static_cast<long long>(x);
    }
    std::vector<double> list(const std::string& name, const std::vector<double>& def) const {
        auto r = raw(name);
        if (!r) return def;
        try {
            return parse_number_list(*r);
        } catch (const std::invalid_argument&) {
            throw UsageError("--" + name + ": malformed list: " + *r);
        }
    }
    std::vector<int> int_list(const std::string& name, const std::vector<int>& def) const {
        auto r = raw(name);
        if (!r) return def;
        try {
            return parse_int_list(*r);
        } catch (const std::invalid_argument&) {
            throw UsageError("--" + name + ": malformed integer list: " + *r);
        }
    }

    json echo() const {
        json j = json::object();
        for (const auto& [k, v] : flags_)
            if (auto r = raw(k)) j[k] = *r;
        return j;
    }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> flags_;
    Config config_;
};

struct Outputs {
    std::string prefix;
    std::ofstream jsonl, csv;

    explicit Outputs(const std::string& p) : prefix(p) {
        if (prefix.empty()) return;
        jsonl.open(prefix + ".jsonl");
        csv.open(prefix + ".csv");
        if (!jsonl || !csv) throw UsageError("cannot write outputs under " + prefix);
    }
    void record(const json& j) {
        if (jsonl.is_open()) jsonl << j.dump() << '\n';
    }
    // Summary rows go to stdout and, when --out is given, to the CSV file.
    void row(const std::string& line) {
        std::cout << line << '\n';
        if (csv.is_open()) csv << line << '\n';
    }
    std::string svg_path() const { return prefix.empty() ? "" : prefix + ".svg"; }
};

std::string fmt(double x) { return format_double(x); }

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

GraphSpec graph_spec(const Params& p) {
    GraphSpec spec;
    std::string kind = p.str("graph", "square");
    if (kind != "square" && kind != "perturbed") throw UsageError("--graph must be square, perturbed or a graph file");
    spec.perturbed = kind == "perturbed";
    try {
        spec.domain = parse_domain(p.str("domain", "disk"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    spec.jitter = p.num("jitter", 0.2);
    spec.seed = static_cast<std::uint64_t>(p.count("graph-seed", 1, 0));
    return spec;
}

// A serialized graph file, or a lattice built at --delta.
PlanarGraph load_or_build(const Params& p) {
    std::string g = p.str("graph", "square");
    if (is_file(g)) return load_graph(g);
    return build_graph(graph_spec(p), p.required_num("delta"));
}

double domain_diameter(const Params& p) {
    std::string g = p.str("graph", "square");
    if (is_file(g)) {
        // the vertex set includes the boundary crossings, so its diameter is the domain's
        PlanarGraph graph = load_graph(g);
        Polyline pts;
        for (int v = 0; v < graph.size(); ++v) pts.push_back(graph.position(v));
        return diameter(pts);
    }
    return graph_spec(p).domain.diameter();
}

std::uint64_t seed_of(const Params& p) { return static_cast<std::uint64_t>(p.count("seed", 1, 0)); }

double radius_of(const Params& p, double eps, double diam) {
    if (p.has("radius")) return p.num("radius", 0);
    return default_radius(eps, static_cast<int>(p.count("j0", 1)), diam);
}

int verdict(bool pass) { return pass ? 0 : 1; }

// ---- subcommands ---------------------------------------------------------------

int cmd_verify_graph(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    Rng rng = make_stream(seed_of(p), 0);
    const long long trials = p.count("replicas", 10000, 100);
    const double density_bound = p.num("density-bound", 5);
    double row_err = 0;
    for (int v = 0; v < g.size(); ++v) {
        if (g.is_boundary(v)) continue;
        double s = 0;
        for (int k = 0; k < g.degree(v); ++k) s += g.probability(v, k);
        row_err = std::max(row_err, std::abs(s - 1));
    }
    const int density = check_bounded_density(g);
    const double edge = max_edge_diameter(g);
    const double rho = interior_spectral_radius(g);
    // 3:1 crossing rectangles of short side 1/4 straddling the origin
    Point lo(-0.375, -0.0625);
    const double scale = p.num("crossing-scale", 0.25) / g.mesh();
    auto h = estimate_crossing_probability(g, lo, scale, Orientation::horizontal, StartPolicy::sample, trials, rng);
    auto v = estimate_crossing_probability(g, Point(-0.0625, -0.375), scale, Orientation::vertical,
                                           StartPolicy::sample, trials, rng);
    const bool pass = row_err <= 1e-12 && density <= density_bound && rho < 1 && h.lo > 0 && v.lo > 0;
    json rec{{"command", "verify-graph"}, {"version", kVersion}, {"config", p.echo()},
             {"vertices", g.size()}, {"interior", g.interior_count()}, {"row_sum_error", row_err},
             {"density", density}, {"density_bound", density_bound}, {"max_edge", edge},
             {"spectral_radius", rho},
             {"crossing_horizontal", {{"estimate", h.estimate}, {"lo", h.lo}, {"hi", h.hi}, {"starts", h.starts_tried}}},
             {"crossing_vertical", {{"estimate", v.estimate}, {"lo", v.lo}, {"hi", v.hi}, {"starts", v.starts_tried}}},
             {"pass", pass}};
    out.record(rec);
    out.row("vertices,interior,row_sum_error,density,max_edge,spectral_radius,crossing_h_lo,crossing_v_lo,pass");
    out.row(std::to_string(g.size()) + "," + std::to_string(g.interior_count()) + "," + fmt(row_err) + "," +
            std::to_string(density) + "," + fmt(edge) + "," + fmt(rho) + "," + fmt(h.lo) + "," + fmt(v.lo) + "," +
            (pass ? "pass" : "fail"));
    return verdict(pass);
}

int cmd_oracle(const Params& p, Outputs& out) {
    if (!p.has("graph")) throw UsageError("--graph <file> is required");
    std::string path = p.str("graph", "");
    if (!is_file(path)) throw UsageError("no such graph file: " + path);
    PlanarGraph g = load_graph(path);
    const int max_len = static_cast<int>(p.count("max-length", 8));
    const double mass = total_loop_mass(g);
    std::cout << "total_mass " << std::fixed << std::setprecision(6) << mass << std::defaultfloat << '\n';
    out.row("length,loop,mass");
    double listed = 0;
    for (const auto& c : enumerate_loops(g, max_len)) {
        std::string seq;
        for (int x : c.loop.canonical) seq += (seq.empty() ? "" : " ") + std::to_string(x);
        out.row(std::to_string(c.loop.length()) + "," + seq + "," + fmt(c.mass));
        out.record({{"length", c.loop.length()}, {"loop", c.loop.canonical}, {"mass", c.mass}});
        listed += c.mass;
    }
    out.record({{"command", "oracle"}, {"version", kVersion}, {"total_mass", mass}, {"listed_mass", listed},
                {"max_length", max_len}});
    return 0;
}

int cmd_sample_soup(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    const long long R = p.count("replicas", 1);
    const double eps = p.num("eps", 0);
    const std::uint64_t seed = seed_of(p);
    SoupOptions opt;
    std::string method = p.str("method", "walks");
    if (method == "peeling") opt.method = SoupMethod::peeling;
    else if (method != "walks") throw UsageError("--method must be walks or peeling");
    out.row("replica,loops,macroscopic");
    for (long long i = 0; i < R; ++i) {
        Rng rng = make_stream(seed, i);
        LoopSoup soup = sample_loop_soup(g, rng, opt);
        soup.delta = g.mesh();
        json loops = json::array();
        int big = 0;
        for (const auto& l : soup.loops) {
            double d = loop_diameter(g, l.vertices);
            if (d >= eps) ++big;
            if (d >= eps) loops.push_back(json::parse(soup_loop_json(g, g.mesh(), l.vertices, l.mark)));
        }
        out.record({{"replica", i}, {"seed", seed}, {"loops", soup.loops.size()}, {"eps", eps}, {"kept", loops}});
        out.row(std::to_string(i) + "," + std::to_string(soup.loops.size()) + "," + std::to_string(big));
    }
    return 0;
}

int cmd_wilson(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    const long long R = p.count("replicas", 1);
    const double eps = p.num("eps", 0.1);
    std::string ordering = p.str("ordering", "good");
    VertexOrdering order;
    if (ordering == "good") order = good_ordering(g);
    else if (ordering == "index") order = index_ordering(g);
    else throw UsageError("--ordering must be good or index");
    const int m = p.has("branches") ? static_cast<int>(p.count("branches", 1)) : -1;
    out.row("replica,branches,erased_loops,macroscopic");
    for (long long i = 0; i < R; ++i) {
        Rng rng = make_stream(seed_of(p), i);
        WilsonRun run = wilsons_algorithm(g, order, rng, m);
        size_t erased = 0;
        for (const auto& e : run.erased) erased += e.size();
        int macro = macroscopic_loop_count(g, run, eps);
        std::ostringstream os;
        write_run_json(os, run);
        json rec = json::parse(os.str());
        rec["replica"] = i;
        rec["macroscopic"] = macro;
        out.record(rec);
        out.row(std::to_string(i) + "," + std::to_string(run.branch_count()) + "," + std::to_string(erased) + "," +
                std::to_string(macro));
    }
    return 0;
}

int cmd_greedy(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    const double diam = domain_diameter(p);
    const double eps = p.num("eps", 0.2);
    const double r = radius_of(p, eps, diam);
    const long long R = p.count("replicas", 1);
    const int m = static_cast<int>(p.count("branches", 1));
    std::string check = p.str("check", "none");
    if (check != "none" && check != "coupling") throw UsageError("--check must be none or coupling");
    const double threshold = p.num("threshold", 2 * eps);
    GreedyOptions opt;
    opt.check_mesh = p.str("mesh-check", "on") == "on";
    if (opt.check_mesh && !(g.mesh() < r / 100))
        throw UsageError("mesh " + fmt(g.mesh()) + " is not below r/100 = " + fmt(r / 100) +
                         "; pass --mesh-check off to run anyway");
    const VertexOrdering order = good_ordering(g);

    struct Row {
        int branches = 0, errors = 0, checked = 0;
        double max_distance = 0;
        int sandwich = 0, trigger = 0, large = 0;
        json rec;
    };
    std::vector<Row> rows(R);
    parallel_replicas(R, [&](long long i) {
        Rng rng = make_stream(seed_of(p), i);
        GreedyRun run = greedy_algorithm(g, order, eps, r, m, rng, opt);
        Row& row = rows[i];
        row.branches = static_cast<int>(run.branches.size());
        json br = json::array();
        for (const auto& b : run.branches) {
            json jb{{"start", b.start}, {"N", b.N}, {"error", b.error}, {"steps", b.walk.size() - 1}};
            if (b.error) {
                ++row.errors;
            } else if (check == "coupling") {
                CouplingReport rep = coupling_report(g, b, eps, threshold);
                ++row.checked;
                row.max_distance = std::max(row.max_distance, rep.max_distance);
                row.sandwich += rep.sandwich_violations;
                row.trigger += rep.trigger_violations;
                row.large += rep.large_loops;
                jb["max_distance"] = rep.max_distance;
                jb["sandwich_checks"] = rep.sandwich_checks;
                jb["sandwich_violations"] = rep.sandwich_violations;
                jb["trigger_violations"] = rep.trigger_violations;
                jb["large_loops"] = rep.large_loops;
            }
            br.push_back(jb);
        }
        row.rec = {{"replica", i}, {"kappa", run.kappa}, {"branches", br}};
    });
    double worst = 0;
    int errors = 0, checked = 0, sandwich = 0, trigger = 0, large = 0;
    for (auto& row : rows) {
        out.record(row.rec);
        worst = std::max(worst, row.max_distance);
        errors += row.errors;
        checked += row.checked;
        sandwich += row.sandwich;
        trigger += row.trigger;
        large += row.large;
    }
    bool pass = true;
    if (check == "coupling") pass = worst <= threshold && sandwich == 0 && trigger == 0;
    out.record({{"command", "greedy"}, {"version", kVersion}, {"config", p.echo()}, {"radius", r},
                {"error_bound", error_probability_bound(eps, r, diam)}, {"error_branches", errors},
                {"checked_branches", checked}, {"max_distance", worst}, {"threshold", threshold},
                {"sandwich_violations", sandwich}, {"trigger_violations", trigger}, {"large_loops", large},
                {"pass", pass}});
    out.row("delta,eps,radius,replicas,error_branches,checked,max_distance,sandwich_violations,trigger_violations,pass");
    out.row(fmt(g.mesh()) + "," + fmt(eps) + "," + fmt(r) + "," + std::to_string(R) + "," + std::to_string(errors) +
            "," + std::to_string(checked) + "," + fmt(worst) + "," + std::to_string(sandwich) + "," +
            std::to_string(trigger) + "," + (pass ? "pass" : "fail"));
    return verdict(pass);
}

int cmd_couple(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    const long long R = p.count("replicas", 1);
    const int m = p.has("branches") ? static_cast<int>(p.count("branches", 1)) : -1;
    const VertexOrdering order = good_ordering(g);
    long long ok = 0;
    out.row("replica,branches,core_identity");
    for (long long i = 0; i < R; ++i) {
        Rng rng = make_stream(seed_of(p), i);
        bool good = true;
        size_t n = 0;
        try {
            n = couple_soup_to_branches(g, order, rng, m).size();
        } catch (const std::logic_error&) {
            good = false;
        }
        ok += good;
        out.record({{"replica", i}, {"branches", n}, {"core_identity", good}});
        out.row(std::to_string(i) + "," + std::to_string(n) + "," + (good ? "1" : "0"));
    }
    return verdict(ok == R);
}

ConvergenceConfig convergence_config(const Params& p) {
    ConvergenceConfig c;
    c.graph = graph_spec(p);
    c.deltas = p.list("delta", c.deltas);
    c.eps = p.num("eps", c.eps);
    c.functional = {LoopFunctional::Kind::diameter_at_least, c.eps, {0, 0}};
    if (p.has("functional")) {
        try {
            c.functional = parse_functional(p.str("functional", ""));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    c.replicas = p.count("replicas", c.replicas, 2);
    c.eta = p.num("eta", c.eta);
    c.bls_resolution = static_cast<int>(p.count("resolution", c.bls_resolution, 8));
    c.dm_samples = static_cast<int>(p.count("dm-samples", c.dm_samples, 0));
    c.seed = seed_of(p);
    if (c.deltas.size() < 2) throw UsageError("--delta needs at least two meshes");
    return c;
}

int cmd_compare(const Params& p, Outputs& out) {
    ConvergenceConfig c = convergence_config(p);
    ConvergenceResult r = experiment_convergence(c);
    json rec = to_json(r);
    rec["command"] = "compare";
    rec["version"] = kVersion;
    rec["config"] = p.echo();
    rec["functional"] = c.functional.describe();
    rec["deltas"] = c.deltas;
    out.record(rec);
    out.row("source,delta,mean,se,lo,hi");
    SvgSeries s{"walk soup", {}, {}}, b{"Brownian reference", {}, {}};
    for (size_t k = 0; k < c.deltas.size(); ++k) {
        const auto& m = r.rwls[k];
        out.row("rwls," + fmt(c.deltas[k]) + "," + fmt(m.mean) + "," + fmt(m.se) + "," + fmt(m.lo) + "," + fmt(m.hi));
        s.x.push_back(std::log2(1 / c.deltas[k]));
        s.y.push_back(m.mean);
        b.x.push_back(s.x.back());
        b.y.push_back(r.bls.mean);
    }
    out.row("bls,0," + fmt(r.bls.mean) + "," + fmt(r.bls.se) + "," + fmt(r.bls.lo) + "," + fmt(r.bls.hi));
    out.row(std::string("verdict,cauchy=") + (r.cauchy ? "pass" : "fail") + ",agrees=" + (r.agrees ? "pass" : "fail"));
    if (!out.svg_path().empty()) write_svg_plot(out.svg_path(), "mean count against log2(1/delta)", {s, b});
    return verdict(r.pass());
}

int cmd_tail(const Params& p, Outputs& out) {
    PlanarGraph g = load_or_build(p);
    const double diam = domain_diameter(p);
    const double eps = p.num("eps", 1);
    const double r = radius_of(p, eps, diam);
    const long long R = p.count("replicas", 10000);
    GreedyOptions opt;
    opt.check_mesh = p.str("mesh-check", "on") == "on";
    if (opt.check_mesh && !(g.mesh() < r / 100))
        throw UsageError("mesh is not below r/100; pass --mesh-check off to run anyway");
    std::vector<double> at = p.list("start", {-0.5, -0.5});
    if (at.size() != 2) throw UsageError("--start expects x,y");
    const int start = g.nearest_vertex(Point(at[0], at[1]));
    Rng rng = make_stream(seed_of(p), 0);
    TailReport rep = iteration_tail(g, start, eps, r, diam, R, rng, p.int_list("k", {}), opt);
    json rows = json::array();
    out.row("K,count,estimate,ci_lo,ci_hi,bound,graded,pass");
    SvgSeries e{"P(N >= K) upper CI", {}, {}}, bnd{"bound", {}, {}};
    for (const auto& row : rep.rows) {
        rows.push_back({{"K", row.K}, {"count", row.count}, {"ci", to_json(row.ci)}, {"bound", row.bound},
                        {"graded", row.graded}, {"statement_range", row.statement_range}, {"pass", row.pass}});
        out.row(std::to_string(row.K) + "," + std::to_string(row.count) + "," + fmt(row.estimate) + "," +
                fmt(row.ci.lo) + "," + fmt(row.ci.hi) + "," + fmt(row.bound) + "," + (row.graded ? "1" : "0") + "," +
                (row.pass ? "pass" : "fail"));
        e.x.push_back(row.K);
        e.y.push_back(row.ci.hi);
        bnd.x.push_back(row.K);
        bnd.y.push_back(std::min(row.bound, 1.0));
    }
    out.record({{"command", "tail"}, {"version", kVersion}, {"config", p.echo()}, {"radius", r}, {"start", start},
                {"beta", rep.constants.beta}, {"alpha", rep.constants.alpha}, {"max_n", rep.max_n},
                {"rows", rows}, {"pass", rep.pass}});
    if (!out.svg_path().empty()) write_svg_plot(out.svg_path(), "iteration count survival", {e, bnd}, true);
    return verdict(rep.pass);
}

int cmd_schramm(const Params& p, Outputs& out) {
    SchrammConfig c;
    c.graph = graph_spec(p);
    c.delta = p.num("delta", c.delta);
    c.eps = p.num("eps", c.eps);
    c.js = p.int_list("j", c.js);
    c.replicas = p.count("replicas", c.replicas);
    c.crossing_scale = p.num("crossing-scale", c.crossing_scale);
    c.seed = seed_of(p);
    SchrammResult r = experiment_schramm(c);
    json rec = to_json(r, c);
    rec["command"] = "schramm";
    rec["version"] = kVersion;
    rec["config"] = p.echo();
    out.record(rec);
    out.row("j,hits,estimate,ci_lo,ci_hi");
    SvgSeries s{"P(late walk diameter > eps)", {}, {}};
    for (size_t a = 0; a < c.js.size(); ++a) {
        out.row(std::to_string(c.js[a]) + "," + std::to_string(r.hits[a]) + "," + fmt(r.estimate[a]) + "," +
                fmt(r.ci[a].lo) + "," + fmt(r.ci[a].hi));
        s.x.push_back(c.js[a]);
        s.y.push_back(r.estimate[a]);
    }
    out.row(std::string("verdict,nonincreasing=") + (r.nonincreasing ? "pass" : "fail") +
            ",final_below=" + (r.final_below ? "pass" : "fail") + ",j_max=" + std::to_string(r.j_max));
    if (!out.svg_path().empty()) write_svg_plot(out.svg_path(), "late large walks against j", {s});
    return verdict(r.pass());
}

int cmd_boundary(const Params& p, Outputs& out) {
    BoundaryConfig c;
    c.graph = graph_spec(p);
    c.delta = p.num("delta", c.delta);
    c.eps = p.num("eps", c.eps);
    c.etas = p.list("eta", c.etas);
    c.replicas = p.count("replicas", c.replicas);
    c.seed = seed_of(p);
    BoundaryResult r = experiment_boundary(c);
    json rec = to_json(r, c);
    rec["command"] = "boundary";
    rec["version"] = kVersion;
    rec["config"] = p.echo();
    out.record(rec);
    out.row("eta,hits,ci_lo,ci_hi");
    SvgSeries s{"P(large loop within eta of boundary)", {}, {}};
    for (size_t a = 0; a < c.etas.size(); ++a) {
        out.row(fmt(c.etas[a]) + "," + std::to_string(r.hits[a]) + "," + fmt(r.ci[a].lo) + "," + fmt(r.ci[a].hi));
        s.x.push_back(c.etas[a]);
        s.y.push_back(static_cast<double>(r.hits[a]) / r.replicas);
    }
    out.row(std::string("verdict,nonincreasing=") + (r.nonincreasing ? "pass" : "fail") +
            ",calibrated_eta=" + fmt(r.calibrated_eta));
    if (!out.svg_path().empty()) write_svg_plot(out.svg_path(), "boundary approach against eta", {s});
    return verdict(r.pass());
}

int cmd_appendix_a(const Params& p, Outputs& out) {
    AppendixAConfig c;
    try {
        c.domain = parse_domain(p.str("domain", "disk"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    c.eps = p.num("eps", c.eps);
    c.theta = p.num("theta", c.theta);
    if (!(c.theta < 2)) throw UsageError("--theta must be below 2");
    c.Ns = p.int_list("N", c.Ns);
    c.replicas = p.count("replicas", c.replicas);
    c.eta = p.num("eta", c.eta);
    c.seed = seed_of(p);
    AppendixAResult r = experiment_appendix_a(c);
    json rec = to_json(r);
    rec["command"] = "appendix-a";
    rec["version"] = kVersion;
    rec["config"] = p.echo();
    out.record(rec);
    out.row("N,bls_hits,bls_ci_hi,bls_bound,bls_graded,rwls_hits,rwls_ci_hi,rwls_bound,rwls_graded");
    for (const auto& row : r.rows)
        out.row(std::to_string(row.N) + "," + std::to_string(row.bls_hits) + "," + fmt(row.bls_ci.hi) + "," +
                fmt(row.bls_bound) + "," + (row.bls_graded ? "graded" : "ungraded") + "," +
                std::to_string(row.rwls_hits) + "," + fmt(row.rwls_ci.hi) + "," + fmt(row.rwls_bound) + "," +
                (row.rwls_graded ? "graded" : "ungraded"));
    return verdict(r.pass());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walk loop soup experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct Command {
        std::string name, help;
        int (*run)(const Params&, Outputs&);
        std::vector<std::string> extra;
    };
    const std::vector<std::string> common{"graph", "delta", "eps", "radius", "j0", "branches", "replicas", "seed",
                                          "out", "domain", "jitter", "graph-seed"};
    const std::vector<Command> commands{
        {"verify-graph", "check the standing assumptions on a graph", cmd_verify_graph,
         {"density-bound", "crossing-scale"}},
        {"oracle", "exact loop masses of a small graph file", cmd_oracle, {"max-length"}},
        {"sample-soup", "sample random walk loop soups", cmd_sample_soup, {"method"}},
        {"wilson", "run Wilson's algorithm", cmd_wilson, {"ordering"}},
        {"greedy", "run greedy branches and check the coupling", cmd_greedy, {"check", "threshold", "mesh-check"}},
        {"couple", "attach soup loops to Wilson branches", cmd_couple, {}},
        {"compare", "compare soup functionals across meshes and with the Brownian soup", cmd_compare,
         {"functional", "eta", "resolution", "dm-samples"}},
        {"tail", "tail of the greedy iteration count", cmd_tail, {"start", "k", "mesh-check"}},
        {"schramm", "late large walks along a good ordering", cmd_schramm, {"j", "crossing-scale"}},
        {"boundary", "large loops near the boundary", cmd_boundary, {"eta"}},
        {"appendix-a", "short-lived large loops against their bounds", cmd_appendix_a, {"theta", "N", "eta"}},
    };

    std::map<CLI::App*, std::pair<const Command*, Params>> subs;
    std::map<CLI::App*, std::string> config_path;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        auto& entry = subs[sub];
        entry.first = &c;
        for (const auto& f : common) entry.second.bind(sub, f, describe(f));
        for (const auto& f : c.extra) entry.second.bind(sub, f, describe(f));
        sub->add_option("--config", config_path[sub], "key = value file; flags take precedence");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    for (auto& [sub, entry] : subs) {
        if (!sub->parsed()) continue;
        auto& [cmd, params] = entry;
        try {
            if (!config_path[sub].empty()) {
                params.set_config(load_config(config_path[sub]));
                params.check_config_keys();
            }
            Outputs out(params.str("out", ""));
            const auto t0 = std::chrono::steady_clock::now();
            int code = cmd->run(params, out);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cerr << cmd->name << ": " << (code == 0 ? "pass" : "fail") << " in " << format_double(secs) << " s\n";
            return code;
        } catch (const UsageError& e) {
            std::cerr << "error: " << e.what() << "\n\n" << sub->help();
            return 2;
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n\n" << sub->help();
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}
