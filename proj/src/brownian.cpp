#include "rwls/brownian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rwls {

BrownianLoopSample sample_bridge_loop(const Point& z, double t, int n, Rng& rng) {
    if (!(t > 0)) throw std::invalid_argument("lifetime must be positive");
    if (n < 8) throw std::invalid_argument("resolution must be at least 8");
    std::normal_distribution<double> gauss;
    BrownianLoopSample s;
    s.root = z;
    s.lifetime = t;
    s.poly.resize(n);
    s.poly[0] = z;
    const double h = t / (n - 1);
    Point x = z;
    for (int i = 1; i < n - 1; ++i) {
        double left = t - (i - 1) * h;  // time remaining before this step
        double after = left - h;
        Point mean = x + (z - x) * (h / left);
        double sd = std::sqrt(h * after / left);
        x = mean + sd * Point(gauss(rng), gauss(rng));
        s.poly[i] = x;
    }
    s.poly[n - 1] = z;
    return s;
}

void refine_bridge(BrownianLoopSample& loop, Rng& rng) {
    std::normal_distribution<double> gauss;
    const auto& p = loop.poly;
    const double h = loop.lifetime / (p.size() - 1);
    const double sd = std::sqrt(h / 4);
    Polyline q;
    q.reserve(2 * p.size() - 1);
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        q.push_back(p[i]);
        q.push_back(0.5 * (p[i] + p[i + 1]) + sd * Point(gauss(rng), gauss(rng)));
    }
    q.push_back(p.back());
    loop.poly = std::move(q);
}

double bls_min_lifetime(const Domain& domain, double eps, double eta) {
    if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    double L = std::log(16 * domain.area() / (std::numbers::pi * eps * eps * eta));
    return eps * eps / (4 * std::max(1.0, L));
}

double bls_max_lifetime(const Domain& domain) {
    double d = domain.diameter();
    return 2 * d * d / 1e-6;
}

namespace {

enum class Verdict { keep, drop, refine };

Verdict judge(const Domain& domain, const BrownianLoopSample& l, double eps) {
    const double h = l.lifetime / (l.poly.size() - 1);
    const double margin = 4 * std::sqrt(h);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& x : l.poly) {
        if (!domain.contains(x)) return Verdict::drop;
        nearest = std::min(nearest, domain.boundary_distance(x));
    }
    double d = diameter(l.poly);
    if (d + 2 * margin < eps) return Verdict::drop;
    if (d >= eps && nearest > margin) return Verdict::keep;
    return Verdict::refine;
}

}  // namespace

BrownianSoup sample_bls_restricted(const Domain& domain, double eps, Rng& rng, const BlsOptions& opt) {
    if (!(opt.eta > 0)) throw std::invalid_argument("eta must be positive");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    BrownianSoup soup;
    if (eps > domain.diameter()) return soup;
    soup.t_min = bls_min_lifetime(domain, eps, opt.eta);
    soup.t_max = bls_max_lifetime(domain);
    if (opt.lifetime_cap > 0) soup.t_max = std::min(soup.t_max, opt.lifetime_cap);
    if (soup.t_max <= soup.t_min) return soup;
    Point lo, hi;
    domain.bounding_box(lo, hi);
    const double box = (hi.x() - lo.x()) * (hi.y() - lo.y());
    const double a = 1 / soup.t_min, b = 1 / soup.t_max;
    soup.proposals = box / (2 * std::numbers::pi) * (a - b);
    std::poisson_distribution<long long> pois(soup.proposals);
    const long long count = pois(rng);
    for (long long i = 0; i < count; ++i) {
        Point z(lo.x() + uniform01(rng) * (hi.x() - lo.x()), lo.y() + uniform01(rng) * (hi.y() - lo.y()));
        double t = 1 / (a - uniform01(rng) * (a - b));
        if (!domain.contains(z)) continue;
        auto loop = sample_bridge_loop(z, t, opt.resolution, rng);
        Verdict v;
        while ((v = judge(domain, loop, eps)) == Verdict::refine && static_cast<int>(loop.poly.size()) < opt.max_points)
            refine_bridge(loop, rng);
        if (v == Verdict::refine) {
            bool inside = true;
            for (const auto& x : loop.poly) inside = inside && domain.contains(x);
            v = inside && diameter(loop.poly) >= eps ? Verdict::keep : Verdict::drop;
        }
        if (v == Verdict::keep) soup.loops.push_back(std::move(loop));
    }
    return soup;
}

bool LoopFunctional::operator()(const Polyline& p) const {
    switch (kind) {
        case Kind::diameter_at_least:
            return diameter(p) >= value;
        case Kind::touches_disk:
            return point_polyline_distance(centre, p) <= value;
        case Kind::stays_in_disk:
            for (const auto& x : p)
                if ((x - centre).norm() >= value) return false;
            return true;
    }
    return false;
}

std::string LoopFunctional::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::diameter_at_least:
            os << "diam>=" << format_double(value);
            break;
        case Kind::touches_disk:
            os << "touches:" << format_double(centre.x()) << "," << format_double(centre.y()) << ","
               << format_double(value);
            break;
        case Kind::stays_in_disk:
            os << "inside:" << format_double(centre.x()) << "," << format_double(centre.y()) << ","
               << format_double(value);
            break;
    }
    return os.str();
}

LoopFunctional parse_functional(const std::string& text) {
    LoopFunctional f;
    auto number = [&](const std::string& s) {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        size_t used = 0;
        double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad number in functional: " + s);
        return x;
    };
    auto disk = [&](const std::string& rest) {
        std::vector<double> xs;
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ',')) xs.push_back(number(part));
        if (xs.size() != 3) throw std::invalid_argument("disk functional needs x,y,radius");
        f.centre = Point(xs[0], xs[1]);
        f.value = xs[2];
    };
    if (text.rfind("diam>=", 0) == 0) {
        f.kind = LoopFunctional::Kind::diameter_at_least;
        f.value = number(text.substr(6));
    } else if (text.rfind("touches:", 0) == 0) {
        f.kind = LoopFunctional::Kind::touches_disk;
        disk(text.substr(8));
    } else if (text.rfind("inside:", 0) == 0) {
        f.kind = LoopFunctional::Kind::stays_in_disk;
        disk(text.substr(7));
    } else {
        throw std::invalid_argument("unsupported functional: " + text);
    }
    return f;
}

MeanEstimate bls_functional(const Domain& domain, double eps, const LoopFunctional& f, long long replicas, Rng& rng,
                            const BlsOptions& opt) {
    if (replicas < 2) throw std::invalid_argument("need at least two replicas");
    double sum = 0, sq = 0;
    for (long long i = 0; i < replicas; ++i) {
        auto soup = sample_bls_restricted(domain, eps, rng, opt);
        double c = 0;
        for (const auto& l : soup.loops) c += f(l.poly) ? 1 : 0;
        sum += c;
        sq += c * c;
    }
    return mean_ci_from_sums(sum, sq, replicas);
}

void write_brownian_jsonl(std::ostream& os, const BrownianSoup& soup) {
    for (const auto& l : soup.loops) {
        os << "{\"delta\":0,\"lifetime\":" << format_double(l.lifetime) << ",\"poly\":[";
        for (size_t i = 0; i < l.poly.size(); ++i)
            os << (i ? "," : "") << "[" << format_double(l.poly[i].x()) << "," << format_double(l.poly[i].y()) << "]";
        os << "]}\n";
    }
}

}  // namespace rwls
